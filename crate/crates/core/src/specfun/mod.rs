//! Real-argument special functions used by the radial closed forms.
//!
//! Every routine returns an [`EvalResult`] carrying a rough absolute error
//! estimate next to the value. Estimates are derived from the magnitude of
//! the largest intermediate quantity (series terms, connection-formula
//! branches) times machine epsilon, so they flag cancellation rather than
//! certify a bound.

mod bessel;
mod gamma;
mod hypergeometric;
mod laguerre;

pub use bessel::{bessel_j, bessel_j_signed};
pub use gamma::{gamma_fn, gamma_lower, gamma_upper, ln_gamma, rgamma};
pub use hypergeometric::{kummer_m, kummer_m_deriv, tricomi_u, tricomi_u_deriv};
pub use laguerre::laguerre_assoc;


#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl EvalResult {
    pub fn new(value: f64, abs_error_estimate: f64) -> Self {
        let abs_error_estimate = if abs_error_estimate.is_nan() {
            f64::INFINITY
        } else {
            abs_error_estimate.abs()
        };
        Self {
            value,
            abs_error_estimate,
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_error_estimate
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }

    pub(crate) fn scale(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.abs_error_estimate * factor.abs())
    }
}

/// Neumaier-compensated running sum that also tracks the sum of magnitudes,
/// which is what the error estimates are built from.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
    magnitude: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += term.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

pub(crate) fn near_integer(x: f64, tol: f64) -> Option<f64> {
    let r = x.round();
    if (x - r).abs() <= tol {
        Some(r)
    } else {
        None
    }
}
