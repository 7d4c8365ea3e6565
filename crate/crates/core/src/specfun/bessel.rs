use super::gamma::{ln_gamma, rgamma};
use super::{CompensatedSum, EvalResult};
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

fn series(nu: f64, x: f64) -> EvalResult {
    let half = 0.5 * x;
    let q = -half * half;
    let lead = (nu * half.ln() - ln_gamma(nu + 1.0)).exp();
    let mut term = 1.0;
    let mut sum = CompensatedSum::default();
    sum.add(term);
    let mut k = 1.0;
    while k < 1000.0 {
        term *= q / (k * (nu + k));
        sum.add(term);
        if term.abs() < EPS * 0.01 * sum.value().abs() {
            break;
        }
        k += 1.0;
    }
    let v = lead * sum.value();
    EvalResult::new(v, lead * (2.0 * EPS * sum.magnitude()))
}

/// Miller backward recurrence normalised with
/// (x/2)^ν / Γ(ν+1) = Σ_k c_k J_{ν+2k}(x),
/// c_0 = 1, c_k = (ν+2k)(ν+1)_{k-1}/k!.
fn miller(nu: f64, x: f64) -> EvalResult {
    let start = (x + 30.0 + 6.0 * x.sqrt()).ceil() as usize + 2;
    let mut j_up = 0.0; // J_{μ+1}
    let mut j = 1e-280; // J_μ
    let mut norm = CompensatedSum::default();
    let result;

    // c_k for k = 0..=start/2, ν-dependent and independent of x
    let kmax = start / 2 + 1;
    let mut coeff = vec![1.0; kmax + 1];
    let mut poch = 1.0; // (ν+1)_{k-1}
    let mut fact = 1.0;
    for k in 1..=kmax {
        if k >= 2 {
            poch *= nu + (k - 1) as f64;
        }
        fact *= k as f64;
        coeff[k] = (nu + 2.0 * k as f64) * poch / fact;
    }

    let mut idx = start;
    loop {
        if idx % 2 == 0 {
            norm.add(coeff[idx / 2] * j);
        }
        if idx == 0 {
            result = j;
            break;
        }
        let mu = nu + idx as f64;
        let down = 2.0 * mu / x * j - j_up;
        j_up = j;
        j = down;
        idx -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            j_up *= 1e-250;
            let scaled = norm.value() * 1e-250;
            norm = CompensatedSum::default();
            norm.add(scaled);
        }
    }
    let lhs = (nu * (0.5 * x).ln()).exp() * rgamma(nu + 1.0);
    let scale = lhs / norm.value();
    let v = result * scale;
    EvalResult::new(v, 64.0 * EPS * (v.abs() + (norm.magnitude() * scale).abs() * 1e-3))
}

/// Bessel function of the first kind J_ν(x) for ν ≥ 0, x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<EvalResult> {
    if nu.is_nan() || x.is_nan() || nu < 0.0 || x < 0.0 {
        return Err(Error::domain("bessel_j", format!("nu={nu}, x={x}")));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(if nu == 0.0 { 1.0 } else { 0.0 }));
    }
    if x <= 5.0 || x < 0.5 * nu {
        Ok(series(nu, x))
    } else {
        Ok(miller(nu, x))
    }
}

/// J_ν(x) for any real order and x > 0 (x = 0 allowed for ν ≥ 0).
///
/// Negative non-integer orders come from one or more steps of the
/// (downward-stable) recurrence J_{ν-1} = (2ν/x) J_ν − J_{ν+1}.
pub fn bessel_j_signed(nu: f64, x: f64) -> Result<EvalResult> {
    if nu >= 0.0 {
        return bessel_j(nu, x);
    }
    if nu == nu.round() {
        let n = -nu;
        let r = bessel_j(n, x)?;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(r.scale(sign));
    }
    if x <= 0.0 {
        return Err(Error::domain(
            "bessel_j_signed",
            format!("x = {x} with negative order {nu}"),
        ));
    }
    let steps = (-nu).ceil();
    let base = nu + steps; // in (0, 1)
    let mut upper = bessel_j(base + 1.0, x)?;
    let mut cur = bessel_j(base, x)?;
    let mut order = base;
    for _ in 0..steps as usize {
        let v = 2.0 * order / x * cur.value - upper.value;
        let e = (2.0 * order / x * cur.abs_error_estimate).abs() + upper.abs_error_estimate;
        upper = cur;
        cur = EvalResult::new(v, e + EPS * v.abs());
        order -= 1.0;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap().value, 1.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn half_integer_closed_forms() {
        // J_{1/2}(x) = sqrt(2/(πx)) sin x, J_{-1/2}(x) = sqrt(2/(πx)) cos x
        for &x in &[0.3, 2.0, 7.5, 31.0, 88.0] {
            let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
            let p = bessel_j(0.5, x).unwrap().value;
            let m = bessel_j_signed(-0.5, x).unwrap().value;
            assert!((p - pref * x.sin()).abs() < 1e-12, "x={x}: {p}");
            assert!((m - pref * x.cos()).abs() < 1e-12, "x={x}: {m}");
        }
    }

    #[test]
    fn integer_order_known_values() {
        // J0(10) and J1(10) reference values
        assert!((bessel_j(0.0, 10.0).unwrap().value + 0.245_935_764_451_348_3).abs() < 1e-13);
        assert!((bessel_j(1.0, 10.0).unwrap().value - 0.043_472_746_168_861_44).abs() < 1e-13);
        assert!((bessel_j_signed(-1.0, 10.0).unwrap().value + 0.043_472_746_168_861_44).abs() < 1e-13);
    }

    #[test]
    fn series_and_recurrence_agree_near_switch() {
        for &nu in &[0.0, 0.7, 1.5, 3.2] {
            let a = series(nu, 5.5);
            let b = miller(nu, 5.5);
            assert!((a.value - b.value).abs() < 1e-12, "nu={nu}");
        }
    }
}
