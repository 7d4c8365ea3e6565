//! Piecewise closed-form radial functions on a fixed (σ, m) channel and the
//! radial action of the spin-flip ladders.
//!
//! A profile is a sum of terms `c · (r/rₛ)^p · exp(q r²) · F(r)` on each side
//! of the tube radius. Derivatives stay symbolic, so the image of a ladder is
//! again a closed form.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn value(self) -> f64 {
        match self {
            Spin::Down => -0.5,
            Spin::Up => 0.5,
        }
    }

    /// σ + 1/2 as an integer.
    pub fn offset(self) -> i64 {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }

    pub fn from_value(v: f64) -> Option<Spin> {
        if v == -0.5 {
            Some(Spin::Down)
        } else if v == 0.5 {
            Some(Spin::Up)
        } else {
            None
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Spin::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("sigma must be ±0.5, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    pub sigma: Spin,
    pub m: i64,
}

impl Channel {
    pub fn new(sigma: Spin, m: i64) -> Self {
        Channel { sigma, m }
    }
    pub fn down(m: i64) -> Self {
        Channel::new(Spin::Down, m)
    }
    pub fn up(m: i64) -> Self {
        Channel::new(Spin::Up, m)
    }
    /// ν = m + α
    pub fn nu(&self, alpha: f64) -> f64 {
        self.m as f64 + alpha
    }
    /// m + σ, the column label shared by superpartners.
    pub fn column(&self) -> f64 {
        self.m as f64 + self.sigma.value()
    }
    /// mθ(m) + σ + 1/2
    pub fn interior_offset(&self) -> f64 {
        self.m.max(0) as f64 + self.sigma.value() + 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldMode {
    LandauPlusTube,
    TubeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxConfig {
    pub alpha: f64,
    pub r_tube: f64,
    pub kappa: f64,
    pub field_mode: FieldMode,
}

impl FluxConfig {
    pub fn new(alpha: f64, r_tube: f64, kappa: f64, field_mode: FieldMode) -> Result<Self> {
        if !alpha.is_finite() || !kappa.is_finite() {
            return Err(Error::InvalidConfig("alpha and kappa must be finite".into()));
        }
        if !(r_tube > 0.0) || !r_tube.is_finite() {
            return Err(Error::InvalidConfig(format!("tube radius must be > 0, got {r_tube}")));
        }
        if field_mode == FieldMode::TubeOnly && kappa != 0.0 {
            return Err(Error::InvalidConfig("the pure flux-tube system is only defined for kappa = 0".into()));
        }
        Ok(FluxConfig {
            alpha,
            r_tube,
            kappa,
            field_mode,
        })
    }

    pub fn landau(alpha: f64, r_tube: f64) -> Result<Self> {
        FluxConfig::new(alpha, r_tube, 0.0, FieldMode::LandauPlusTube)
    }

    pub fn tube_only(alpha: f64, r_tube: f64) -> Result<Self> {
        FluxConfig::new(alpha, r_tube, 0.0, FieldMode::TubeOnly)
    }

    /// Coefficient of the linear term of the gauge profile inside the tube.
    fn interior_gauge_slope(&self) -> f64 {
        let tube = self.alpha / (self.r_tube * self.r_tube);
        match self.field_mode {
            FieldMode::LandauPlusTube => 1.0 + tube,
            FieldMode::TubeOnly => tube,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpecialFactor {
    One,
    /// L_n^{(a)}(scale·r²)
    Laguerre { n: u32, a: f64, scale: f64 },
    /// ₁F₁(a; b; scale·r²)
    KummerM { a: f64, b: f64, scale: f64 },
    /// U(a, b, scale·r²)
    TricomiU { a: f64, b: f64, scale: f64 },
    /// J_ν(k r), any real order
    BesselJ { nu: f64, k: f64 },
    /// Γ(s, scale·r²)/Γ(s)
    GammaUpperRatio { s: f64, scale: f64 },
    /// exp(−1/(1−t²)) on |t| < 1, t = (r − center)/width
    Bump { center: f64, width: f64 },
    BumpDeriv { center: f64, width: f64 },
}

impl SpecialFactor {
    fn eval(&self, r: f64) -> Result<f64> {
        Ok(match *self {
            SpecialFactor::One => 1.0,
            SpecialFactor::Laguerre { n, a, scale } => specfun::laguerre_assoc(n, a, scale * r * r).value,
            SpecialFactor::KummerM { a, b, scale } => specfun::kummer_m(a, b, scale * r * r)?.value,
            SpecialFactor::TricomiU { a, b, scale } => specfun::tricomi_u(a, b, scale * r * r)?.value,
            SpecialFactor::BesselJ { nu, k } => specfun::bessel_j_signed(nu, k * r)?.value,
            SpecialFactor::GammaUpperRatio { s, scale } => {
                specfun::gamma_upper(s, scale * r * r)?.value * specfun::rgamma(s)
            }
            SpecialFactor::Bump { center, width } => {
                let t = (r - center) / width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - t * t)).exp()
                }
            }
            SpecialFactor::BumpDeriv { center, width } => {
                let t = (r - center) / width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - t * t;
                    (-1.0 / d).exp() * (-2.0 * t / (d * d)) / width
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub p: f64,
    pub q: f64,
    /// reference radius: the power is taken of r/rs
    pub rs: f64,
    pub factor: SpecialFactor,
}

impl Term {
    pub fn new(coeff: f64, p: f64, q: f64, rs: f64, factor: SpecialFactor) -> Self {
        Term {
            coeff,
            p,
            q,
            rs,
            factor,
        }
    }

    pub fn power(coeff: f64, p: f64) -> Self {
        Term::new(coeff, p, 0.0, 1.0, SpecialFactor::One)
    }

    fn eval(&self, r: f64) -> Result<f64> {
        if self.coeff == 0.0 {
            return Ok(0.0);
        }
        let f = self.factor.eval(r)?;
        if f == 0.0 {
            return Ok(0.0);
        }
        let log_pow = if self.p == 0.0 {
            0.0
        } else if r == 0.0 {
            if self.p > 0.0 {
                return Ok(0.0);
            }
            return Ok(f64::INFINITY * self.coeff.signum() * f.signum());
        } else {
            self.p * (r / self.rs).ln()
        };
        Ok(self.coeff * (log_pow + self.q * r * r).exp() * f)
    }

    /// Same term multiplied by r^shift.
    fn shifted(&self, coeff: f64, shift: f64) -> Term {
        Term {
            coeff: coeff * self.rs.powf(shift),
            p: self.p + shift,
            ..*self
        }
    }

    fn derivative(&self) -> Result<Vec<Term>> {
        let c = self.coeff;
        let mut out = Vec::with_capacity(3);
        if self.p != 0.0 {
            out.push(self.shifted(c * self.p, -1.0));
        }
        if self.q != 0.0 {
            out.push(self.shifted(c * 2.0 * self.q, 1.0));
        }
        let with_factor = |coeff: f64, shift: f64, factor: SpecialFactor| Term {
            factor,
            ..self.shifted(coeff, shift)
        };
        match self.factor {
            SpecialFactor::One => {}
            SpecialFactor::Laguerre { n, a, scale } => {
                if n > 0 {
                    out.push(with_factor(
                        -2.0 * scale * c,
                        1.0,
                        SpecialFactor::Laguerre { n: n - 1, a: a + 1.0, scale },
                    ));
                }
            }
            SpecialFactor::KummerM { a, b, scale } => {
                if a != 0.0 {
                    out.push(with_factor(
                        2.0 * scale * c * a / b,
                        1.0,
                        SpecialFactor::KummerM { a: a + 1.0, b: b + 1.0, scale },
                    ));
                }
            }
            SpecialFactor::TricomiU { a, b, scale } => {
                if a != 0.0 {
                    out.push(with_factor(
                        -2.0 * scale * c * a,
                        1.0,
                        SpecialFactor::TricomiU { a: a + 1.0, b: b + 1.0, scale },
                    ));
                }
            }
            SpecialFactor::BesselJ { nu, k } => {
                out.push(with_factor(0.5 * k * c, 0.0, SpecialFactor::BesselJ { nu: nu - 1.0, k }));
                out.push(with_factor(-0.5 * k * c, 0.0, SpecialFactor::BesselJ { nu: nu + 1.0, k }));
            }
            SpecialFactor::GammaUpperRatio { s, scale } => {
                // d/dr Γ(s, λr²)/Γ(s) = −2 λ^s r^{2s−1} e^{−λr²}/Γ(s)
                let coeff = -2.0 * c * scale.powf(s) * specfun::rgamma(s);
                out.push(Term {
                    coeff: coeff * self.rs.powf(self.p + 2.0 * s - 1.0) / self.rs.powf(self.p),
                    p: self.p + 2.0 * s - 1.0,
                    q: self.q - scale,
                    rs: self.rs,
                    factor: SpecialFactor::One,
                });
            }
            SpecialFactor::Bump { center, width } => {
                out.push(with_factor(c, 0.0, SpecialFactor::BumpDeriv { center, width }));
            }
            SpecialFactor::BumpDeriv { .. } => {
                return Err(Error::InvalidConfig("second derivative of a bump term".into()));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedForm {
    pub terms: Vec<Term>,
}

impl ClosedForm {
    pub fn new(terms: Vec<Term>) -> Self {
        ClosedForm { terms }
    }

    pub fn single(term: Term) -> Self {
        ClosedForm { terms: vec![term] }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let mut s = 0.0;
        for t in &self.terms {
            s += t.eval(r)?;
        }
        Ok(s)
    }

    pub fn derivative(&self) -> Result<ClosedForm> {
        let mut terms = Vec::new();
        for t in &self.terms {
            terms.extend(t.derivative()?);
        }
        Ok(ClosedForm { terms })
    }

    pub fn scaled(mut self, c: f64) -> ClosedForm {
        for t in &mut self.terms {
            t.coeff *= c;
        }
        self
    }

    fn times_power(&self, c: f64, shift: f64) -> ClosedForm {
        ClosedForm {
            terms: self.terms.iter().map(|t| t.shifted(t.coeff * c, shift)).collect(),
        }
    }

    fn extend(&mut self, other: ClosedForm) {
        self.terms.extend(other.terms);
    }

    /// True when every term is a plain power of r.
    pub fn is_pure_power(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.q == 0.0 && matches!(t.factor, SpecialFactor::One))
    }
}

/// Large-r behaviour of the exterior piece, used to pick an integration
/// strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Gaussian,
    Power,
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub interior: ClosedForm,
    pub exterior: ClosedForm,
    pub channel: Channel,
    pub config: FluxConfig,
    pub tail: Tail,
}

impl RadialProfile {
    /// Glues `interior_shape` to `exterior`, rescaling the interior so that
    /// the two pieces agree at the tube radius.
    pub fn continuous(
        interior_shape: ClosedForm,
        exterior: ClosedForm,
        channel: Channel,
        config: FluxConfig,
        tail: Tail,
    ) -> Result<Self> {
        let rt = config.r_tube;
        let outer = exterior.eval(rt)?;
        let inner = interior_shape.eval(rt)?;
        if inner == 0.0 || !inner.is_finite() {
            return Err(Error::Pole {
                function: "interior shape at tube radius",
                at: rt,
            });
        }
        Ok(RadialProfile {
            interior: interior_shape.scaled(outer / inner),
            exterior,
            channel,
            config,
            tail,
        })
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.interior = self.interior.scaled(c);
        self.exterior = self.exterior.scaled(c);
        self
    }

    pub fn piece(&self, side: Side) -> &ClosedForm {
        match side {
            Side::Interior => &self.interior,
            Side::Exterior => &self.exterior,
        }
    }

    pub fn side_of(&self, r: f64) -> Side {
        if r < self.config.r_tube {
            Side::Interior
        } else {
            Side::Exterior
        }
    }

    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("evaluate", format!("r = {r}")));
        }
        self.piece(self.side_of(r)).eval(r)
    }

    pub fn evaluate_side(&self, r: f64, side: Side) -> Result<f64> {
        self.piece(side).eval(r)
    }

    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.derivative_side(r, self.side_of(r))
    }

    pub fn derivative_side(&self, r: f64, side: Side) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("derivative", format!("r = {r}")));
        }
        self.piece(side).derivative()?.eval(r)
    }

    /// The profile f′ as a profile.
    pub fn derivative_profile(&self) -> Result<RadialProfile> {
        Ok(RadialProfile {
            interior: self.interior.derivative()?,
            exterior: self.exterior.derivative()?,
            ..self.clone()
        })
    }

    /// ½(±f′ + (m/r) f + a(r) f) on each piece.
    fn ladder(&self, sign: f64, target: Channel) -> Result<RadialProfile> {
        let cfg = self.config;
        let m = self.channel.m as f64;
        let build = |piece: &ClosedForm, inside: bool| -> Result<ClosedForm> {
            let mut out = piece.derivative()?.scaled(0.5 * sign);
            let inv_r = if inside { m } else { m + cfg.alpha };
            if inv_r != 0.0 {
                out.extend(piece.times_power(0.5 * inv_r, -1.0));
            }
            let lin = if inside {
                cfg.interior_gauge_slope()
            } else {
                match cfg.field_mode {
                    FieldMode::LandauPlusTube => 1.0,
                    FieldMode::TubeOnly => 0.0,
                }
            };
            if lin != 0.0 {
                out.extend(piece.times_power(0.5 * lin, 1.0));
            }
            Ok(out)
        };
        Ok(RadialProfile {
            interior: build(&self.interior, true)?,
            exterior: build(&self.exterior, false)?,
            channel: target,
            config: cfg,
            tail: self.tail,
        })
    }

    /// Spin-raising ladder: (σ=−1/2, m) → (σ=+1/2, m−1). The result is in
    /// general discontinuous at the tube radius.
    pub fn apply_raising(&self) -> Result<RadialProfile> {
        if self.channel.sigma != Spin::Down {
            return Err(Error::SpinPrecondition { required: "-1/2" });
        }
        self.ladder(1.0, Channel::up(self.channel.m - 1))
    }

    /// Spin-lowering ladder: (σ=+1/2, m) → (σ=−1/2, m+1).
    pub fn apply_lowering(&self) -> Result<RadialProfile> {
        if self.channel.sigma != Spin::Up {
            return Err(Error::SpinPrecondition { required: "+1/2" });
        }
        self.ladder(-1.0, Channel::down(self.channel.m + 1))
    }

    /// Adds a smooth bump of the given height and half-width centred on the
    /// tube radius — a representative of the null vector as R̃ → 0.
    pub fn with_null_bump(&self, height: f64, width: f64) -> RadialProfile {
        let bump = Term::new(
            height * std::f64::consts::E,
            0.0,
            0.0,
            1.0,
            SpecialFactor::Bump {
                center: self.config.r_tube,
                width,
            },
        );
        let mut out = self.clone();
        out.interior.terms.push(bump);
        out.exterior.terms.push(bump);
        out
    }

    pub fn continuity_gap(&self) -> Result<f64> {
        let rt = self.config.r_tube;
        Ok((self.interior.eval(rt)? - self.exterior.eval(rt)?).abs())
    }
}

/// Radial Hamiltonian on the channel, applied to a function given by values
/// on a five-point stencil; `h` is the stencil spacing and `inside` selects
/// the interior potential.
pub(crate) fn radial_hamiltonian_fd(
    cfg: &FluxConfig,
    ch: Channel,
    r: f64,
    h: f64,
    f: [f64; 5],
    inside: bool,
) -> f64 {
    let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
    let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
    let fc = f[2];
    let kinetic = -0.25 * (d2 + d1 / r);
    let m = ch.m as f64;
    let sigma = ch.sigma.value();
    let alpha = cfg.alpha;
    let rt2 = cfg.r_tube * cfg.r_tube;
    let potential = match (cfg.field_mode, inside) {
        (FieldMode::LandauPlusTube, false) => {
            let nu = m + alpha;
            nu * nu / (4.0 * r * r) + r * r / 4.0 + nu / 2.0 + sigma
        }
        (FieldMode::LandauPlusTube, true) => {
            let beta = 1.0 + alpha / rt2;
            m * m / (4.0 * r * r) + beta * beta * r * r / 4.0 + beta * (m / 2.0 + sigma)
        }
        (FieldMode::TubeOnly, false) => {
            let nu = m + alpha;
            nu * nu / (4.0 * r * r)
        }
        (FieldMode::TubeOnly, true) => {
            let g = alpha / rt2;
            m * m / (4.0 * r * r) + g * (g * r * r / 4.0 + m / 2.0 + sigma)
        }
    };
    kinetic + potential * fc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn landau_ground() -> RadialProfile {
        let cfg = FluxConfig::landau(0.0, 0.5).unwrap();
        let ext = ClosedForm::single(Term::new(1.0, 0.0, -0.5, 1.0, SpecialFactor::One));
        RadialProfile::continuous(ext.clone(), ext, Channel::down(0), cfg, Tail::Gaussian).unwrap()
    }

    #[test]
    fn ground_state_value_and_slope() {
        let p = landau_ground();
        assert_eq!(p.evaluate(0.0).unwrap(), 1.0);
        let d = p.derivative(1.0).unwrap();
        assert!((d + (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn power_derivative() {
        let f = ClosedForm::single(Term::power(1.0, 1.5));
        let d = f.derivative().unwrap().eval(4.0).unwrap();
        assert!((d - 3.0).abs() < 1e-14);
    }

    #[test]
    fn singlet_exterior_value() {
        // r^{-(m+α)} e^{-r²/2} at m = 0, α = 0.5, r = 1
        let f = ClosedForm::single(Term::new(1.0, -0.5, -0.5, 1.0, SpecialFactor::One));
        assert!((f.eval(1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn ladder_spin_preconditions() {
        let p = landau_ground();
        assert!(p.apply_lowering().is_err());
        let mut up = p.clone();
        up.channel = Channel::up(0);
        assert!(up.apply_raising().is_err());
        assert_eq!(p.apply_raising().unwrap().channel, Channel::up(-1));
    }

    #[test]
    fn gaussian_is_raising_singlet() {
        // the α=0 ground state is an E=0 supersinglet
        let q = landau_ground().apply_raising().unwrap();
        for &r in &[0.1, 0.3, 0.7, 1.5, 3.0] {
            assert!(q.evaluate(r).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert!(FluxConfig::landau(0.5, 0.0).is_err());
        assert!(FluxConfig::new(0.5, 1.0, 0.1, FieldMode::TubeOnly).is_err());
        assert!(FluxConfig::new(0.5, 1.0, 0.1, FieldMode::LandauPlusTube).is_ok());
    }

    #[test]
    fn spin_round_trips_as_number() {
        let ch = Channel::up(-3);
        let s = serde_json::to_string(&ch).unwrap();
        assert_eq!(s, r#"{"sigma":0.5,"m":-3}"#);
        let back: Channel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
    }
}
