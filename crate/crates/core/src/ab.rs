//! The pure flux tube (no background field): scattering states at k > 0,
//! the finitely many k = 0 modes and the index they define.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{
    radial_hamiltonian_fd, Channel, ClosedForm, FluxConfig, RadialProfile, Side, SpecialFactor, Spin, Tail, Term,
};
use crate::spectrum::{
    admissible_families, index_singular, singular_norm, state_profile, EigenState, Family,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbBranch {
    /// exterior J_{m+α}(kr)
    PlusOrder,
    /// exterior J_{−(m+α)}(kr)
    MinusOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbScatterState {
    pub channel: Channel,
    pub k: f64,
    pub branch: AbBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroModeRegime {
    /// |m+α| > 1
    Normalizable,
    /// |m+α| = 1
    LogNormalized,
    /// ½ < |m+α| < 1
    NonNormalizable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbZeroMode {
    pub channel: Channel,
    pub regime: ZeroModeRegime,
    /// normalisation constant of the mode
    pub nu: f64,
}

/// Same family rule as with the background field: channels carrying the
/// shifted Laguerre family take J_{m+α}, those carrying the unshifted one
/// J_{−(m+α)}. Where neither is admissible m+α is an integer and the two
/// orders give the same function up to sign.
pub fn ab_branch(alpha: f64, ch: Channel) -> AbBranch {
    let fams = admissible_families(alpha, ch);
    if fams.iter().any(|a| a.family == Family::LagA) {
        AbBranch::PlusOrder
    } else if fams.iter().any(|a| a.family == Family::LagB) {
        AbBranch::MinusOrder
    } else {
        AbBranch::PlusOrder
    }
}

impl AbScatterState {
    pub fn new(alpha: f64, channel: Channel, k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::domain("ab_state", format!("k must be > 0, got {k}")));
        }
        Ok(AbScatterState {
            channel,
            k,
            branch: ab_branch(alpha, channel),
        })
    }

    pub fn order(&self, alpha: f64) -> f64 {
        let nu = self.channel.nu(alpha);
        match self.branch {
            AbBranch::PlusOrder => nu,
            AbBranch::MinusOrder => -nu,
        }
    }
}

fn bessel_exterior(order: f64, k: f64) -> ClosedForm {
    ClosedForm::single(Term::new(1.0, 0.0, 0.0, 1.0, SpecialFactor::BesselJ { nu: order, k }))
}

/// Scattering profile: J_{±(m+α)}(kr) outside, Kummer M inside, continuous
/// at the tube radius. At α = 0 there is no tube and the Bessel function
/// is used everywhere.
pub fn ab_state_profile(alpha: f64, ch: Channel, k: f64, r_tube: f64) -> Result<RadialProfile> {
    let state = AbScatterState::new(alpha, ch, k)?;
    let cfg = FluxConfig::tube_only(alpha, r_tube)?;
    let exterior = bessel_exterior(state.order(alpha), k);
    if alpha == 0.0 {
        return Ok(RadialProfile {
            interior: exterior.clone(),
            exterior,
            channel: ch,
            config: cfg,
            tail: Tail::Oscillatory,
        });
    }
    let g = alpha / (r_tube * r_tube);
    let am = ch.m.unsigned_abs() as f64;
    let a = ch.interior_offset() - r_tube * r_tube * k * k / (4.0 * alpha);
    let interior = ClosedForm::single(Term::new(
        1.0,
        am,
        -0.5 * g,
        r_tube,
        SpecialFactor::KummerM { a, b: 1.0 + am, scale: g },
    ));
    RadialProfile::continuous(interior, exterior, ch, cfg, Tail::Oscillatory)
}

fn regime_of(nu: f64) -> ZeroModeRegime {
    let a = nu.abs();
    if a > 1.0 {
        ZeroModeRegime::Normalizable
    } else if a == 1.0 {
        ZeroModeRegime::LogNormalized
    } else {
        ZeroModeRegime::NonNormalizable
    }
}

/// All k = 0 modes: σ = −½ with m ≤ 0 and m+α > ½, σ = +½ with m ≥ 0 and
/// m+α < −½.
pub fn ab_zero_modes(alpha: f64, r_tube: f64) -> Result<Vec<AbZeroMode>> {
    if !(r_tube > 0.0) {
        return Err(Error::InvalidConfig(format!("tube radius must be > 0, got {r_tube}")));
    }
    let reach = alpha.abs().ceil() as i64 + 1;
    let mut out = Vec::new();
    let down = (-reach..=0).map(Channel::down).filter(|c| c.nu(alpha) > 0.5);
    let up = (0..=reach).map(Channel::up).filter(|c| c.nu(alpha) < -0.5);
    for ch in down.chain(up) {
        let nu = ch.nu(alpha);
        let regime = regime_of(nu);
        let norm = match regime {
            ZeroModeRegime::Normalizable => singular_norm(alpha, ch, r_tube)?,
            ZeroModeRegime::LogNormalized => {
                if r_tube >= 1.0 {
                    return Err(Error::InvalidConfig("log normalisation needs R < 1".into()));
                }
                (-std::f64::consts::PI * (r_tube * r_tube).ln()).powf(-0.5)
            }
            ZeroModeRegime::NonNormalizable => 1.0,
        };
        out.push(AbZeroMode {
            channel: ch,
            regime,
            nu: norm,
        });
    }
    Ok(out)
}

/// r^{∓(m+α)} outside, (r/R)^{∓m} e^{∓αr²/2R²} inside, times the mode's
/// normalisation.
pub fn ab_zero_mode_profile(alpha: f64, mode: &AbZeroMode, r_tube: f64) -> Result<RadialProfile> {
    let cfg = FluxConfig::tube_only(alpha, r_tube)?;
    let ch = mode.channel;
    let s = match ch.sigma {
        Spin::Down => -1.0,
        Spin::Up => 1.0,
    };
    let nu = ch.nu(alpha);
    let exterior = ClosedForm::single(Term::power(mode.nu, s * nu));
    let interior = ClosedForm::single(Term::new(
        1.0,
        s * ch.m as f64,
        s * 0.5 * alpha / (r_tube * r_tube),
        r_tube,
        SpecialFactor::One,
    ));
    RadialProfile::continuous(interior, exterior, ch, cfg, Tail::Power)
}

/// #{σ=−½ zero modes} − #{σ=+½ zero modes}.
pub fn index_ab(alpha: f64) -> i64 {
    let reach = alpha.abs().ceil() as i64 + 1;
    let down = (-reach..=0).filter(|&m| m as f64 + alpha > 0.5).count() as i64;
    let up = (0..=reach).filter(|&m| m as f64 + alpha < -0.5).count() as i64;
    down - up
}

/// n on (n−½, n+½] for n ≥ 1, 0 on [−½, ½], n on [n−½, n+½) for n ≤ −1.
pub fn index_ab_closed_form(alpha: f64) -> i64 {
    if alpha > 0.5 {
        (alpha - 0.5).ceil() as i64
    } else if alpha < -0.5 {
        (alpha + 0.5).floor() as i64
    } else {
        0
    }
}

/// max over exterior grid points of |Hψ − (k²/4)ψ| / max(1, |ψ|).
pub fn ab_hamiltonian_residual(profile: &RadialProfile, alpha: f64, k: f64, grid: &[f64]) -> Result<f64> {
    let cfg = FluxConfig::tube_only(alpha, profile.config.r_tube)?;
    let e = 0.25 * k * k;
    let mut worst = 0.0f64;
    for &r in grid {
        if r < cfg.r_tube {
            return Err(Error::domain("ab_hamiltonian_residual", format!("grid point {r} inside the tube")));
        }
        let h = 3e-3 * r.min(1.0);
        let mut f = [0.0; 5];
        for (i, v) in f.iter_mut().enumerate() {
            *v = profile.evaluate_side(r + (i as f64 - 2.0) * h, Side::Exterior)?;
        }
        let hpsi = radial_hamiltonian_fd(&cfg, profile.channel, r, h, f, false);
        worst = worst.max((hpsi - e * f[2]).abs() / f[2].abs().max(1.0));
    }
    Ok(worst)
}

/// ψ_λ(r) = λ⁻¹ ψ(r/λ; R/λ): a background-field state with its lengths
/// measured in units λ times the magnetic length. As λ → ∞ the background
/// field vanishes while the tube keeps radius R and flux α.
pub fn rescaled_landau_value(state: &EigenState, r_tube: f64, lambda: f64, r: f64) -> Result<f64> {
    let p = state_profile(state.alpha, state, r_tube / lambda)?;
    Ok(p.evaluate(r / lambda)? / lambda)
}

#[derive(Serialize)]
struct ZeroModeDoc<'a> {
    alpha: f64,
    r_tube: f64,
    index_ab: i64,
    modes: &'a [AbZeroMode],
}

pub fn zero_modes_json(alpha: f64, r_tube: f64) -> Result<String> {
    let modes = ab_zero_modes(alpha, r_tube)?;
    Ok(serde_json::to_string_pretty(&ZeroModeDoc {
        alpha,
        r_tube,
        index_ab: index_ab(alpha),
        modes: &modes,
    })
    .expect("zero modes serialise"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexPoint {
    pub alpha: f64,
    #[serde(rename = "I_AB")]
    pub i_ab: i64,
    #[serde(rename = "I_s")]
    pub i_s: i64,
}

pub fn index_curve(alphas: &[f64]) -> Vec<IndexPoint> {
    alphas
        .iter()
        .map(|&alpha| IndexPoint {
            alpha,
            i_ab: index_ab(alpha),
            i_s: index_singular(alpha),
        })
        .collect()
}

pub fn index_curve_csv(points: &[IndexPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_is_bessel() {
        let p = ab_state_profile(0.0, Channel::down(2), 1.0, 0.1).unwrap();
        for r in [0.05, 0.5, 3.0] {
            let want = crate::specfun::bessel_j(2.0, r).unwrap().value;
            assert!((p.evaluate(r).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn profile_is_continuous() {
        let p = ab_state_profile(0.7, Channel::up(0), 2.0, 1e-3).unwrap();
        assert!(p.continuity_gap().unwrap() < 1e-15);
        assert_eq!(ab_branch(0.7, Channel::up(0)), AbBranch::PlusOrder);
    }

    #[test]
    fn zero_mode_lists() {
        assert!(ab_zero_modes(0.4, 1e-3).unwrap().is_empty());
        let m = ab_zero_modes(1.5, 1e-3).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].channel, Channel::down(0));
        assert_eq!(m[0].regime, ZeroModeRegime::Normalizable);
        let m = ab_zero_modes(-1.0, 1e-3).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].channel, Channel::up(0));
        assert_eq!(m[0].regime, ZeroModeRegime::LogNormalized);
        let want = (-std::f64::consts::PI * (1e-6f64).ln()).powf(-0.5);
        assert!((m[0].nu - want).abs() < 1e-15);
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_ab(0.5), 0);
        assert_eq!(index_ab(1.5), 1);
        assert_eq!(index_ab(-0.6), -1);
        assert_eq!(index_ab_closed_form(-0.6), -1);
    }

    #[test]
    fn csv_header() {
        let s = index_curve_csv(&index_curve(&[1.5]));
        assert!(s.starts_with("alpha,I_AB,I_s\n1.5,1,1"));
    }
}
