//! The eigenproblem at finite tube radius: matched ansatz, the derivative
//! matching condition, a pole-aware root scan, and the small-R̃ condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{Channel, ClosedForm, FieldMode, FluxConfig, RadialProfile, SpecialFactor, Spin, Tail, Term};
use crate::specfun;

pub const DEFAULT_SCAN_STEP: f64 = 0.01;
pub const DEFAULT_E_MAX: f64 = 6.0;
const ROOT_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub energy: f64,
    pub residual_at_root: f64,
    pub bracket: (f64, f64),
    pub channel: Channel,
}

fn require_landau(cfg: &FluxConfig) -> Result<()> {
    if cfg.field_mode != FieldMode::LandauPlusTube {
        return Err(Error::InvalidConfig("matching requires the homogeneous background field".into()));
    }
    Ok(())
}

/// 1 + α/R̃²; the interior field strength in units of the background.
fn beta(cfg: &FluxConfig) -> Result<f64> {
    let b = 1.0 + cfg.alpha / (cfg.r_tube * cfg.r_tube);
    if b == 0.0 {
        return Err(Error::InvalidConfig("alpha = -R^2 leaves no field inside the tube".into()));
    }
    Ok(b)
}

fn interior_parameter(cfg: &FluxConfig, ch: Channel, e: f64) -> Result<f64> {
    Ok(ch.interior_offset() - e / beta(cfg)?)
}

fn exterior_form(cfg: &FluxConfig, ch: Channel, e: f64) -> ClosedForm {
    let nu = ch.nu(cfg.alpha);
    ClosedForm::single(Term::new(
        1.0,
        nu,
        -0.5,
        1.0,
        SpecialFactor::TricomiU {
            a: nu + ch.sigma.value() + 0.5 - e,
            b: nu + 1.0,
            scale: 1.0,
        },
    ))
}

pub(crate) fn interior_kummer_shape(cfg: &FluxConfig, ch: Channel, e: f64) -> Result<ClosedForm> {
    let b = beta(cfg)?;
    let am = ch.m.unsigned_abs() as f64;
    Ok(ClosedForm::single(Term::new(
        1.0,
        am,
        -0.5 * b,
        cfg.r_tube,
        SpecialFactor::KummerM {
            a: interior_parameter(cfg, ch, e)?,
            b: 1.0 + am,
            scale: b,
        },
    )))
}

/// Continuous piecewise solution at energy `e`: Tricomi U outside, Kummer M
/// inside, interior rescaled to meet the exterior at R̃.
pub fn matched_ansatz(cfg: &FluxConfig, ch: Channel, e: f64) -> Result<RadialProfile> {
    require_landau(cfg)?;
    let interior = interior_kummer_shape(cfg, ch, e)?;
    RadialProfile::continuous(interior, exterior_form(cfg, ch, e), ch, *cfg, Tail::Gaussian).map_err(|err| match err {
        Error::Pole { .. } => Error::PoleAtE { energy: e },
        other => other,
    })
}

struct MatchTerms {
    x_du_m: f64,
    y_dm_u: f64,
    u_m: f64,
    constant: f64,
    u: f64,
    m: f64,
}

fn match_terms(cfg: &FluxConfig, ch: Channel, e: f64) -> Result<MatchTerms> {
    require_landau(cfg)?;
    let x = cfg.r_tube * cfg.r_tube;
    let nu = ch.nu(cfg.alpha);
    let au = nu + ch.sigma.value() + 0.5 - e;
    let u = specfun::tricomi_u(au, nu + 1.0, x)?.value;
    let du = specfun::tricomi_u_deriv(au, nu + 1.0, x)?.value;
    let y = x + cfg.alpha;
    let am = interior_parameter(cfg, ch, e)?;
    let bm = 1.0 + ch.m.unsigned_abs() as f64;
    let m = specfun::kummer_m(am, bm, y)?.value;
    let dm = specfun::kummer_m_deriv(am, bm, y)?.value;
    Ok(MatchTerms {
        x_du_m: x * du * m,
        y_dm_u: y * dm * u,
        u_m: u * m,
        constant: (ch.m.min(0) as f64) + cfg.alpha,
        u,
        m,
    })
}

impl MatchTerms {
    /// The condition multiplied through by U·M: free of poles, and zero
    /// exactly at the roots.
    fn cross(&self) -> f64 {
        let raw = self.x_du_m - self.y_dm_u + self.constant * self.u_m;
        let scale = self.x_du_m.abs().max(self.y_dm_u.abs()).max(self.u_m.abs());
        if scale == 0.0 {
            0.0
        } else {
            raw / scale
        }
    }
}

/// Left side of the derivative matching condition, normalised by the larger
/// logarithmic-derivative term so that it stays O(1).
///
/// When U and ₁F₁ both vanish at R̃ the two pieces share a node there and can
/// always be joined smoothly, so the condition holds and 0 is returned.
pub fn matching_residual(cfg: &FluxConfig, ch: Channel, e: f64) -> Result<f64> {
    let t = match_terms(cfg, ch, e)?;
    match (t.u == 0.0, t.m == 0.0) {
        (true, true) => return Ok(0.0),
        (false, false) => {}
        _ => return Err(Error::PoleAtE { energy: e }),
    }
    let t1 = t.x_du_m / t.u_m;
    let t2 = t.y_dm_u / t.u_m;
    let raw = t1 - t2 + t.constant;
    Ok(raw / 1f64.max(t1.abs()).max(t2.abs()))
}

#[derive(Clone, Copy)]
struct Sample {
    e: f64,
    value: f64,
}

fn sample(cfg: &FluxConfig, ch: Channel, e: f64) -> Option<Sample> {
    match_terms(cfg, ch, e).ok().map(|t| Sample { e, value: t.cross() })
}

fn bisect(cfg: &FluxConfig, ch: Channel, mut lo: Sample, mut hi: Sample) -> Option<MatchResult> {
    let bracket = (lo.e, hi.e);
    while hi.e - lo.e > ROOT_WIDTH {
        let mid = 0.5 * (lo.e + hi.e);
        if mid <= lo.e || mid >= hi.e {
            break;
        }
        let s = sample(cfg, ch, mid)?;
        if s.value == 0.0 {
            lo = s;
            hi = s;
            break;
        }
        if (s.value > 0.0) == (lo.value > 0.0) {
            lo = s;
        } else {
            hi = s;
        }
    }
    let e = 0.5 * (lo.e + hi.e);
    let res = matching_residual(cfg, ch, e)
        .map(f64::abs)
        .unwrap_or_else(|_| sample(cfg, ch, e).map(|s| s.value.abs()).unwrap_or(f64::INFINITY));
    Some(MatchResult {
        energy: e,
        residual_at_root: res,
        bracket,
        channel: ch,
    })
}

/// All roots of the matching condition found by sign changes on the grid
/// `e_min + i·step ≤ e_max`, refined by bisection to 1e-12.
///
/// The scan runs on the condition multiplied by both denominators, so the
/// poles of the logarithmic derivatives never produce a sign change and
/// cannot be mistaken for roots. Roots closer together than the step can be
/// missed; that is a property of the grid, not an error.
pub fn scan_roots(cfg: &FluxConfig, ch: Channel, e_min: f64, e_max: f64, step: f64) -> Vec<MatchResult> {
    let mut out = Vec::new();
    if !(step > 0.0) || !(e_max > e_min) {
        return out;
    }
    let n = ((e_max - e_min) / step + 1e-9).floor() as usize;
    let mut prev: Option<Sample> = None;
    for i in 0..=n {
        let e = e_min + step * i as f64;
        let Some(cur) = sample(cfg, ch, e) else {
            prev = None;
            continue;
        };
        if cur.value == 0.0 {
            out.push(MatchResult {
                energy: e,
                residual_at_root: 0.0,
                bracket: (e, e),
                channel: ch,
            });
        } else if let Some(p) = prev {
            if p.value != 0.0 && (p.value > 0.0) != (cur.value > 0.0) {
                out.extend(bisect(cfg, ch, p, cur));
            }
        }
        prev = Some(cur);
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out.dedup_by(|a, b| (a.energy - b.energy).abs() < 1e-9);
    out
}

/// Leading small-R̃ form of the matching condition; independent of E.
///
/// The sign ambiguity of the prefactor is resolved with ± = 2σ, the only
/// choice under which the condition holds identically for σ=−1/2, m≤0 and
/// σ=+1/2, m≥0. In those two branches the cancellation is exact and 0.0 is
/// returned directly.
pub fn small_r_condition(ch: Channel, alpha: f64) -> f64 {
    match ch.sigma {
        Spin::Down if ch.m <= 0 => return 0.0,
        Spin::Up if ch.m >= 0 => return 0.0,
        _ => {}
    }
    let sign = 2.0 * ch.sigma.value();
    let am = ch.m.unsigned_abs() as f64;
    let prefactor = sign * ch.nu(alpha) + alpha - am;
    let a0 = ch.interior_offset();
    let b = 1.0 + am;
    let m = specfun::kummer_m(a0, b, alpha).map(|r| r.value).unwrap_or(f64::NAN);
    let dm = specfun::kummer_m_deriv(a0, b, alpha).map(|r| r.value).unwrap_or(f64::NAN);
    prefactor * m - 2.0 * alpha * dm
}

/// The E=0, σ=−1/2 supersinglet of the finite tube, unnormalised:
/// r^{−(m+α)} e^{−r²/2} outside, Gaussian times (r/R̃)^{−m} inside.
pub fn singlet_profile(cfg: &FluxConfig, m: i64) -> Result<RadialProfile> {
    require_landau(cfg)?;
    if m > 0 {
        return Err(Error::Inadmissible(format!("supersinglet needs m <= 0, got {m}")));
    }
    let ch = Channel::down(m);
    let exterior = ClosedForm::single(Term::new(1.0, -ch.nu(cfg.alpha), -0.5, 1.0, SpecialFactor::One));
    let interior = ClosedForm::single(Term::new(1.0, -(m as f64), -0.5 * beta(cfg)?, cfg.r_tube, SpecialFactor::One));
    RadialProfile::continuous(interior, exterior, ch, *cfg, Tail::Gaussian)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flux_ansatz_is_landau_function() {
        // α=0, (σ,m) = (−1/2, 0) at E = 1: e^{−r²/2} L_1(r²) up to a constant
        let cfg = FluxConfig::landau(0.0, 0.6).unwrap();
        let p = matched_ansatz(&cfg, Channel::down(0), 1.0).unwrap();
        let c = p.evaluate(1.3).unwrap() / ((-0.5 * 1.69f64).exp() * (1.0 - 1.69));
        for &r in &[0.1f64, 0.3, 0.59, 0.6, 0.9, 2.0, 3.5] {
            let landau = (-0.5 * r * r).exp() * (1.0 - r * r);
            assert!((p.evaluate(r).unwrap() - c * landau).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn ansatz_is_continuous() {
        let cfg = FluxConfig::landau(0.5, 0.5).unwrap();
        let p = matched_ansatz(&cfg, Channel::down(0), 1.3).unwrap();
        let v = p.exterior.eval(0.5).unwrap();
        assert!(p.continuity_gap().unwrap() <= 1e-12 * v.abs().max(1.0));
    }

    #[test]
    fn landau_levels_solve_matching() {
        for &rt in &[0.3, 1.0, 2.0] {
            let cfg = FluxConfig::landau(0.0, rt).unwrap();
            assert!(matching_residual(&cfg, Channel::down(0), 1.0).unwrap().abs() < 1e-9, "R={rt}");
        }
        let cfg = FluxConfig::landau(0.0, 0.7).unwrap();
        assert!(matching_residual(&cfg, Channel::down(0), 0.5).unwrap().abs() > 1e-3);
    }

    #[test]
    fn scan_finds_landau_levels() {
        let cfg = FluxConfig::landau(0.0, 0.7).unwrap();
        let roots: Vec<f64> = scan_roots(&cfg, Channel::up(0), 0.0, 3.5, 0.01)
            .iter()
            .map(|r| r.energy)
            .collect();
        assert_eq!(roots.len(), 3, "{roots:?}");
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-8);
        }
        let roots: Vec<f64> = scan_roots(&cfg, Channel::down(-2), 0.5, 3.5, 0.01)
            .iter()
            .map(|r| r.energy)
            .collect();
        assert_eq!(roots.len(), 3, "{roots:?}");
    }

    #[test]
    fn small_r_condition_pattern() {
        assert_eq!(small_r_condition(Channel::down(-2), 0.8), 0.0);
        assert_eq!(small_r_condition(Channel::up(3), -1.3), 0.0);
        let v = small_r_condition(Channel::up(-1), 0.8);
        assert!((v + 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn singlet_zero_flux_is_gaussian() {
        let cfg = FluxConfig::landau(0.0, 0.4).unwrap();
        let p = singlet_profile(&cfg, 0).unwrap();
        for &r in &[0.0f64, 0.2, 0.4, 1.0] {
            assert!((p.evaluate(r).unwrap() - (-0.5 * r * r).exp()).abs() < 1e-15);
        }
        assert!(singlet_profile(&cfg, 1).is_err());
    }
}
