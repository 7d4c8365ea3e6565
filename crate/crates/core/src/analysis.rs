//! Regularised inner products and their R̃ → 0 limits, Gram matrices, delta
//! convergence, ladder checks, the hermiticity boundary term and ODE
//! residuals.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::radial::{
    radial_hamiltonian_fd, Channel, ClosedForm, FluxConfig, RadialProfile, Side, SpecialFactor, Spin, Tail, Term,
};
use crate::spectrum::{pair_partner, state_profile, EigenState, Family};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub r_max: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadConfig {
    /// Truncation radius max(8, √(2E+40)) keeps the Gaussian tail of a
    /// level-E state far below double precision.
    pub fn for_energy(e: f64) -> Self {
        QuadConfig {
            r_max: 8f64.max((2.0 * e.max(0.0) + 40.0).sqrt()),
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig::for_energy(6.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Extrapolation {
    /// fit c₀ + Σ cᵢ R̃^{pᵢ}; a power listed twice adds R̃^p ln R̃
    PowerLaw { powers: Vec<f64> },
    /// fit c₀ + c₁/ln R̃²
    InverseLog,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSequence {
    pub r_tube_values: Vec<f64>,
    pub extrapolation: Extrapolation,
}

pub const DEFAULT_R_SEQUENCE: [f64; 4] = [3e-2, 1e-2, 3e-3, 1e-3];

impl LimitSequence {
    pub fn new(r_tube_values: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        if r_tube_values.len() < 3 {
            return Err(Error::InvalidConfig("a limit sequence needs at least 3 radii".into()));
        }
        for w in r_tube_values.windows(2) {
            if !(w[0] > 0.0 && w[1] > 0.0) || w[1] / w[0] > 1.0 / 3.0 + 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "radii must decrease by at least a factor 3: {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(LimitSequence {
            r_tube_values,
            extrapolation,
        })
    }

    pub fn default_with(extrapolation: Extrapolation) -> Self {
        LimitSequence {
            r_tube_values: DEFAULT_R_SEQUENCE.to_vec(),
            extrapolation,
        }
    }
}

/// Runs `f` inside a quadrature, remembering the first evaluation error.
struct Guard {
    err: RefCell<Option<Error>>,
}

impl Guard {
    fn new() -> Self {
        Guard { err: RefCell::new(None) }
    }
    fn wrap(&self, v: Result<f64>) -> f64 {
        match v {
            Ok(x) => x,
            Err(e) => {
                self.err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }
    fn finish(self, v: f64) -> Result<f64> {
        match self.err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

fn same_system(a: &RadialProfile, b: &RadialProfile) -> Result<()> {
    let (x, y) = (a.config, b.config);
    if x.alpha != y.alpha || x.r_tube != y.r_tube || x.field_mode != y.field_mode {
        return Err(Error::InvalidConfig("profiles belong to different systems".into()));
    }
    Ok(())
}

/// ∫ a b r dr over [lo, hi] on one side of the tube radius, with a
/// logarithmic substitution below r = 1 and u = r² above.
fn radial_integral(a: &RadialProfile, b: &RadialProfile, side: Side, lo: f64, hi: f64, quad: &QuadConfig) -> Result<(f64, f64)> {
    if hi <= lo {
        return Ok((0.0, 0.0));
    }
    let g = Guard::new();
    let prod = |r: f64| g.wrap(a.evaluate_side(r, side).and_then(|x| Ok(x * b.evaluate_side(r, side)?)));
    let abs_tol = quad.rel_tol * 1e-3;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut add = |i: crate::quadrature::Integral| {
        total += i.value;
        err += i.abs_error;
    };
    if side == Side::Interior {
        add(integrate(|r| prod(r) * r, lo, hi, quad.rel_tol, abs_tol, quad.max_subdivisions));
    } else {
        let split = hi.min(1f64.max(lo));
        if lo < split {
            add(integrate(
                |t: f64| {
                    let r = t.exp();
                    prod(r) * r * r
                },
                lo.ln(),
                split.ln(),
                quad.rel_tol,
                abs_tol,
                quad.max_subdivisions,
            ));
        }
        if split < hi {
            add(integrate(
                |u: f64| 0.5 * prod(u.sqrt()),
                split * split,
                hi * hi,
                quad.rel_tol,
                abs_tol,
                quad.max_subdivisions,
            ));
        }
    }
    Ok((g.finish(total)?, err))
}

/// ∫_{r0}^∞ of a product of two pure power sums, r dr.
fn power_tail(a: &RadialProfile, b: &RadialProfile, r0: f64) -> Result<f64> {
    let mut s = 0.0;
    for x in &a.exterior.terms {
        for y in &b.exterior.terms {
            let c = x.coeff * y.coeff / (x.rs.powf(x.p) * y.rs.powf(y.p));
            let k = x.p + y.p + 2.0;
            if k >= 0.0 {
                return Err(Error::Divergent(format!("power tail r^{} is not integrable", k - 1.0)));
            }
            s += c * -(r0.powf(k)) / k;
        }
    }
    Ok(s)
}

/// 2π ∫₀^∞ a b r dr on the same (σ, m) channel; exactly 0 across channels.
pub fn inner_product(a: &RadialProfile, b: &RadialProfile, quad: &QuadConfig) -> Result<f64> {
    Ok(inner_product_estimate(a, b, quad)?.0)
}

/// Inner product together with the quadrature's absolute error estimate.
pub fn inner_product_estimate(a: &RadialProfile, b: &RadialProfile, quad: &QuadConfig) -> Result<(f64, f64)> {
    if a.channel != b.channel {
        return Ok((0.0, 0.0));
    }
    same_system(a, b)?;
    let rt = a.config.r_tube;
    let (interior, e_in) = radial_integral(a, b, Side::Interior, 0.0, rt, quad)?;
    let (exterior, e_out) = match (a.tail, b.tail) {
        (Tail::Oscillatory, _) | (_, Tail::Oscillatory) => {
            return Err(Error::Divergent("oscillatory continuum state".into()))
        }
        (Tail::Power, _) | (_, Tail::Power) => {
            if !(a.exterior.is_pure_power() && b.exterior.is_pure_power()) {
                return Err(Error::Divergent("power tail without closed-form integral".into()));
            }
            (power_tail(a, b, rt)?, 0.0)
        }
        _ => radial_integral(a, b, Side::Exterior, rt, quad.r_max.max(rt), quad)?,
    };
    Ok((TWO_PI * (interior + exterior), TWO_PI * (e_in + e_out)))
}

/// Probability inside the disc r < eps.
pub fn delta_mass_profile(p: &RadialProfile, eps: f64, quad: &QuadConfig) -> Result<f64> {
    let rt = p.config.r_tube;
    let inner = radial_integral(p, p, Side::Interior, 0.0, rt.min(eps), quad)?.0;
    let outer = if eps > rt {
        radial_integral(p, p, Side::Exterior, rt, eps, quad)?.0
    } else {
        0.0
    };
    Ok(TWO_PI * (inner + outer))
}

pub fn delta_mass(state: &EigenState, eps: f64, r_tube: f64, quad: &QuadConfig) -> Result<f64> {
    let p = state_profile(state.alpha, state, r_tube)?;
    delta_mass_profile(&p, eps, quad)
}

/// Least-squares fit of `values` ≈ c₀ + Σ cⱼ φⱼ(R); returns c₀.
fn fit_constant(columns: &[Vec<f64>], values: &[f64]) -> Result<f64> {
    let rows = values.len();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0; rows]];
    for c in columns {
        let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale > 1e-14 && scale.is_finite() {
            basis.push(c.iter().map(|v| v / scale).collect());
        }
    }
    let k = basis.len();
    if k > rows {
        return Err(Error::ExtrapolationUnreliable("more fit terms than radii".into()));
    }
    // modified Gram–Schmidt QR, then back substitution
    let mut q = basis.clone();
    let mut rmat = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let d: f64 = (0..rows).map(|t| q[i][t] * q[j][t]).sum();
            rmat[i][j] = d;
            for t in 0..rows {
                q[j][t] -= d * q[i][t];
            }
        }
        let norm = (0..rows).map(|t| q[j][t] * q[j][t]).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return Err(Error::ExtrapolationUnreliable("degenerate fit basis".into()));
        }
        rmat[j][j] = norm;
        for t in 0..rows {
            q[j][t] /= norm;
        }
    }
    let qty: Vec<f64> = (0..k).map(|j| (0..rows).map(|t| q[j][t] * values[t]).sum()).collect();
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = ((j + 1)..k).map(|i| rmat[j][i] * coef[i]).sum();
        coef[j] = (qty[j] - s) / rmat[j][j];
    }
    Ok(coef[0])
}

/// Extrapolates a sequence of values at decreasing radii to R̃ → 0.
pub fn extrapolate(radii: &[f64], values: &[f64], how: &Extrapolation) -> Result<f64> {
    if radii.len() != values.len() || values.is_empty() {
        return Err(Error::InvalidConfig("radii and values differ in length".into()));
    }
    // a sequence that oscillates by more than noise has no clean limit
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let noise = 1e-9 * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<bool> = diffs.iter().filter(|d| d.abs() > noise).map(|d| *d > 0.0).collect();
    if signs.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::ExtrapolationUnreliable(format!("non-monotone sequence {values:?}")));
    }
    let last = *values.last().expect("non-empty");
    match how {
        Extrapolation::None => Ok(last),
        Extrapolation::InverseLog => {
            let col: Vec<f64> = radii.iter().map(|r| 1.0 / (r * r).ln()).collect();
            fit_constant(&[col], values)
        }
        Extrapolation::PowerLaw { powers } => {
            // a repeated power p stands for the resonant pair R^p, R^p ln R
            let mut cols: Vec<Vec<f64>> = Vec::new();
            let mut seen: Vec<f64> = Vec::new();
            for &p in powers.iter().filter(|p| **p > 0.0) {
                let k = seen.iter().filter(|q| (**q - p).abs() < 1e-9).count() as i32;
                seen.push(p);
                cols.push(radii.iter().map(|r| r.powf(p) * r.ln().powi(k)).collect());
            }
            fit_constant(&cols, values)
        }
    }
}

/// Exponent s of the leading small-r behaviour r^s of a state's exterior.
fn small_r_exponent(s: &EigenState) -> f64 {
    let nu = s.nu();
    match s.family {
        Family::LagA => nu,
        Family::LagB => -nu,
        _ => -nu.abs(),
    }
}

/// R̃-dependence of ⟨a|b⟩ implied by the two families' small-r laws.
pub fn extrapolation_for(a: &EigenState, b: &EigenState) -> Extrapolation {
    if a.family.is_log() || b.family.is_log() {
        return Extrapolation::InverseLog;
    }
    let powers = match (a.family.is_singular(), b.family.is_singular()) {
        (true, true) => vec![2.0 * a.nu().abs() - 2.0, 2.0],
        (true, false) => vec![a.nu().abs() - 1.0, small_r_exponent(b) + 1.0],
        (false, true) => vec![b.nu().abs() - 1.0, small_r_exponent(a) + 1.0],
        (false, false) => {
            let p = small_r_exponent(a) + small_r_exponent(b) + 2.0;
            vec![p, p + 2.0]
        }
    };
    let mut powers: Vec<f64> = powers.into_iter().filter(|p| *p > 0.0).collect();
    powers.sort_by(f64::total_cmp);
    Extrapolation::PowerLaw { powers }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub radii: Vec<f64>,
    pub samples: Vec<f64>,
}

/// Inner products of two profile families along the sequence, extrapolated.
pub fn regularized_inner_product<A, B>(a: A, b: B, seq: &LimitSequence, quad: &QuadConfig) -> Result<LimitEstimate>
where
    A: Fn(f64) -> Result<RadialProfile>,
    B: Fn(f64) -> Result<RadialProfile>,
{
    let mut samples = Vec::with_capacity(seq.r_tube_values.len());
    for &r in &seq.r_tube_values {
        samples.push(inner_product(&a(r)?, &b(r)?, quad)?);
    }
    let value = extrapolate(&seq.r_tube_values, &samples, &seq.extrapolation)?;
    Ok(LimitEstimate {
        value,
        radii: seq.r_tube_values.clone(),
        samples,
    })
}

/// ⟨a|b⟩ in the R̃ → 0 limit for two enumerated states.
pub fn state_overlap(a: &EigenState, b: &EigenState, radii: &[f64], quad: &QuadConfig) -> Result<LimitEstimate> {
    if a.channel != b.channel {
        return Ok(LimitEstimate {
            value: 0.0,
            radii: radii.to_vec(),
            samples: vec![0.0; radii.len()],
        });
    }
    let seq = LimitSequence::new(radii.to_vec(), extrapolation_for(a, b))?;
    let e = a.bare_energy().max(b.bare_energy());
    let quad = QuadConfig {
        r_max: quad.r_max.max(QuadConfig::for_energy(e).r_max),
        ..*quad
    };
    regularized_inner_product(
        |r| state_profile(a.alpha, a, r),
        |r| state_profile(b.alpha, b, r),
        &seq,
        &quad,
    )
}

/// Pairwise regularised inner products; blocks across channels are exact 0.
pub fn gram(states: &[EigenState], radii: &[f64], quad: &QuadConfig) -> Result<Vec<Vec<f64>>> {
    let n = states.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = state_overlap(&states[i], &states[j], radii, quad)?.value;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// max |Q ψ − s √E ψ_partner| on exterior grid points, s = +1 for LagA and
/// −1 for LagB (`sign_flip` inverts s, for negative controls).
pub fn pair_mismatch(state: &EigenState, r_tube: f64, grid: &[f64], sign_flip: bool) -> Result<f64> {
    if state.channel.sigma != Spin::Down {
        return Err(Error::SpinPrecondition { required: "-1/2" });
    }
    let partner = pair_partner(state)
        .ok_or_else(|| Error::Inadmissible("supersinglets have no superpartner".into()))?;
    let raised = state_profile(state.alpha, state, r_tube)?.apply_raising()?;
    let target = state_profile(state.alpha, &partner, r_tube)?;
    let mut s = if state.family == Family::LagA { 1.0 } else { -1.0 };
    if sign_flip {
        s = -s;
    }
    let root_e = state.bare_energy().sqrt();
    let mut worst = 0.0f64;
    for &r in grid.iter().filter(|&&r| r >= r_tube) {
        let lhs = raised.evaluate_side(r, Side::Exterior)?;
        let rhs = s * root_e * target.evaluate_side(r, Side::Exterior)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

pub fn susy_pair_check(state: &EigenState, r_tube: f64, grid: &[f64]) -> Result<f64> {
    pair_mismatch(state, r_tube, grid, false)
}

/// ψ_b(R̃)·R̃·[ψ_a′(R̃⁻) − ψ_a′(R̃⁺)], the boundary term that must vanish
/// for H to be hermitian on the pair.
pub fn hermiticity_bracket(a: &RadialProfile, b: &RadialProfile) -> Result<f64> {
    let rt = a.config.r_tube;
    let jump = a.derivative_side(rt, Side::Interior)? - a.derivative_side(rt, Side::Exterior)?;
    Ok(b.evaluate_side(rt, Side::Exterior)? * rt * jump)
}

/// Boundary term along the sequence and its R̃ → 0 magnitude: if the
/// values fall off as a power of R̃ the limit is Richardson-extrapolated,
/// otherwise (a plateau) the last magnitude is returned.
pub fn hermiticity_limit<A, B>(a: A, b: B, radii: &[f64]) -> Result<(f64, Vec<f64>)>
where
    A: Fn(f64) -> Result<RadialProfile>,
    B: Fn(f64) -> Result<RadialProfile>,
{
    let mut vals = Vec::with_capacity(radii.len());
    for &r in radii {
        vals.push(hermiticity_bracket(&a(r)?, &b(r)?)?);
    }
    let k = vals.len();
    if k < 2 {
        return Ok((vals.last().copied().unwrap_or(0.0).abs(), vals));
    }
    let (v0, v1) = (vals[k - 2], vals[k - 1]);
    let (r0, r1) = (radii[k - 2], radii[k - 1]);
    if v1 == 0.0 {
        return Ok((0.0, vals));
    }
    let slope = if v0 == 0.0 { 0.0 } else { (v0.abs() / v1.abs()).ln() / (r0 / r1).ln() };
    let limit = if slope > 0.05 {
        let q = (r1 / r0).powf(slope);
        ((v1 - v0 * q) / (1.0 - q)).abs().min(v1.abs())
    } else {
        v1.abs()
    };
    Ok((limit, vals))
}

pub fn hermiticity_check(a: &EigenState, b: &EigenState, radii: &[f64]) -> Result<f64> {
    if a.channel != b.channel {
        return Err(Error::InvalidConfig("hermiticity pair must share a channel".into()));
    }
    Ok(hermiticity_limit(|r| state_profile(a.alpha, a, r), |r| state_profile(b.alpha, b, r), radii)?.0)
}

/// max over the grid of |Hψ − Eψ| / max(1, max|ψ|), H by five-point
/// differences with the potential of the region each point lies in.
pub fn ode_residual(profile: &RadialProfile, e: f64, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for &r in grid {
        let side = profile.side_of(r);
        let h = 3e-3 * r.min(1.0);
        let mut f = [0.0; 5];
        for (i, v) in f.iter_mut().enumerate() {
            *v = profile.evaluate_side(r + (i as f64 - 2.0) * h, side)?;
        }
        let hpsi = radial_hamiltonian_fd(&profile.config, profile.channel, r, h, f, side == Side::Interior);
        worst = worst.max((hpsi - e * f[2]).abs());
        scale = scale.max(f[2].abs());
    }
    Ok(worst / scale)
}

/// Change of the norm when a bump of height and half-width R̃ is added at
/// the tube, for each radius of the sequence.
pub fn null_vector_shift(state: &EigenState, radii: &[f64], quad: &QuadConfig) -> Result<Vec<f64>> {
    radii
        .iter()
        .map(|&r| {
            let p = state_profile(state.alpha, state, r)?;
            let bumped = p.with_null_bump(r, r);
            Ok((inner_product(&bumped, &bumped, quad)? - inner_product(&p, &p, quad)?).abs())
        })
        .collect()
}

/// Coefficients of `profile` along an enumerated basis at the profile's own
/// tube radius — the operational form of the basic-form projection.
pub fn basic_form_coefficients(profile: &RadialProfile, basis: &[EigenState], quad: &QuadConfig) -> Result<Vec<f64>> {
    let rt = profile.config.r_tube;
    basis
        .iter()
        .map(|s| inner_product(&state_profile(s.alpha, s, rt)?, profile, quad))
        .collect()
}

/// Unit-norm smooth test function r^{|m|} e^{−r²/2} in channel `ch`, the
/// same function on both sides of the tube.
pub fn smooth_test_profile(ch: Channel, config: FluxConfig) -> RadialProfile {
    let am = ch.m.unsigned_abs();
    let fact: f64 = (1..=am).map(|k| k as f64).product();
    let norm = 1.0 / (std::f64::consts::PI * fact).sqrt();
    let f = ClosedForm::single(Term::new(norm, am as f64, -0.5, 1.0, SpecialFactor::One));
    RadialProfile {
        interior: f.clone(),
        exterior: f,
        channel: ch,
        config,
        tail: Tail::Gaussian,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    /// Passes when `measured ≥ tolerance` (lower bounds, e.g. a mass fraction).
    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured,
            tolerance,
            passed: measured >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let all_passed = checks.iter().all(|c| c.passed);
        VerificationReport { checks, all_passed }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
