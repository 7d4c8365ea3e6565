//! Verification suites run by the command-line `verify` command. Each suite
//! reduces one family of invariants to a handful of measured numbers with
//! fixed tolerances.

use crate::ab::{
    ab_hamiltonian_residual, ab_state_profile, ab_zero_mode_profile, ab_zero_modes, index_ab, index_ab_closed_form,
};
use crate::analysis::{
    delta_mass, gram, inner_product, ode_residual, smooth_test_profile, susy_pair_check, CheckResult, QuadConfig,
    VerificationReport, DEFAULT_R_SEQUENCE,
};
use crate::error::{Error, Result};
use crate::finite_tube::{scan_roots, singlet_profile, small_r_condition, DEFAULT_SCAN_STEP};
use crate::radial::{Channel, FluxConfig, Side, Spin};
use crate::spectrum::{
    admissible_families, block_shift, enumerate_spectrum, index_singular, index_singular_closed_form, pair_partner,
    state_profile, EigenState, Family,
};

pub const SUITES: [&str; 10] = [
    "landau", "susy-finite", "small-r", "structure", "indices", "orthonormality", "delta", "ladder", "ode", "kappa",
];

/// Radii for the delta-convergence overlap; the overlap falls only as
/// R̃^{|m+α|−1}, so the default sequence is continued to much smaller R̃.
pub const DELTA_R_SEQUENCE: [f64; 9] = [3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn channels(m_abs: i64) -> impl Iterator<Item = Channel> {
    [Spin::Down, Spin::Up]
        .into_iter()
        .flat_map(move |s| (-m_abs..=m_abs).map(move |m| Channel::new(s, m)))
}

/// At α = 0 the roots are the Landau levels n + mθ(m) + σ + ½.
pub fn landau_limit() -> Result<Vec<CheckResult>> {
    let e_max = 4.0;
    let mut worst = 0.0f64;
    let mut count_mismatch = 0usize;
    for r_tube in [0.4, 0.7] {
        let cfg = FluxConfig::landau(0.0, r_tube)?;
        for ch in channels(3) {
            let base = ch.interior_offset();
            let levels: Vec<f64> = (0..10).map(|n| base + n as f64).filter(|e| *e <= e_max - 0.05).collect();
            let roots: Vec<f64> = scan_roots(&cfg, ch, -0.25, e_max, DEFAULT_SCAN_STEP)
                .into_iter()
                .map(|r| r.energy)
                .filter(|e| *e <= e_max - 0.05)
                .collect();
            if roots.len() != levels.len() {
                count_mismatch += 1;
            }
            for (r, l) in roots.iter().zip(&levels) {
                worst = worst.max((r - l).abs());
            }
        }
    }
    Ok(vec![
        CheckResult::at_most("landau: max |E_root - E_level|", worst, 1e-8),
        CheckResult::at_most("landau: channels with wrong root count", count_mismatch as f64, 0.0),
    ])
}

/// Every E > 0 root in (−½, m) has a root in (+½, m−1) at the same energy.
pub fn susy_finite() -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for alpha in [0.3, 0.5, 1.2] {
        for r_tube in [0.4, 0.8] {
            let cfg = FluxConfig::landau(alpha, r_tube)?;
            for m in -3..=3 {
                let up: Vec<f64> = scan_roots(&cfg, Channel::up(m - 1), -0.25, 4.5, DEFAULT_SCAN_STEP)
                    .iter()
                    .map(|r| r.energy)
                    .collect();
                for r in scan_roots(&cfg, Channel::down(m), -0.25, 4.0, DEFAULT_SCAN_STEP) {
                    if r.energy > 1e-9 {
                        compared += 1;
                        let d = up.iter().map(|u| (u - r.energy).abs()).fold(f64::INFINITY, f64::min);
                        worst = worst.max(d);
                    }
                }
            }
        }
    }
    Ok(vec![
        CheckResult::at_least("susy-finite: roots compared", compared as f64, 1.0),
        CheckResult::at_most("susy-finite: max partner distance", worst, 1e-6),
    ])
}

pub fn small_r() -> Result<Vec<CheckResult>> {
    let mut nonzero_in_zero_branch = 0.0f64;
    let mut smallest_elsewhere = f64::INFINITY;
    for alpha in [-1.7, 0.8, 2.3] {
        for ch in channels(4) {
            let v = small_r_condition(ch, alpha);
            let zero_branch = matches!((ch.sigma, ch.m), (Spin::Down, m) if m <= 0) || matches!((ch.sigma, ch.m), (Spin::Up, m) if m >= 0);
            if zero_branch {
                nonzero_in_zero_branch = nonzero_in_zero_branch.max(v.abs());
            } else {
                smallest_elsewhere = smallest_elsewhere.min(v.abs());
            }
        }
    }
    Ok(vec![
        CheckResult::at_most("small-r: |value| where it must vanish", nonzero_in_zero_branch, 0.0),
        CheckResult::at_least("small-r: min |value| elsewhere", smallest_elsewhere, 1e-3),
    ])
}

/// Panel structure: singular counts and spin, vacancies, block shift and
/// exact superpartner closure.
pub fn structure() -> Result<Vec<CheckResult>> {
    let mut failures = 0usize;
    for alpha in [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 2.0, -2.0, 2.5, -2.5] {
        let t = enumerate_spectrum(alpha, 0.0, 5.0, -6, 6)?;
        let want_down = if alpha >= 1.0 { alpha.floor() as usize } else { 0 };
        let want_up = if alpha <= -1.0 { (-alpha).floor() as usize } else { 0 };
        if t.singular_count(Spin::Down) != want_down || t.singular_count(Spin::Up) != want_up {
            failures += 1;
        }
        let integer = alpha != 0.0 && alpha.fract() == 0.0;
        if t.vacancies.len() != usize::from(integer) {
            failures += 1;
        }
        let f = block_shift(alpha);
        for s in t.states.iter().filter(|s| s.family == Family::LagA) {
            let d = (s.bare_energy().rem_euclid(1.0) - f).abs();
            if d > 1e-12 && (1.0 - d) > 1e-12 {
                failures += 1;
            }
        }
        for s in t.states.iter().filter(|s| s.channel.sigma == Spin::Down && s.channel.m > -6) {
            let partners = t
                .states
                .iter()
                .filter(|p| p.channel == Channel::up(s.channel.m - 1) && p.bare() == s.bare() && !p.bare().is_zero())
                .count();
            let want = usize::from(!s.bare().is_zero());
            if partners != want {
                failures += 1;
            }
        }
    }
    Ok(vec![CheckResult::at_most("structure: failed panel checks", failures as f64, 0.0)])
}

pub fn indices() -> Result<Vec<CheckResult>> {
    let mut failures = 0usize;
    for i in 0..=120 {
        let alpha = (i as f64 - 60.0) / 20.0;
        if index_singular(alpha) != index_singular_closed_form(alpha) || index_ab(alpha) != index_ab_closed_form(alpha) {
            failures += 1;
        }
        if alpha.fract() == 0.0 && (index_singular(alpha) != alpha as i64 || index_ab(alpha) != alpha as i64) {
            failures += 1;
        }
    }
    Ok(vec![CheckResult::at_most("indices: grid mismatches", failures as f64, 0.0)])
}

/// The lowest `count` states with |m| ≤ 2 by bare energy.
pub fn lowest_states(alpha: f64, count: usize) -> Result<Vec<EigenState>> {
    let mut s = enumerate_spectrum(alpha, 0.0, 6.0, -2, 2)?.states;
    s.sort_by(|a, b| a.bare_energy().total_cmp(&b.bare_energy()));
    s.truncate(count);
    Ok(s)
}

pub fn orthonormality() -> Result<Vec<CheckResult>> {
    let quad = QuadConfig::default();
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    let mut diag_log = 0.0f64;
    for (alpha, count) in [(0.5, 12), (1.5, 10)] {
        let states = lowest_states(alpha, count)?;
        let g = gram(&states, &DEFAULT_R_SEQUENCE, &quad)?;
        for i in 0..states.len() {
            let d = (g[i][i] - 1.0).abs();
            if states[i].family.is_log() {
                diag_log = diag_log.max(d);
            } else {
                diag = diag.max(d);
            }
            for j in 0..states.len() {
                if i != j {
                    off = off.max(g[i][j].abs());
                }
            }
        }
    }
    Ok(vec![
        CheckResult::at_most("orthonormality: max off-diagonal", off, 1e-6),
        CheckResult::at_most("orthonormality: max diagonal deviation", diag, 1e-4),
        CheckResult::at_most("orthonormality: max log-family diagonal deviation", diag_log, 5e-2),
    ])
}

pub fn singular_states(alpha: f64) -> Result<Vec<EigenState>> {
    let reach = alpha.abs().ceil() as i64 + 1;
    Ok(enumerate_spectrum(alpha, 0.0, 1.0, -reach, reach)?
        .states
        .into_iter()
        .filter(|s| s.family.is_singular())
        .collect())
}

pub fn delta() -> Result<Vec<CheckResult>> {
    let quad = QuadConfig::default();
    let mut min_mass = f64::INFINITY;
    let mut worst_overlap = 0.0f64;
    let mut non_monotone = 0usize;
    for alpha in [1.5, 2.5, -1.5] {
        for s in singular_states(alpha)? {
            min_mass = min_mass.min(delta_mass(&s, 0.1, 1e-4, &quad)?);
            let mut prev = f64::INFINITY;
            for &r in &DELTA_R_SEQUENCE {
                let p = state_profile(alpha, &s, r)?;
                let g = smooth_test_profile(s.channel, p.config);
                let v = inner_product(&g, &p, &quad)?.abs();
                if v >= prev {
                    non_monotone += 1;
                }
                prev = v;
            }
            worst_overlap = worst_overlap.max(prev);
        }
    }
    Ok(vec![
        CheckResult::at_least("delta: min mass within r < 0.1 at R = 1e-4", min_mass, 0.999),
        CheckResult::at_most("delta: test-function overlap at smallest R", worst_overlap, 1e-3),
        CheckResult::at_most("delta: non-monotone overlap steps", non_monotone as f64, 0.0),
    ])
}

/// Up to `count` down-spin states with E > 0 whose partner channel lies in
/// |m| ≤ 3.
pub fn ladder_samples(alpha: f64, count: usize) -> Result<Vec<EigenState>> {
    Ok(enumerate_spectrum(alpha, 0.0, 4.0, -2, 3)?
        .states
        .into_iter()
        .filter(|s| s.channel.sigma == Spin::Down && !s.bare().is_zero() && pair_partner(s).is_some())
        .take(count)
        .collect())
}

pub fn ladder() -> Result<Vec<CheckResult>> {
    let g = grid(0.1, 5.0, 50);
    let r_tube = 1e-3;
    let mut pair = 0.0f64;
    let mut sampled = 0usize;
    let mut annihilation = 0.0f64;
    for alpha in [0.0, 0.5, 1.5, -2.5] {
        for s in ladder_samples(alpha, 5)? {
            pair = pair.max(susy_pair_check(&s, r_tube, &g)?);
            sampled += 1;
        }
        let t = enumerate_spectrum(alpha, 0.0, 0.5, -4, 4)?;
        for s in t.states.iter().filter(|s| s.channel.sigma == Spin::Down && s.bare().is_zero()) {
            let q = state_profile(alpha, s, r_tube)?.apply_raising()?;
            for &r in &g {
                annihilation = annihilation.max(q.evaluate_side(r, Side::Exterior)?.abs());
            }
        }
    }
    Ok(vec![
        CheckResult::at_least("ladder: sampled pairs", sampled as f64, 20.0),
        CheckResult::at_most("ladder: max pair mismatch", pair, 1e-8),
        CheckResult::at_most("ladder: max raising of E=0 states", annihilation, 1e-10),
    ])
}

pub fn ode() -> Result<Vec<CheckResult>> {
    let mut landau = 0.0f64;
    let mut sampled = 0usize;
    // deep inside a small tube the 1/r² terms amplify finite-difference
    // rounding, so the profiles are checked at a moderate radius
    let r_tube = 0.5;
    let inner = grid(0.05, 0.45, 8);
    let outer = grid(0.6, 4.0, 30);
    let both: Vec<f64> = inner.iter().chain(&outer).copied().collect();
    for alpha in [0.5, 1.5, -2.5] {
        for ch in channels(2) {
            for adm in admissible_families(alpha, ch).into_iter().filter(|a| !a.family.is_singular()) {
                if sampled >= 10 {
                    break;
                }
                let s = EigenState::new(adm.family, ch, 1, alpha, 0.0)?;
                let p = state_profile(alpha, &s, r_tube)?;
                landau = landau.max(ode_residual(&p, s.bare_energy(), &both)?);
                sampled += 1;
            }
        }
    }
    let mut singlets = 0.0f64;
    for alpha in [0.7, 1.5, -1.0] {
        let cfg = FluxConfig::landau(alpha, 0.5)?;
        let g: Vec<f64> = grid(0.02, 0.45, 10).into_iter().chain(grid(0.6, 4.0, 20)).collect();
        for m in -4..=0 {
            singlets = singlets.max(ode_residual(&singlet_profile(&cfg, m)?, 0.0, &g)?);
        }
    }
    let mut ab = 0.0f64;
    let ab_grid = grid(0.2, 6.0, 40);
    for alpha in [0.7, 1.5, -1.0] {
        for (ch, k) in [(Channel::down(0), 1.0), (Channel::up(-1), 2.0)] {
            let p = ab_state_profile(alpha, ch, k, 1e-3)?;
            ab = ab.max(ab_hamiltonian_residual(&p, alpha, k, &ab_grid)?);
        }
        for mode in ab_zero_modes(alpha, 1e-3)? {
            let p = ab_zero_mode_profile(alpha, &mode, 1e-3)?;
            ab = ab.max(ab_hamiltonian_residual(&p, alpha, 0.0, &ab_grid)?);
        }
    }
    Ok(vec![
        CheckResult::at_least("ode: sampled Laguerre-type profiles", sampled as f64, 10.0),
        CheckResult::at_most("ode: Laguerre-type residual", landau, 1e-6),
        CheckResult::at_most("ode: supersinglet residual", singlets, 1e-6),
        CheckResult::at_most("ode: flux-tube residual", ab, 1e-6),
    ])
}

pub fn kappa() -> Result<Vec<CheckResult>> {
    let k = 0.0023;
    let a = enumerate_spectrum(1.0, 0.0, 5.0, -6, 6)?;
    let b = enumerate_spectrum(1.0, k, 5.0, -6, 6)?;
    let mut mismatches = usize::from(a.states.len() != b.states.len());
    for (x, y) in a.states.iter().zip(&b.states) {
        if x.family != y.family || x.channel != y.channel || x.n != y.n || y.energy != x.energy + k * x.channel.sigma.value() {
            mismatches += 1;
        }
    }
    let min = b.states.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
    let attained_by_down_singlets = b
        .states
        .iter()
        .filter(|s| s.energy == min)
        .all(|s| s.channel.sigma == Spin::Down && s.bare().is_zero());
    Ok(vec![
        CheckResult::at_most("kappa: states not shifted by kappa*sigma", mismatches as f64, 0.0),
        CheckResult::at_most("kappa: |min E + kappa/2|", (min + k / 2.0).abs(), 0.0),
        CheckResult::at_least(
            "kappa: minimum attained only by down-spin singlets",
            f64::from(u8::from(attained_by_down_singlets)),
            1.0,
        ),
    ])
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Result<VerificationReport> {
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let mut checks = Vec::new();
    for n in names {
        checks.extend(match n {
            "landau" => landau_limit()?,
            "susy-finite" => susy_finite()?,
            "small-r" => small_r()?,
            "structure" => structure()?,
            "indices" => indices()?,
            "orthonormality" => orthonormality()?,
            "delta" => delta()?,
            "ladder" => ladder()?,
            "ode" => ode()?,
            "kappa" => kappa()?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown suite '{other}', expected one of all, {}",
                    SUITES.join(", ")
                )))
            }
        });
    }
    Ok(VerificationReport::new(checks))
}
