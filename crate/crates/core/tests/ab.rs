use fluxtube::ab::*;
use fluxtube::radial::{Channel, ClosedForm, RadialProfile, SpecialFactor, Spin, Tail, Term};
use fluxtube::spectrum::{index_singular, EigenState, Family};
use proptest::prelude::*;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn scattering_state_solves_bessel_equation() {
    let p = ab_state_profile(0.7, Channel::down(0), 2.0, 1e-3).unwrap();
    let res = ab_hamiltonian_residual(&p, 0.7, 2.0, &grid(0.1, 6.0, 60)).unwrap();
    assert!(res <= 1e-6, "{res}");
    let p = ab_state_profile(0.7, Channel::up(0), 2.0, 1e-3).unwrap();
    assert_eq!(p.exterior.terms[0].factor, SpecialFactor::BesselJ { nu: 0.7, k: 2.0 });
    let res = ab_hamiltonian_residual(&p, 0.7, 2.0, &grid(0.1, 6.0, 60)).unwrap();
    assert!(res <= 1e-6, "{res}");
}

#[test]
fn wrong_bessel_order_fails_residual() {
    let good = ab_state_profile(0.7, Channel::up(0), 2.0, 1e-3).unwrap();
    let bad = RadialProfile {
        exterior: ClosedForm::single(Term::new(1.0, 0.0, 0.0, 1.0, SpecialFactor::BesselJ { nu: 0.8, k: 2.0 })),
        ..good
    };
    let res = ab_hamiltonian_residual(&bad, 0.7, 2.0, &grid(0.1, 6.0, 60)).unwrap();
    assert!(res > 1e-3, "{res}");
}

#[test]
fn zero_modes_are_harmonic() {
    for alpha in [-2.5, -1.0, -0.7, 0.8, 1.0, 2.3] {
        for mode in ab_zero_modes(alpha, 1e-3).unwrap() {
            let p = ab_zero_mode_profile(alpha, &mode, 1e-3).unwrap();
            let res = ab_hamiltonian_residual(&p, alpha, 0.0, &grid(0.1, 3.0, 30)).unwrap();
            assert!(res <= 1e-6, "alpha={alpha} {mode:?}: {res}");
            assert!(p.continuity_gap().unwrap() < 1e-12 * p.evaluate(1e-3).unwrap().abs().max(1.0));
        }
    }
}

#[test]
fn zero_modes_are_annihilated_by_ladder() {
    for alpha in [-2.5, -1.0, -0.7, 0.8, 1.0, 2.3] {
        for mode in ab_zero_modes(alpha, 1e-2).unwrap() {
            let p = ab_zero_mode_profile(alpha, &mode, 1e-2).unwrap();
            let q = match mode.channel.sigma {
                Spin::Down => p.apply_raising().unwrap(),
                Spin::Up => p.apply_lowering().unwrap(),
            };
            for r in grid(0.02, 3.0, 40) {
                let v = q.evaluate(r).unwrap();
                let scale = p.evaluate(r).unwrap().abs().max(1.0);
                assert!(v.abs() <= 1e-10 * scale, "alpha={alpha} r={r}: {v}");
            }
        }
    }
}

#[test]
fn normalizable_modes_are_the_vanishing_field_limit() {
    let r_tube = 1e-2;
    for (alpha, fam, ch) in [
        (1.5, Family::SingDown, Channel::down(0)),
        (2.5, Family::SingDown, Channel::down(-1)),
        (-1.7, Family::SingUp, Channel::up(0)),
    ] {
        let mode = ab_zero_modes(alpha, r_tube)
            .unwrap()
            .into_iter()
            .find(|m| m.channel == ch)
            .unwrap();
        assert_eq!(mode.regime, ZeroModeRegime::Normalizable);
        let p = ab_zero_mode_profile(alpha, &mode, r_tube).unwrap();
        let st = EigenState::new(fam, ch, 0, alpha, 0.0).unwrap();
        for r in grid(0.1, 2.0, 20) {
            let limit = rescaled_landau_value(&st, r_tube, 1e5, r).unwrap();
            let v = p.evaluate(r).unwrap();
            assert!((v - limit).abs() <= 1e-8 * v.abs().max(1.0), "alpha={alpha} r={r}: {v} vs {limit}");
        }
    }
}

#[test]
fn index_closed_form_on_grid() {
    for i in 0..=60 {
        let alpha = (i as f64 - 30.0) / 10.0;
        assert_eq!(index_ab(alpha), index_ab_closed_form(alpha), "alpha={alpha}");
    }
    for k in -3..=3 {
        let a = k as f64;
        assert_eq!(index_ab(a), k);
        assert_eq!(index_singular(a), k);
    }
}

#[test]
fn zero_mode_json_and_curve() {
    let j: serde_json::Value = serde_json::from_str(&zero_modes_json(-1.0, 1e-3).unwrap()).unwrap();
    assert_eq!(j["index_ab"], -1);
    assert_eq!(j["modes"][0]["regime"], "LogNormalized");
    let csv = index_curve_csv(&index_curve(&[-0.6, 0.5, 2.0]));
    assert_eq!(csv, "alpha,I_AB,I_s\n-0.6,-1,0\n0.5,0,0\n2.0,2,2\n");
}

#[test]
fn tail_kinds() {
    let p = ab_state_profile(0.3, Channel::down(-1), 1.0, 1e-3).unwrap();
    assert_eq!(p.tail, Tail::Oscillatory);
    assert!(AbScatterState::new(0.3, Channel::down(-1), 0.0).is_err());
}

proptest! {
    #[test]
    fn zero_mode_count_matches_index(alpha in -3.5f64..3.5) {
        let modes = ab_zero_modes(alpha, 1e-3).unwrap();
        let down = modes.iter().filter(|m| m.channel.sigma == Spin::Down).count() as i64;
        let up = modes.iter().filter(|m| m.channel.sigma == Spin::Up).count() as i64;
        prop_assert_eq!(down - up, index_ab(alpha));
        prop_assert_eq!(index_ab(alpha), index_ab_closed_form(alpha));
        for m in &modes {
            let nu = m.channel.nu(alpha).abs();
            let want = if nu > 1.0 { ZeroModeRegime::Normalizable }
                else if nu == 1.0 { ZeroModeRegime::LogNormalized }
                else { ZeroModeRegime::NonNormalizable };
            prop_assert_eq!(m.regime, want);
        }
    }

    #[test]
    fn scattering_residual_small(alpha in -2.0f64..2.0, m in -3i64..3, k in 0.5f64..3.0, up in any::<bool>()) {
        let ch = if up { Channel::up(m) } else { Channel::down(m) };
        let p = ab_state_profile(alpha, ch, k, 1e-3).unwrap();
        let res = ab_hamiltonian_residual(&p, alpha, k, &grid(0.2, 5.0, 25)).unwrap();
        prop_assert!(res <= 1e-6, "{}", res);
        let at_tube = p.evaluate(1e-3).unwrap().abs();
        prop_assert!(p.continuity_gap().unwrap() <= 1e-12 * at_tube.max(f64::MIN_POSITIVE));
    }
}
