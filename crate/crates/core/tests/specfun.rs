use fluxtube::quadrature::integrate;
use fluxtube::specfun::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn u_by_quadrature(a: f64, b: f64, x: f64) -> f64 {
    // split at t=1 and substitute t = s^{1/a} on the head to tame t^{a-1}
    let g = |t: f64| (-x * t).exp() * (1.0 + t).powf(b - a - 1.0);
    let head = integrate(|s: f64| g(s.powf(1.0 / a)) / a, 0.0, 1.0, 1e-13, 0.0, 2000);
    let tail = integrate(|t: f64| g(t) * t.powf(a - 1.0), 1.0, 200.0 / x, 1e-13, 0.0, 2000);
    (head.value + tail.value) / gamma_fn(a).unwrap().value
}

#[test]
fn tricomi_matches_integral_representation() {
    let oracle = u_by_quadrature(1.3, 0.4, 2.0);
    let v = tricomi_u(1.3, 0.4, 2.0).unwrap().value;
    assert!(rel(v, oracle) < 1e-9, "{v} vs {oracle}");
}

#[test]
fn tricomi_integer_b_within_documented_bound() {
    for &(a, b, x) in &[(0.7, 2.0, 1.5), (1.6, 1.0, 0.3), (0.4, 3.0, 2.5), (2.2, 1.0, 9.0)] {
        let oracle = u_by_quadrature(a, b, x);
        let v = tricomi_u(a, b, x).unwrap().value;
        assert!(rel(v, oracle) < 1e-7, "U({a},{b},{x}) = {v} vs {oracle}");
    }
}

#[test]
fn laguerre_matches_hypergeometric_form() {
    let (n, a, x) = (4u32, 1.5, 2.2);
    // binomial(n+a, n) = Γ(n+a+1)/(n! Γ(a+1))
    let binom = gamma_fn(n as f64 + a + 1.0).unwrap().value / (24.0 * gamma_fn(a + 1.0).unwrap().value);
    let oracle = binom * kummer_m(-(n as f64), a + 1.0, x).unwrap().value;
    let v = laguerre_assoc(n, a, x).value;
    assert!(rel(v, oracle) < 1e-13, "{v} vs {oracle}");
}

#[test]
fn bessel_matches_poisson_integral() {
    // J_ν(x) = (x/2)^ν / (√π Γ(ν+½)) ∫₀^π cos(x cos θ) sin^{2ν} θ dθ
    for &(nu, x) in &[(1.5, 3.0), (0.3, 12.0), (2.7, 40.0), (0.0, 95.0)] {
        let int = integrate(
            |t: f64| (x * t.cos()).cos() * t.sin().powf(2.0 * nu),
            0.0,
            PI,
            1e-14,
            0.0,
            4000,
        );
        let oracle = (0.5 * x as f64).powf(nu) / (PI.sqrt() * gamma_fn(nu + 0.5).unwrap().value) * int.value;
        let v = bessel_j(nu, x).unwrap().value;
        assert!((v - oracle).abs() < 1e-10, "J_{nu}({x}) = {v} vs {oracle}");
    }
}

#[test]
fn upper_gamma_negative_order_by_quadrature() {
    let (s, x) = (-0.5f64, 1.2f64);
    let oracle = integrate(|t: f64| t.powf(s - 1.0) * (-t).exp(), x, 80.0, 1e-14, 0.0, 2000).value;
    let v = gamma_upper(s, x).unwrap().value;
    assert!(rel(v, oracle) < 1e-10, "{v} vs {oracle}");
}

#[test]
fn kummer_derivative_by_finite_difference() {
    let (a, b, x, h) = (-1.2, 2.1, 0.8, 1e-6);
    let fd = (kummer_m(a, b, x + h).unwrap().value - kummer_m(a, b, x - h).unwrap().value) / (2.0 * h);
    let d = kummer_m_deriv(a, b, x).unwrap().value;
    assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
}

fn off_integer(v: f64) -> bool {
    (v - v.round()).abs() > 0.02
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kummer_transformation(a in -5.0f64..5.0, b in -5.0f64..5.0, x in 0.01f64..20.0) {
        prop_assume!(off_integer(b));
        let lhs = kummer_m(a, b, x).unwrap().value;
        let rhs = x.exp() * kummer_m(b - a, b, -x).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-6 * x.exp()), "{lhs} vs {rhs}");
    }

    #[test]
    fn wronskian(a in -4.0f64..4.0, b in 0.05f64..5.0, x in 0.05f64..20.0) {
        prop_assume!(off_integer(b) && off_integer(a - b + 1.0));
        let m = kummer_m(a, b, x).unwrap().value;
        let dm = kummer_m_deriv(a, b, x).unwrap().value;
        let u = tricomi_u(a, b, x).unwrap().value;
        let du = tricomi_u_deriv(a, b, x).unwrap().value;
        let w = m * du - dm * u;
        let expect = -gamma_fn(b).unwrap().value * rgamma(a) * x.powf(-b) * x.exp();
        let scale = (m * du).abs().max((dm * u).abs());
        prop_assert!((w - expect).abs() <= 1e-8 * expect.abs().max(1e-8 * scale),
            "W = {w}, expected {expect}");
    }

    #[test]
    fn laguerre_recurrence(n in 1u32..30, a in -0.9f64..6.0, x in 0.0f64..30.0) {
        let lp = laguerre_assoc(n + 1, a, x).value;
        let l = laguerre_assoc(n, a, x).value;
        let lm = laguerre_assoc(n - 1, a, x).value;
        let nf = n as f64;
        let resid = (nf + 1.0) * lp - (2.0 * nf + 1.0 + a - x) * l + (nf + a) * lm;
        let scale = ((nf + 1.0) * lp).abs() + ((2.0 * nf + 1.0 + a - x) * l).abs() + ((nf + a) * lm).abs();
        prop_assert!(resid.abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn incomplete_gamma_sum(s in 0.01f64..10.0, x in 0.0f64..40.0) {
        let up = gamma_upper(s, x).unwrap().value;
        let lo = gamma_lower(s, x).unwrap().value;
        let g = gamma_fn(s).unwrap().value;
        prop_assert!((up + lo - g).abs() <= 1e-12 * g, "{up} + {lo} vs {g}");
    }

    #[test]
    fn derivatives_match_finite_differences(a in -3.0f64..3.0, b in 0.3f64..4.0, x in 0.2f64..15.0) {
        prop_assume!(off_integer(b));
        let h = 1e-5 * x.max(1.0);
        let fd_m = (kummer_m(a, b, x + h).unwrap().value - kummer_m(a, b, x - h).unwrap().value) / (2.0 * h);
        let dm = kummer_m_deriv(a, b, x).unwrap().value;
        prop_assert!((dm - fd_m).abs() <= 1e-6 * dm.abs().max(kummer_m(a, b, x).unwrap().value.abs()).max(1.0));
        let fd_u = (tricomi_u(a, b, x + h).unwrap().value - tricomi_u(a, b, x - h).unwrap().value) / (2.0 * h);
        let du = tricomi_u_deriv(a, b, x).unwrap().value;
        let u = tricomi_u(a, b, x).unwrap().value;
        prop_assert!((du - fd_u).abs() <= 1e-6 * du.abs().max(u.abs()).max(1e-12), "U' {du} vs {fd_u}");
    }

    #[test]
    fn negative_order_bessel_recurrence(nu in 0.01f64..0.99, x in 0.1f64..60.0) {
        let jm = bessel_j_signed(-nu, x).unwrap().value;
        let j0 = bessel_j(1.0 - nu, x).unwrap().value;
        let j1 = bessel_j(2.0 - nu, x).unwrap().value;
        // J_{μ-1} + J_{μ+1} = (2μ/x) J_μ with μ = 1-ν
        let resid = jm + j1 - 2.0 * (1.0 - nu) / x * j0;
        prop_assert!(resid.abs() < 1e-10);
    }
}
