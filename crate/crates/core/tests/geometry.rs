use approx::assert_relative_eq;
use cone_index::SchwarzschildSpace;
use proptest::prelude::*;

fn space(n: usize, m: f64) -> SchwarzschildSpace {
    SchwarzschildSpace::new(n, m).unwrap()
}

#[test]
fn horizon_radii() {
    let s = space(4, 2.0);
    assert_relative_eq!(s.horizon_radius, 1.0, epsilon = 1e-15);
    assert_relative_eq!(s.areal_horizon_radius, 2.0, epsilon = 1e-15);
    assert_eq!(s.cone_dimension, 3);
    let s = space(6, 1.0);
    assert_relative_eq!(s.horizon_radius, 0.5f64.powf(0.25), epsilon = 1e-15);
}

#[test]
fn rejects_bad_inputs() {
    assert!(SchwarzschildSpace::new(2, 1.0).is_err());
    assert!(SchwarzschildSpace::new(4, 0.0).is_err());
    assert!(SchwarzschildSpace::new(4, f64::NAN).is_err());
    let s = space(4, 2.0);
    assert!(s.isotropic_factor(0.5).is_err());
    assert!(s.cone_factor(0.999).is_err());
    assert!(s.umbilicity(0.0).is_err());
    assert!(s.radial_potential(-1.0).is_err());
}

#[test]
fn factor_values() {
    let s4 = space(4, 2.0);
    assert_relative_eq!(s4.isotropic_factor(1.0).unwrap(), 2.0, epsilon = 1e-14);
    assert_relative_eq!(s4.isotropic_factor(1e8).unwrap(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(s4.cone_factor(1.0).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(space(5, 2.0).isotropic_factor(1.0).unwrap(), 2f64.powf(2.0 / 3.0), epsilon = 1e-14);
    assert_relative_eq!(space(6, 2.0).cone_factor(2.0).unwrap(), (1.0f64 + 1.0 / 16.0).powf(0.75), epsilon = 1e-14);
    for n in 4..=9 {
        let s = space(n, 1.7);
        let expected = 2f64.powf((n as f64 - 3.0) / (n as f64 - 2.0));
        assert_relative_eq!(s.cone_factor(s.horizon_radius).unwrap(), expected, epsilon = 1e-13);
    }
}

#[test]
fn umbilicity_and_potential_values() {
    let s = space(4, 2.0);
    assert_eq!(s.umbilicity(1.0).unwrap(), 0.0);
    assert_relative_eq!(s.umbilicity(2.0).unwrap(), 6.0 / 25.0, epsilon = 1e-15);
    let s5 = space(5, 2.0);
    let r0 = s5.horizon_radius;
    let big = 2.0 * r0;
    let (a, b) = (big.powi(3), r0.powi(3));
    assert_relative_eq!(s5.umbilicity(big).unwrap(), (a - b) * big / (a + b).powf(5.0 / 3.0), epsilon = 1e-14);

    assert_relative_eq!(s.radial_potential(1.0).unwrap(), 0.75, epsilon = 1e-15);
    assert_relative_eq!(s.radial_potential(3.0).unwrap(), 0.03, epsilon = 1e-15);
    assert!(s.radial_potential(1e6).unwrap() < 1e-20);
}

#[test]
fn areal_profile_endpoints() {
    let s = space(4, 2.0);
    let p = s.areal_profile(s.default_profile_extent(), 1e-12).unwrap();
    assert_relative_eq!(p.h(0.0).unwrap(), 2.0, epsilon = 1e-14);
    assert_eq!(p.hprime(0.0).unwrap(), 0.0);
    // areal radius r·φ(r) of the horizon
    let r0 = s.horizon_radius;
    assert_relative_eq!(r0 * s.isotropic_factor(r0).unwrap(), s.areal_horizon_radius, epsilon = 1e-14);
    assert!(p.max_midpoint_residual() <= 1e-11);

    // h(r) − r converges and h' increases to 1
    let top = p.r_max();
    let samples: Vec<f64> = (1..=6).map(|k| top * 0.5f64.powi(6 - k)).collect();
    let gaps: Vec<f64> = samples.iter().map(|&r| p.h(r).unwrap() - r).collect();
    let slopes: Vec<f64> = samples.iter().map(|&r| p.hprime(r).unwrap()).collect();
    for w in slopes.windows(2) {
        assert!(w[1] > w[0] && w[1] < 1.0);
    }
    let steps: Vec<f64> = gaps.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in steps.windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(p.h(-1.0).is_err());
    assert!(p.h(top * 1.01).is_err());
}

#[test]
fn areal_profile_rejects_bad_arguments() {
    let s = space(4, 2.0);
    assert!(s.areal_profile(0.0, 1e-10).is_err());
    assert!(s.areal_profile(10.0, 0.0).is_err());
}

#[test]
fn potential_scaled_bound_on_grid() {
    for n in 4..=10 {
        let s = space(n, 0.8);
        let cap = 2.0 * s.mass * (n as f64 - 1.0);
        for i in 0..400 {
            let r = s.horizon_radius * (1.0 + 0.05 * i as f64).powi(2);
            let v = s.radial_potential(r).unwrap();
            assert!(v > 0.0);
            assert!(v * r.powi(n as i32) < cap);
        }
    }
}

fn n_and_m() -> impl Strategy<Value = (usize, f64)> {
    (4usize..=12, 0.05f64..20.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factors_agree_and_s0_identity((n, m) in n_and_m(), stretch in 0.0f64..8.0) {
        let s = space(n, m);
        let r = s.horizon_radius * stretch.exp();
        let phi = s.isotropic_factor(r).unwrap();
        let big_f = s.cone_factor(r).unwrap();
        let big_n = n as f64 - 1.0;
        prop_assert!((phi - big_f.powf(2.0 / (big_n - 2.0))).abs() <= 1e-12 * phi);
        let s0 = s.areal_horizon_radius;
        prop_assert!((s0.powi(n as i32 - 2) - 2.0 * m).abs() <= 1e-12 * 2.0 * m);
    }

    #[test]
    fn umbilicity_positive_off_horizon((n, m) in n_and_m(), stretch in 1e-6f64..10.0) {
        let s = space(n, m);
        let r = s.horizon_radius * stretch.exp();
        prop_assert!(s.umbilicity(r).unwrap() > 0.0);
        prop_assert!(s.umbilicity(s.horizon_radius * 1e9).unwrap() < 1e-6 / s.horizon_radius);
    }

    #[test]
    fn cone_factor_derivative_matches_differences((n, m) in n_and_m(), stretch in 0.05f64..5.0) {
        let s = space(n, m);
        let r = s.horizon_radius * stretch.exp();
        let exact = s.cone_factor_derivative(r).unwrap();
        let err = |h: f64| {
            let fd = (s.cone_factor(r + h).unwrap() - s.cone_factor(r - h).unwrap()) / (2.0 * h);
            (fd - exact).abs()
        };
        let h = 1e-2 * r * (1.0 - (-stretch).exp()).min(1.0);
        let (e1, e2) = (err(h), err(h / 2.0));
        // second order: halving the step quarters the error, up to rounding
        let rounding = 50.0 * f64::EPSILON * s.cone_factor(r).unwrap() / h;
        prop_assert!(e2 <= 0.3 * e1 + rounding, "e1 {e1} e2 {e2}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn profile_midpoint_residual((n, m) in n_and_m()) {
        let s = space(n, m);
        let tol = 1e-10;
        let p = s.areal_profile(s.default_profile_extent(), tol).unwrap();
        prop_assert!(p.max_midpoint_residual() <= 10.0 * tol);
        prop_assert!((p.h(0.0).unwrap() - s.areal_horizon_radius).abs() <= 1e-12 * s.areal_horizon_radius);
        let r = 0.37 * p.r_max();
        let div = p.conformal_field_divergence(r).unwrap();
        prop_assert!((div - (n as f64 - 1.0) * p.hprime(r).unwrap()).abs() <= 1e-12 * div.abs().max(1.0));
    }
}
