use ctrw_core::montecarlo::{ks_critical, ks_statistic};
use ctrw_core::quadrature::GaussKronrod;
use ctrw_core::{Complex64, JumpModel, Moment, ProcessSpec, Regime, WaitingTimeModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn waiting_models() -> Vec<WaitingTimeModel> {
    vec![
        WaitingTimeModel::exponential(1.3).unwrap(),
        WaitingTimeModel::erlang(1.0, 2).unwrap(),
        WaitingTimeModel::erlang(2.5, 4).unwrap(),
        WaitingTimeModel::tabulated(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.6), (3.0, 0.0)]).unwrap(),
    ]
}

fn positive_jumps() -> Vec<JumpModel> {
    vec![
        JumpModel::exponential_positive(0.1).unwrap(),
        JumpModel::exponential_positive(3.0).unwrap(),
        JumpModel::one_sided_stable_half(0.7).unwrap(),
        JumpModel::tabulated(&[(0.0, 1.0), (2.0, 0.5), (4.0, 0.0)]).unwrap(),
    ]
}

fn random_points(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.random_range(0.0..5.0), rng.random_range(-5.0..5.0)))
        .collect()
}

/// `∫_0^∞ e^{-st} f(t) dt` split at `knots` to keep the integrand smooth per piece.
fn transform_by_quadrature(f: impl Fn(f64) -> f64, s: Complex64, knots: &[f64]) -> Complex64 {
    let quad = GaussKronrod::with_tolerance(1e-13, 1e-11);
    let mut total = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    for &b in knots {
        total += quad.integrate(|t| (-s * t).exp() * f(t), a, b).value;
        a = b;
    }
    total + quad.integrate_to_infinity(|t| (-s * t).exp() * f(t), a).value
}

#[test]
fn densities_integrate_to_one() {
    let quad = GaussKronrod::with_tolerance(1e-13, 1e-12);
    for w in waiting_models() {
        let mass = quad.integrate(|t| w.pdf(t), 0.0, 1.0).value
            + quad.integrate(|t| w.pdf(t), 1.0, 3.0).value
            + quad.integrate_to_infinity(|t| w.pdf(t), 3.0).value;
        assert!((mass - 1.0).abs() < 1e-8, "{w:?}: {mass}");
    }
    let mut jumps = positive_jumps();
    jumps.push(JumpModel::exponential_negative(0.4).unwrap());
    jumps.push(JumpModel::shifted_exponential_negative(2.0, 1.5).unwrap());
    for h in jumps {
        let mass = quad.integrate_to_infinity(|u| h.pdf(-u), 0.0).value
            + quad.integrate(|u| h.pdf(u), 0.0, 1.0).value
            + quad.integrate(|u| h.pdf(u), 1.0, 4.0).value
            + quad.integrate_to_infinity(|u| h.pdf(u), 4.0).value;
        assert!((mass - 1.0).abs() < 1e-8, "{h:?}: {mass}");
    }
}

#[test]
fn waiting_transforms_match_quadrature_at_random_points() {
    for w in waiting_models() {
        for s in random_points(17, 20) {
            let closed = w.laplace(s).unwrap();
            let q = transform_by_quadrature(|t| w.pdf(t), s, &[0.5, 1.0, 3.0]);
            assert!((closed - q).norm() < 1e-6, "{w:?} at {s}: {closed} vs {q}");
        }
    }
}

#[test]
fn jump_transforms_match_quadrature_at_random_points() {
    for h in positive_jumps() {
        for s in random_points(23, 20) {
            let closed = h.laplace(s).unwrap();
            let q = transform_by_quadrature(|u| h.pdf(u), s, &[0.05, 0.5, 2.0, 4.0]);
            assert!((closed - q).norm() < 1e-6, "{h:?} at {s}: {closed} vs {q}");
        }
    }
}

#[test]
fn transform_examples() {
    let e2 = WaitingTimeModel::erlang(1.0, 2).unwrap();
    let one = Complex64::new(1.0, 0.0);
    assert!((e2.laplace(Complex64::new(0.0, 0.0)).unwrap().re - 1.0).abs() < 1e-15);
    assert!((e2.laplace(one).unwrap().re - 0.25).abs() < 1e-15);
    let e = WaitingTimeModel::exponential(2.0).unwrap();
    assert!((e.laplace(Complex64::new(2.0, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
    let h = JumpModel::exponential_positive(0.1).unwrap();
    assert!((h.laplace(Complex64::new(0.1, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
    let stable = JumpModel::one_sided_stable_half(1.0).unwrap();
    assert!((stable.laplace(Complex64::new(4.0, 0.0)).unwrap().re - 0.135_335).abs() < 1e-6);
    assert!(JumpModel::exponential_negative(1.0).unwrap().laplace(one).is_err());
}

#[test]
fn mean_is_minus_transform_slope() {
    let h = 1e-5;
    for w in waiting_models() {
        let slope = (w.laplace(Complex64::new(h, 0.0)).unwrap() - w.laplace(Complex64::new(-h, 0.0)).unwrap())
            .re
            / (2.0 * h);
        assert!((w.mean() + slope).abs() < 1e-8, "{w:?}");
    }
}

#[test]
fn samplers_pass_ks() {
    let n = 100_000;
    let crit = ks_critical(n, 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for w in waiting_models() {
        let draws: Vec<f64> = (0..n).map(|_| w.sample(&mut rng)).collect();
        let d = ks_statistic(&draws, |t| w.cdf(t));
        assert!(d < crit, "{w:?}: D = {d}");
    }
    let mut jumps = positive_jumps();
    jumps.push(JumpModel::exponential_negative(0.4).unwrap());
    jumps.push(
        JumpModel::mixture(
            0.3,
            JumpModel::exponential_positive(1.0).unwrap(),
            JumpModel::shifted_exponential_negative(2.0, 1.0).unwrap(),
        )
        .unwrap(),
    );
    for h in jumps {
        let draws: Vec<f64> = (0..n).map(|_| h.sample(&mut rng)).collect();
        let d = ks_statistic(&draws, |u| h.cdf(u));
        assert!(d < crit, "{h:?}: D = {d}");
    }
}

#[test]
fn regime_follows_jump_support() {
    let w = WaitingTimeModel::erlang(1.0, 2).unwrap();
    let spec = |h| ProcessSpec::new(0.1, 1.0, w.clone(), h).unwrap();
    assert_eq!(spec(JumpModel::exponential_positive(1.0).unwrap()).regime(), Regime::Favorable);
    assert_eq!(spec(JumpModel::exponential_negative(1.0).unwrap()).regime(), Regime::Adverse);
    let mixed = JumpModel::mixture(
        0.5,
        JumpModel::exponential_positive(1.0).unwrap(),
        JumpModel::exponential_negative(1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(spec(mixed.clone()).regime(), Regime::TwoSided);
    // Sign of the sampled mass agrees with the classification.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let negative = (0..10_000).filter(|_| mixed.sample(&mut rng) < 0.0).count() as f64 / 1e4;
    assert!((negative - 0.5).abs() < 3.0 * (0.25f64 / 1e4).sqrt());
    assert_eq!(JumpModel::one_sided_stable_half(1.0).unwrap().mean(), Moment::Undefined);
}

proptest! {
    #[test]
    fn erlang_cdf_is_monotone_and_bounded(rate in 0.05f64..20.0, shape in 1u32..8, a in 0.0f64..30.0, d in 0.0f64..5.0) {
        let w = WaitingTimeModel::erlang(rate, shape).unwrap();
        let (lo, hi) = (w.cdf(a), w.cdf(a + d));
        prop_assert!(lo >= 0.0 && hi <= 1.0 && hi >= lo);
        prop_assert!(w.pdf(a) >= 0.0);
        prop_assert_eq!(w.cdf(0.0), 0.0);
    }

    #[test]
    fn transforms_are_contractions(rate in 0.05f64..20.0, shape in 1u32..8, re in 0.0f64..10.0, im in -50.0f64..50.0) {
        let s = Complex64::new(re, im);
        let w = WaitingTimeModel::erlang(rate, shape).unwrap();
        prop_assert!(w.laplace(s).unwrap().norm() <= 1.0 + 1e-14);
        let h = JumpModel::exponential_positive(rate).unwrap();
        prop_assert!(h.laplace(s).unwrap().norm() <= 1.0 + 1e-14);
        let k = JumpModel::one_sided_stable_half(rate).unwrap();
        prop_assert!(k.laplace(s).unwrap().norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn erlang_shape_one_is_exponential(rate in 0.05f64..20.0, t in 0.0f64..20.0) {
        let a = WaitingTimeModel::erlang(rate, 1).unwrap();
        let b = WaitingTimeModel::exponential(rate).unwrap();
        prop_assert!((a.pdf(t) - b.pdf(t)).abs() <= 1e-14 * rate);
        prop_assert!((a.cdf(t) - b.cdf(t)).abs() <= 1e-15);
    }
}
