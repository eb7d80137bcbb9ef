use std::f64::consts::PI;

use ctrw_core::continuum::{
    mean_exit_continuum, mean_exit_continuum_via_inversion, propagator_double_laplace, stable_density,
    survival_probability, survival_probability_with, ContinuumSpec, ErfcArgument,
};
use ctrw_core::exit::favorable::mean_exit_after_jump;
use ctrw_core::quadrature::GaussKronrod;
use ctrw_core::special::erfcx;
use ctrw_core::{Complex64, InversionMethod, JumpModel, ProcessSpec, WaitingTimeModel};

fn spec(y: f64) -> ContinuumSpec {
    ContinuumSpec::new(1.0, y, 1.0, 0.0).unwrap()
}

#[test]
fn quadrature_decides_the_erfc_argument() {
    let s = spec(1.0);
    let t = 0.5;
    let quad = GaussKronrod::with_tolerance(1e-14, 1e-12)
        .integrate(|u| stable_density(1.0, u, t), 0.0, 1.0 - t)
        .value;
    let integrated = survival_probability(&s, t).unwrap();
    let printed = survival_probability_with(&s, t, ErfcArgument::Printed).unwrap();
    assert!((quad - integrated).abs() < 1e-8, "{quad} vs {integrated}");
    assert!((quad - printed).abs() > 1e-2);
}

#[test]
fn closed_form_matches_talbot_inversion() {
    for y in [1.0, 4.0] {
        let s = spec(y);
        let closed = mean_exit_continuum(&s);
        let talbot = mean_exit_continuum_via_inversion(&s, InversionMethod::default()).unwrap();
        assert!((closed - talbot).abs() < 1e-6, "y = {y}: {closed} vs {talbot}");
        let gs = mean_exit_continuum_via_inversion(&s, InversionMethod::DEFAULT_STEHFEST).unwrap();
        assert!((closed - gs).abs() < 1e-4, "y = {y}: {closed} vs {gs}");
    }
    assert!((mean_exit_continuum(&spec(1.0)) - 0.555_963).abs() < 1e-6);
}

#[test]
fn linear_onset_near_the_boundary() {
    // The √(b - x) terms cancel; with K = v = 1, T̃ = y - (4/(3√π))y^{3/2} + y²/2 + O(y^{5/2}).
    let ratio = mean_exit_continuum(&spec(4e-4)) / mean_exit_continuum(&spec(1e-4));
    assert!((ratio - 4.0).abs() < 0.08, "ratio {ratio}");
    let inv = |y| mean_exit_continuum_via_inversion(&spec(y), InversionMethod::default()).unwrap();
    let ratio = inv(4e-4) / inv(1e-4);
    assert!((ratio - 4.0).abs() < 0.08, "inverted ratio {ratio}");
    let y: f64 = 1e-4;
    let series = y - 4.0 / (3.0 * PI.sqrt()) * y.powf(1.5) + 0.5 * y * y;
    assert!((mean_exit_continuum(&spec(y)) - series).abs() < 1e-10);
}

#[test]
fn mean_equals_integrated_survival() {
    for y in [0.5, 1.0, 3.0] {
        let s = spec(y);
        let q = GaussKronrod::with_tolerance(1e-12, 1e-12)
            .integrate(|t| survival_probability(&s, t).unwrap(), 0.0, s.drift_time())
            .value;
        assert!((q - mean_exit_continuum(&s)).abs() < 1e-6, "y = {y}");
    }
}

#[test]
fn scaled_erfc_is_stable_for_large_arguments() {
    for z in [1e2f64, 1e3, 1e4] {
        let series = (1.0 - 1.0 / (2.0 * z * z) + 3.0 / (4.0 * z.powi(4))) / (z * PI.sqrt());
        assert!(((erfcx(z) - series) / series).abs() < 1e-10, "z = {z}");
    }
    // K√(b - x)/v = 10⁴.
    let s = ContinuumSpec::new(1e-4, 1.0, 1.0, 0.0).unwrap();
    let t = mean_exit_continuum(&s);
    assert!(t.is_finite() && t > 0.0);
}

#[test]
fn propagator_small_parameter_limit() {
    let one = Complex64::new(1.0, 0.0);
    let p = propagator_double_laplace(1e-3, 1e-3, one, one).unwrap();
    assert!(((p.exact - p.limiting) / p.limiting).norm() < 2e-3);
    let s2 = Complex64::new(2.0, 1.0);
    let p = propagator_double_laplace(0.2, 0.4, Complex64::new(1e-16, 0.0), s2).unwrap();
    assert!((p.exact - 1.0 / s2).norm() < 1e-6);
}

#[test]
fn discrete_walk_converges_to_continuum() {
    let target = mean_exit_continuum(&spec(1.0));
    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&mu| {
            let walk = ProcessSpec::new(
                1.0,
                1.0,
                WaitingTimeModel::exponential(1.0 / mu).unwrap(),
                JumpModel::one_sided_stable_half(mu).unwrap(),
            )
            .unwrap();
            (mean_exit_after_jump(&walk, 0.0).unwrap() - target).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}
