use ctrw_core::exit::adverse::{
    integro_differential_residual, mean_exit_after_jump_adverse, mean_exit_at_adverse, ruin_mean_time,
    AdverseClosedForm,
};
use ctrw_core::exit::favorable::{
    mean_exit_after_jump, mean_exit_after_jump_inversion, mean_exit_at, mean_exit_at_inversion,
    mean_exit_at_quadrature, small_v_expansion, transform_f, transform_j, FavorableClosedForm,
};
use ctrw_core::exit::twosided::{
    asymptotic_mean_exit, mean_exit_equal_rates, mean_exit_ruinjump, mean_exit_twosided_general,
    transform_f_ruinjump, RuinJump,
};
use ctrw_core::exit::{ExitTable, MeanTime};
use ctrw_core::quadrature::integrate_to_infinity;
use ctrw_core::{
    Complex64, ExcessLifeLaw, InversionMethod, JumpModel, ObservationTime, ProcessSpec, WaitingTimeModel,
};

fn erlang2(lambda: f64) -> WaitingTimeModel {
    WaitingTimeModel::erlang(lambda, 2).unwrap()
}

fn fig1() -> ProcessSpec {
    ProcessSpec::new(0.1, 1.0, erlang2(1.0), JumpModel::exponential_positive(0.1).unwrap()).unwrap()
}

fn fig2(gamma: f64) -> ProcessSpec {
    ProcessSpec::new(0.1, 1.0, erlang2(1.0), JumpModel::exponential_negative(gamma).unwrap()).unwrap()
}

fn ruin_jump(lambda: f64, gamma: f64, v: f64, p: f64, b: f64, down: JumpModel) -> ProcessSpec {
    let jumps = JumpModel::mixture(p, JumpModel::exponential_positive(gamma).unwrap(), down).unwrap();
    ProcessSpec::new(v, b, erlang2(lambda), jumps).unwrap()
}

const TIMES: [ObservationTime; 4] = [
    ObservationTime::Finite(0.0),
    ObservationTime::Finite(0.4),
    ObservationTime::Finite(10.0),
    ObservationTime::SteadyState,
];

#[test]
fn favorable_closed_form_matches_talbot() {
    let spec = fig1();
    for x in [0.0, 0.25, 0.5, 0.75] {
        let closed = mean_exit_after_jump(&spec, x).unwrap();
        let talbot = mean_exit_after_jump_inversion(&spec, x, InversionMethod::default()).unwrap();
        assert!((closed - talbot).abs() < 1e-6, "x = {x}: {closed} vs {talbot}");
        for time in TIMES {
            let closed = mean_exit_at(&spec, x, time).unwrap();
            let talbot = mean_exit_at_inversion(&spec, x, time, InversionMethod::default()).unwrap();
            assert!((closed - talbot).abs() < 1e-6, "x = {x}, {time:?}: {closed} vs {talbot}");
        }
    }
}

#[test]
fn favorable_stehfest_agrees_loosely() {
    let spec = fig1();
    let method = InversionMethod::DEFAULT_STEHFEST;
    for x in [0.0, 0.5] {
        let closed = mean_exit_after_jump(&spec, x).unwrap();
        let gs = mean_exit_after_jump_inversion(&spec, x, method).unwrap();
        assert!((closed - gs).abs() < 1e-4 * closed, "x = {x}: {closed} vs {gs}");
    }
}

#[test]
fn favorable_grid_quadrature_matches_closed_form() {
    let spec = fig1();
    let table = ExitTable::solve(&spec, 1001).unwrap();
    for time in TIMES {
        let law = ExcessLifeLaw::new(&spec.waiting, time).unwrap();
        for x in [0.0, 0.3, 0.5, 0.9] {
            let grid = table.at(x, &law).unwrap();
            let closed = mean_exit_at(&spec, x, time).unwrap();
            assert!((grid - closed).abs() < 1e-5, "x = {x}, {time:?}: {grid} vs {closed}");
        }
    }
    let law = ExcessLifeLaw::new(&spec.waiting, ObservationTime::Finite(0.4)).unwrap();
    let q = mean_exit_at_quadrature(&spec, 0.5, &law).unwrap();
    let closed = mean_exit_at(&spec, 0.5, ObservationTime::Finite(0.4)).unwrap();
    assert!((q - closed).abs() < 1e-6);
}

#[test]
fn favorable_general_models_route_through_inversion() {
    // Erlang-3 sojourns have no closed form: inversion against the grid.
    let spec = ProcessSpec::new(
        0.2,
        1.5,
        WaitingTimeModel::erlang(1.5, 3).unwrap(),
        JumpModel::exponential_positive(0.7).unwrap(),
    )
    .unwrap();
    let table = ExitTable::solve(&spec, 1501).unwrap();
    for x in [0.0, 0.7, 1.2] {
        let inv = mean_exit_after_jump(&spec, x).unwrap();
        let grid = table.after_jump(x).unwrap();
        assert!((inv - grid).abs() < 1e-5, "x = {x}: {inv} vs {grid}");
    }
}

#[test]
fn j_transform_matches_transform_of_time_domain_values() {
    let spec = fig1();
    let closed = FavorableClosedForm::from_spec(&spec).unwrap();
    let time = ObservationTime::Finite(0.4);
    let s = Complex64::new(1.0, 0.0);
    let q = integrate_to_infinity(|y| (-y).exp() * closed.at(y, time), 0.0);
    let j = transform_j(&spec, time, s).unwrap();
    assert!((j.re - q).abs() < 1e-5, "{} vs {q}", j.re);
    let f = transform_f(&spec, s).unwrap();
    let qf = integrate_to_infinity(|y| (-y).exp() * closed.after_jump(y), 0.0);
    assert!((f.re - qf).abs() < 1e-8);
}

#[test]
fn steady_state_transform_is_large_r_limit() {
    let spec = fig1();
    let s = Complex64::new(1.0, 0.0);
    let far = transform_j(&spec, ObservationTime::Finite(50.0), s).unwrap();
    let steady = transform_j(&spec, ObservationTime::SteadyState, s).unwrap();
    assert!((far - steady).norm() < 1e-6);
    let zero = transform_j(&spec, ObservationTime::Finite(0.0), s).unwrap();
    assert!((zero - transform_f(&spec, s).unwrap()).norm() < 1e-12);
}

#[test]
fn small_drift_expansion_orders() {
    let s = Complex64::new(1.0, 0.0);
    for (r, drifts) in [(0.4, [2e-2, 1e-2]), (10.0, [2e-3, 1e-3])] {
        let time = ObservationTime::Finite(r);
        let errors: Vec<(f64, f64)> = drifts
            .iter()
            .map(|&v| {
                let spec = ProcessSpec { drift: v, ..fig1() };
                let exact = transform_j(&spec, time, s).unwrap();
                let e0 = (small_v_expansion(&spec, time, s, 0).unwrap() - exact).norm();
                let e1 = (small_v_expansion(&spec, time, s, 1).unwrap() - exact).norm();
                (e0, e1)
            })
            .collect();
        let first = errors[0].0 / errors[1].0;
        let second = errors[0].1 / errors[1].1;
        assert!((first - 2.0).abs() < 0.2, "r = {r}: order-0 error ratio {first}");
        assert!((second - 4.0).abs() < 0.4, "r = {r}: order-1 error ratio {second}");
    }
    let spec = fig1();
    let zero = ObservationTime::Finite(0.0);
    for order in [0, 1] {
        let e = small_v_expansion(&spec, zero, s, order).unwrap();
        assert!((e - transform_f(&spec, s).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn printed_first_order_term_fails_the_scaling_check() {
    // -ĥ/(1 - ĥ)(μ - μ_r)μv leaves an O(v) residual.
    let s = Complex64::new(1.0, 0.0);
    let time = ObservationTime::Finite(10.0);
    let law = ExcessLifeLaw::new(&fig1().waiting, time).unwrap();
    let (mu, mu_r) = (2.0, law.mean());
    let residual = |v: f64| {
        let spec = ProcessSpec { drift: v, ..fig1() };
        let h = spec.jumps.laplace(s).unwrap();
        let printed = small_v_expansion(&spec, time, s, 0).unwrap() - h / (1.0 - h) * (mu - mu_r) * mu * v;
        (printed - transform_j(&spec, time, s).unwrap()).norm()
    };
    let ratio = residual(2e-3) / residual(1e-3);
    assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn zero_drift_correction_is_minus_excess_mean_difference() {
    let lambda: f64 = 1.0;
    let spec = ProcessSpec { drift: 0.0, ..fig1() };
    let table = ExitTable::solve(&spec, 401).unwrap();
    for r in [0.4, 2.0, 10.0] {
        let want = -(1.0 - (-2.0 * lambda * r).exp()) / (2.0 * lambda);
        let law = ExcessLifeLaw::new(&spec.waiting, ObservationTime::Finite(r)).unwrap();
        for x in [0.0, 0.5, 0.9] {
            let after = mean_exit_after_jump(&spec, x).unwrap();
            let at = mean_exit_at(&spec, x, ObservationTime::Finite(r)).unwrap();
            assert!((at - after - want).abs() < 1e-8);
            let grid = table.at(x, &law).unwrap() - table.after_jump(x).unwrap();
            assert!((grid - want).abs() < 1e-8);
        }
    }
}

#[test]
fn adverse_closed_form_matches_nystrom() {
    for gamma in [0.1, 4.0] {
        let spec = fig2(gamma);
        let closed = AdverseClosedForm::from_spec(&spec).unwrap().unwrap();
        let table = ExitTable::solve(&spec, 2001).unwrap();
        let err = table
            .nodes()
            .zip(table.values())
            .map(|(x, t)| (closed.eval(x).unwrap() - t).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "γ = {gamma}: sup error {err}");
        assert!(table.values().iter().all(|&t| t >= 0.0));
        assert!(closed.eval(1.0).unwrap().abs() < 1e-8);
        assert!((closed.derivative(1.0).unwrap() + 10.0).abs() < 1e-4);
        assert!((table.boundary_derivative() + 10.0).abs() < 1e-2);
    }
}

#[test]
fn adverse_solution_satisfies_integro_differential_form() {
    for gamma in [0.1, 4.0] {
        let spec = fig2(gamma);
        let closed = AdverseClosedForm::from_spec(&spec).unwrap().unwrap();
        let n = 1001;
        let step = 1.0 / (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| closed.eval(i as f64 * step).unwrap()).collect();
        let residual = integro_differential_residual(&spec, &values, step).unwrap();
        let scale = 2.0 * 1.0 / (0.1 * 0.1);
        assert!(residual < 1e-3 * scale, "γ = {gamma}: residual {residual}");
    }
}

#[test]
fn adverse_at_jump_instant_equals_after_jump() {
    let spec = fig2(0.1);
    let a = mean_exit_at_adverse(&spec, 0.5, ObservationTime::Finite(0.0)).unwrap();
    let b = mean_exit_after_jump_adverse(&spec, 0.5).unwrap();
    assert!((a - b).abs() < 1e-6);
    let table = ExitTable::solve(&spec, 2001).unwrap();
    let law = ExcessLifeLaw::new(&spec.waiting, ObservationTime::Finite(0.0)).unwrap();
    assert!((table.at(0.5, &law).unwrap() - b).abs() < 1e-6);
}

#[test]
fn ruin_mean_time_and_sentinel() {
    let mut spec = fig2(0.1);
    spec.boundary = f64::INFINITY;
    let t = ruin_mean_time(&spec, 0.0).unwrap();
    assert!((t.value() - 2.0 / 0.98).abs() < 1e-12);
    assert!((t.value() - 2.040_816).abs() < 1e-6);
    let critical = ProcessSpec {
        jumps: JumpModel::exponential_negative(5.0).unwrap(),
        ..spec.clone()
    };
    assert_eq!(ruin_mean_time(&critical, 0.0).unwrap(), MeanTime::Infinite { boundary_case: true });
    // A large finite barrier approaches the ruin value from below.
    let wide = fig2(0.1);
    let wide = ProcessSpec { boundary: 200.0, ..wide };
    let near = AdverseClosedForm::from_spec(&wide).unwrap().unwrap().eval(0.0).unwrap();
    assert!(near <= t.value() && near > 0.99 * t.value(), "{near}");
}

#[test]
fn twosided_zero_negative_probability_reduces_to_favorable() {
    let spec = ruin_jump(1.0, 0.1, 0.1, 0.0, 1.0, JumpModel::point_mass(-2.0).unwrap());
    let favorable = fig1();
    let table = ExitTable::solve(&spec, 2001).unwrap();
    let err = table
        .nodes()
        .zip(table.values())
        .map(|(x, t)| (mean_exit_after_jump(&favorable, x).unwrap() - t).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "sup error {err}");
    let rj = RuinJump::from_spec(&spec).unwrap();
    for k in 0..20 {
        let s = Complex64::new(0.2 + 0.37 * k as f64, 0.9 * (k as f64 - 10.0));
        let a = rj.transform(s);
        let b = transform_f(&favorable, s).unwrap();
        assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
    }
}

#[test]
fn twosided_unit_negative_probability_gives_truncated_sojourn() {
    let (lambda, v) = (1.0, 0.1);
    let spec = ruin_jump(lambda, 0.1, v, 1.0, 1.0, JumpModel::point_mass(-2.0).unwrap());
    // E[min(ϱ, τ₁)] at ϱ = 10.
    let want = 2.0 - 12.0 * (-10.0f64).exp();
    let table = ExitTable::solve(&spec, 201).unwrap();
    assert!((table.after_jump(0.0).unwrap() - want).abs() < 1e-8);
    let rj = RuinJump::from_spec(&spec).unwrap();
    for k in 0..20 {
        let s = Complex64::new(0.1 + 0.5 * k as f64, 0.3 * k as f64 - 2.0);
        let direct = (s * v + 2.0 * lambda) / (s * (s * v + lambda).powi(2));
        assert!((rj.transform(s) - direct).norm() < 1e-10 * direct.norm().max(1.0));
    }
}

#[test]
fn ruin_jump_inverse_matches_nystrom() {
    let spec = ruin_jump(1.0, 0.1, 0.1, 0.5, 1.0, JumpModel::point_mass(-2.0).unwrap());
    let f = transform_f_ruinjump(&spec, Complex64::new(1.0, 0.0)).unwrap();
    assert!(f.re.is_finite() && f.re > 0.0);
    let grid = mean_exit_twosided_general(&spec, 0.0, 2001).unwrap();
    let closed = mean_exit_ruinjump(&spec, 0.0).unwrap();
    assert!((grid - closed).abs() < 1e-5, "{grid} vs {closed}");
}

#[test]
fn equal_rates_formula() {
    let spec = ruin_jump(1.0, 10.0, 0.1, 0.5, 1.0, JumpModel::point_mass(-2.0).unwrap());
    assert!(mean_exit_equal_rates(&spec, 1.0).unwrap().abs() < 1e-9);
    for x in [0.0, 0.4, 0.8] {
        let residues = mean_exit_equal_rates(&spec, x).unwrap();
        let rational = mean_exit_ruinjump(&spec, x).unwrap();
        assert!((residues - rational).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn downward_law_beyond_the_barrier_is_irrelevant() {
    let b = 1.0;
    let point = ruin_jump(1.0, 0.5, 0.2, 0.3, b, JumpModel::point_mass(-2.0 * b).unwrap());
    let shifted = ruin_jump(
        1.0,
        0.5,
        0.2,
        0.3,
        b,
        JumpModel::shifted_exponential_negative(1.0, b).unwrap(),
    );
    let a = ExitTable::solve(&point, 1001).unwrap();
    let c = ExitTable::solve(&shifted, 1001).unwrap();
    let err = a
        .values()
        .iter()
        .zip(c.values())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "sup difference {err}");
}

#[test]
fn wide_interval_approaches_asymptote() {
    let (lambda, gamma, p) = (1.0, 0.5, 0.5);
    let limit = asymptotic_mean_exit(&ruin_jump(
        lambda,
        gamma,
        0.1,
        p,
        1.0,
        JumpModel::point_mass(-2.0).unwrap(),
    ))
    .unwrap()
    .value();
    assert!((limit - 2.0 / (p * lambda)).abs() < 1e-14);
    // E[J₊] = 1/γ = 2, so b = 80 is forty mean upward jumps.
    let values: Vec<f64> = [5.0, 10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&b| {
            let spec = ruin_jump(lambda, gamma, 0.1, p, b, JumpModel::point_mass(-2.0 * b).unwrap());
            mean_exit_ruinjump(&spec, 0.0).unwrap()
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
    let last = *values.last().unwrap();
    assert!((last - limit).abs() < 0.01 * limit, "{last} vs {limit}");
}

proptest::proptest! {
    #[test]
    fn favorable_values_are_bounded_and_monotone(
        lambda in 0.2f64..5.0,
        gamma in 0.05f64..20.0,
        v in 0.02f64..2.0,
        b in 0.2f64..5.0,
        u in 0.0f64..1.0,
        d in 0.0f64..1.0,
        r in 0.0f64..20.0,
    ) {
        let spec = ProcessSpec::new(v, b, erlang2(lambda), JumpModel::exponential_positive(gamma).unwrap()).unwrap();
        let x1 = u * b;
        let x2 = x1 + d * (b - x1);
        let t1 = mean_exit_after_jump(&spec, x1).unwrap();
        let t2 = mean_exit_after_jump(&spec, x2).unwrap();
        let slack = 1e-10 * (b / v);
        proptest::prop_assert!(t1 >= -slack && t1 <= (b - x1) / v + slack);
        proptest::prop_assert!(t2 <= t1 + slack);
        let time = ObservationTime::Finite(r);
        let a1 = mean_exit_at(&spec, x1, time).unwrap();
        let a2 = mean_exit_at(&spec, x2, time).unwrap();
        proptest::prop_assert!(a1 >= -slack && a1 <= (b - x1) / v + slack);
        proptest::prop_assert!(a2 <= a1 + slack);
    }
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(200))]

    #[test]
    fn ruin_jump_cubic_is_hurwitz(
        lambda in 0.05f64..10.0,
        gamma in 0.05f64..20.0,
        v in 0.01f64..5.0,
        p in 0.001f64..1.0,
    ) {
        let spec = ruin_jump(lambda, gamma, v, p, 1.0, JumpModel::point_mass(-2.0).unwrap());
        let rj = RuinJump::from_spec(&spec).unwrap();
        proptest::prop_assert!(rj.is_hurwitz());
        let roots = rj.cubic_roots().unwrap();
        proptest::prop_assert_eq!(roots.len(), 3);
        proptest::prop_assert!(roots.iter().all(|z| z.re < 0.0), "{:?}", roots);
    }
}

#[test]
fn observation_quadrature_on_closed_forms_matches_nystrom() {
    use ctrw_core::exit::mean_exit_from_after_jump;
    let adverse = ProcessSpec::new(
        0.1,
        1.0,
        WaitingTimeModel::erlang(1.0, 2).unwrap(),
        JumpModel::exponential_negative(4.0).unwrap(),
    )
    .unwrap();
    let closed = AdverseClosedForm::from_spec(&adverse).unwrap().unwrap();
    let table = ExitTable::solve(&adverse, 2001).unwrap();
    let law = ExcessLifeLaw::new(&adverse.waiting, ObservationTime::Finite(0.4)).unwrap();
    for x in [0.1, 0.5, 0.9] {
        let a = mean_exit_from_after_jump(&adverse, x, &law, &|z| closed.eval(z).unwrap()).unwrap();
        let n = table.at(x, &law).unwrap();
        assert!((a - n).abs() < 1e-5, "x = {x}: {a} vs {n}");
    }

    let jumps = JumpModel::mixture(
        0.3,
        JumpModel::exponential_positive(2.0).unwrap(),
        JumpModel::point_mass(-2.0).unwrap(),
    )
    .unwrap();
    let ruin = ProcessSpec::new(0.5, 1.0, WaitingTimeModel::erlang(1.0, 2).unwrap(), jumps).unwrap();
    let inv = RuinJump::from_spec(&ruin).unwrap().inverse().unwrap();
    let table = ExitTable::solve(&ruin, 2001).unwrap();
    let law = ExcessLifeLaw::new(&ruin.waiting, ObservationTime::Finite(10.0)).unwrap();
    for x in [0.0, 0.5] {
        let a = mean_exit_from_after_jump(&ruin, x, &law, &|z| inv.eval(1.0 - z).unwrap()).unwrap();
        let n = table.at(x, &law).unwrap();
        assert!((a - n).abs() < 1e-5, "x = {x}: {a} vs {n}");
    }
}
