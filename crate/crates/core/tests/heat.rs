use dampwave_core::analysis::log_spaced;
use dampwave_core::grid::{japanese_bracket, japanese_bracket_profile};
use dampwave_core::heat::{
    heat_apply, heat_envelope_constants, heat_rate_check, heat_residual_check, heat_residual_data_half_width,
    heat_supersolution, heat_supersolution_norms, HeatOperator, HeatResidualConfig, RateGrid, RateOutcome,
};
use dampwave_core::ode::absorption_flow;
use dampwave_core::quadrature::Sequential;
use dampwave_core::{Error, Grid, GridFunction, LqExponent};

fn gaussian(s: f64) -> impl Fn(f64) -> f64 {
    move |x| (-x * x / (4.0 * s)).exp()
}

#[test]
fn gaussian_convolution_closed_form() {
    let g = Grid::symmetric(40.0, 0.05).unwrap();
    let f = GridFunction::from_fn(g, gaussian(1.0)).unwrap();
    let out = heat_apply(2.0, &f, 0.05).unwrap();
    for (x, v) in out.samples() {
        let exact = (1.0f64 / 3.0).sqrt() * (-x * x / 12.0).exp();
        assert!((v - exact).abs() < 1e-6, "x={x}: {v} vs {exact}");
    }
}

#[test]
fn positivity_and_mass() {
    let g = Grid::symmetric(60.0, 0.05).unwrap();
    let f = GridFunction::from_fn(g, |x| gaussian(0.5)(x - 3.0) + 0.5 * gaussian(2.0)(x + 4.0)).unwrap();
    let op = HeatOperator::new(5.0, 0.05).unwrap();
    let out = op.apply(&f).unwrap();
    assert!(out.min() >= 0.0);
    let mass_in: f64 = f.values().iter().sum::<f64>() * g.dx();
    let mass_out: f64 = out.values().iter().sum::<f64>() * g.dx();
    assert!((mass_in - mass_out).abs() < 1e-8, "{mass_in} vs {mass_out}");
    assert!(op.tail_mass() < 1e-7);
}

#[test]
fn semigroup_property() {
    let g = Grid::symmetric(80.0, 0.05).unwrap();
    let f = japanese_bracket_profile(1.5, g).unwrap();
    let once = heat_apply(1.5, &heat_apply(2.5, &f, 0.05).unwrap(), 0.05).unwrap();
    let direct = heat_apply(4.0, &f, 0.05).unwrap();
    let direct = direct.restrict(once.grid()).unwrap();
    for (a, b) in once.values().iter().zip(direct.values()) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn zero_time_and_truncation() {
    let g = Grid::symmetric(5.0, 0.1).unwrap();
    let f = japanese_bracket_profile(1.5, g).unwrap();
    assert_eq!(heat_apply(0.0, &f, 0.1).unwrap(), f);
    let op = HeatOperator::new(4.0, 0.1).unwrap();
    assert!(matches!(op.eval_at(&f, 0.0), Err(Error::Truncation { .. })));
    let neg = GridFunction::from_fn(g, |x| x).unwrap();
    assert!(heat_apply(1.0, &neg, 0.1).is_err());
}

#[test]
fn supersolution_below_data_flow_and_ode() {
    let g = Grid::symmetric(100.0, 0.1).unwrap();
    let phi = japanese_bracket_profile(1.5, g).unwrap();
    for t in [0.5, 3.0, 20.0] {
        let heat = heat_apply(t, &phi, 0.1).unwrap();
        let sup = heat_supersolution(t, &phi, 2.0, 0.1).unwrap();
        for (a, b) in sup.values().iter().zip(heat.values()) {
            assert!(*a <= *b);
            assert!(*a <= 1.0 / t);
        }
    }
}

#[test]
fn residual_is_nonnegative_up_to_discretization() {
    let cfg = HeatResidualConfig::default();
    let g = Grid::symmetric(heat_residual_data_half_width(&cfg), cfg.dx).unwrap();
    let phi = japanese_bracket_profile(1.5, g).unwrap();
    let rep = heat_residual_check(&phi, 2.0, &cfg, &Sequential).unwrap();
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn sup_norm_commutes_with_flow() {
    let plan = RateGrid::default();
    for t in [10.0, 1000.0] {
        let n = heat_supersolution_norms(2.0, 1.5, &[LqExponent::Infinity], t, &plan, &Sequential).unwrap()[0];
        let op = HeatOperator::new(t, t.sqrt() / plan.heat_nodes_per_sd).unwrap();
        let peak = op.eval_fn(|x| japanese_bracket(1.5, x), 0.0);
        assert!((n - absorption_flow(t, peak, 2.0)).abs() <= 1e-14 * n);
    }
}

#[test]
fn slow_decay_slopes() {
    let ts = log_spaced(1e2, 1e5, 16);
    for (q, target) in [
        (LqExponent::Finite(1.0), -1.0 / 3.0),
        (LqExponent::Finite(2.0), -2.0 / 3.0),
        (LqExponent::Infinity, -1.0),
    ] {
        match heat_rate_check(2.0, 1.5, q, &ts, &RateGrid::default(), &Sequential).unwrap() {
            RateOutcome::Slope { fit, .. } => {
                assert!((fit.target - target).abs() < 1e-12);
                assert!(fit.within(0.05), "q={q}: slope {}", fit.slope);
            }
            RateOutcome::Band(_) => panic!("expected a slope"),
        }
    }
}

#[test]
fn fast_decay_log_band() {
    let ts = log_spaced(1e2, 1e5, 16);
    match heat_rate_check(
        2.0,
        3.0,
        LqExponent::Finite(2.0),
        &ts,
        &RateGrid::default(),
        &Sequential,
    )
    .unwrap()
    {
        RateOutcome::Band(band) => assert!(band.spread() <= 4.0, "{band:?}"),
        RateOutcome::Slope { .. } => panic!("expected a band"),
    }
}

#[test]
fn envelope_constants_are_moderate() {
    let env = heat_envelope_constants(2.0, 1.5, &[10.0, 100.0, 1000.0], 200).unwrap();
    assert!(env.inner_max <= 1.0);
    assert!(env.outer_min > 0.1 && env.outer_max < 10.0, "{env:?}");
}

#[test]
fn too_few_times_is_a_fit_error() {
    let r = heat_rate_check(
        2.0,
        1.5,
        LqExponent::Infinity,
        &[10.0, 20.0],
        &RateGrid::default(),
        &Sequential,
    );
    assert!(matches!(r, Err(Error::Fit(_))));
}
