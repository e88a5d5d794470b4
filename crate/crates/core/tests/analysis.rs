use dampwave_core::analysis::{
    apriori_lower_bound, check_domination, check_phi_conditions, comparison_experiment, fit_decay,
    heat_domination_constant, kernel_lemma_ratios, log_spaced, main_theorem_bound, main_theorem_pullback, UpperSide,
};
use dampwave_core::grid::japanese_bracket_profile;
use dampwave_core::ode::OdeSupersolution;
use dampwave_core::quadrature::Sequential;
use dampwave_core::solver::{safe_half_width, Snapshot, SolverConfig};
use dampwave_core::{Error, Grid, GridFunction};
use proptest::prelude::*;

fn snap(t: f64, u: GridFunction) -> Snapshot {
    Snapshot { requested: t, t, u }
}

#[test]
fn fit_recovers_exact_and_perturbed_laws() {
    let ts = log_spaced(1.0, 1e6, 25);
    let exact: Vec<f64> = ts.iter().map(|t| 0.3 * t.powf(-0.5)).collect();
    let fit = fit_decay(&ts, &exact, (1.0, 1e6), -0.5).unwrap();
    assert!((fit.slope + 0.5).abs() < 1e-12);
    assert!(fit.slope_stderr < 1e-12);

    let ts = log_spaced(1e3, 1e5, 21);
    let perturbed: Vec<f64> = ts
        .iter()
        .map(|t| 2.0 * t.powf(-1.0 / 3.0) * (1.0 + t.powf(-0.5)))
        .collect();
    let fit = fit_decay(&ts, &perturbed, (1e3, 1e5), -1.0 / 3.0).unwrap();
    assert!(fit.within(0.02), "{}", fit.slope);
}

#[test]
fn fit_errors() {
    let ts = [1.0, 2.0, 3.0, 4.0];
    let ns = [1.0, 0.5, 0.3, 0.25];
    assert!(matches!(fit_decay(&ts, &ns, (3.0, 3.0), 0.0), Err(Error::Fit(_))));
    assert!(matches!(fit_decay(&ts, &ns, (2.5, 4.0), 0.0), Err(Error::Fit(_))));
    assert!(fit_decay(&ts, &[1.0, 0.0, 1.0, 1.0], (1.0, 4.0), 0.0).is_err());
}

#[test]
fn domination_examples() {
    let g = Grid::symmetric(3.0, 0.5).unwrap();
    let bound = GridFunction::from_fn(g, |x| 1.0 + x * x).unwrap();
    let half = bound.scale(0.5).unwrap();
    let r = check_domination(&[snap(1.0, half)], &[snap(1.0, bound.clone())], 1e-2).unwrap();
    assert!((r.max_ratio - 0.5).abs() < 1e-15);
    assert_eq!(r.violations, 0);
    let r = check_domination(&[snap(1.0, GridFunction::zeros(g))], &[snap(1.0, bound.clone())], 1e-2).unwrap();
    assert_eq!(r.max_ratio, 0.0);
    let over = bound.scale(1.02).unwrap();
    let r = check_domination(&[snap(1.0, over)], &[snap(1.0, bound.clone())], 1e-2).unwrap();
    assert_eq!(r.violations, g.len());
    assert!(check_domination(&[snap(1.0, bound.clone())], &[snap(2.0, bound)], 1e-2).is_err());
}

#[test]
fn profile_conditions() {
    let g = Grid::symmetric(100.0, 0.05).unwrap();
    let bracket = japanese_bracket_profile(1.5, g).unwrap();
    let r = check_phi_conditions(&bracket).unwrap();
    assert!(r.report.passed, "{r:?}");

    let gauss = GridFunction::from_fn(Grid::symmetric(20.0, 0.05).unwrap(), |x| (-x * x).exp()).unwrap();
    let r = check_phi_conditions(&gauss).unwrap();
    assert!(!r.report.passed);
    assert!(r.failed.iter().any(|f| f.starts_with("exponential")));

    let one = GridFunction::constant(g, 1.0).unwrap();
    let r = check_phi_conditions(&one).unwrap();
    assert!(r.report.passed);
    assert_eq!(r.full.local, 1.0);
    assert_eq!(r.full.dilation, 1.0);
    assert_eq!(r.full.log_derivative, 0.0);
    for (_, c) in r.full.exponential {
        assert_eq!(c, 1.0);
    }

    let neg = GridFunction::from_fn(g, |x| x).unwrap();
    assert!(check_phi_conditions(&neg).is_err());
}

#[test]
fn main_bound_examples() {
    let g = Grid::symmetric(5.0, 0.5).unwrap();
    let u_l = japanese_bracket_profile(1.5, g).unwrap().scale(0.3).unwrap();
    assert_eq!(main_theorem_bound(0.0, &u_l, 0.0, 2.0).unwrap(), u_l);

    let c = GridFunction::constant(g, 0.2).unwrap();
    let mut last = f64::INFINITY;
    for t in [0.0, 1.0, 10.0, 100.0] {
        let b = main_theorem_bound(t, &c, 5.0, 2.5).unwrap().values()[0];
        let exact = (0.2f64.powf(1.5) / ((t + 5.0) * 0.2f64.powf(1.5) + 1.0)).powf(1.0 / 1.5);
        assert!((b - exact).abs() < 1e-14 * exact);
        assert!(b < last);
        last = b;
    }

    let big = GridFunction::constant(g, 10.0).unwrap();
    let b = main_theorem_bound(1e6, &big, 0.0, 2.0).unwrap();
    assert!((b.values()[0] * 1e6 - 1.0).abs() < 1e-6);

    assert!(main_theorem_bound(1.0, &u_l.scale(-1.0).unwrap(), 1.0, 2.0).is_err());
}

#[test]
fn pullback_form_is_comparable() {
    let g = Grid::symmetric(50.0, 0.5).unwrap();
    let family = OdeSupersolution::new(2.0, 1.0).unwrap();
    let u_l = japanese_bracket_profile(1.5, g).unwrap().scale(0.01).unwrap();
    for t in [0.0, 10.0, 1000.0] {
        let b = main_theorem_bound(t, &u_l, 50.0, 2.0).unwrap();
        let h = main_theorem_pullback(t, &u_l, 50.0, &family).unwrap();
        for (x, y) in h.values().iter().zip(b.values()) {
            let r = x / y;
            // w lies in [1, 2] and g is at least B and at most 6 B for p = 2.
            assert!((1.0..=12.0).contains(&r), "{r}");
        }
    }
}

#[test]
fn lower_bound_for_constant_data() {
    let g = Grid::symmetric(30.0, 0.1).unwrap();
    let one = GridFunction::constant(g, 1.0).unwrap();
    let target = Grid::symmetric(5.0, 0.1).unwrap();
    for t in [0.5, 3.0, 10.0] {
        let lb = apriori_lower_bound(t, &one, &GridFunction::zeros(g), &target).unwrap();
        let exact = (-0.5 * t).exp() * (1.0 + 0.5 * t);
        for v in lb.values() {
            assert!((v - exact).abs() < 1e-12);
            assert!(*v <= 1.0);
        }
    }
}

fn comparison_grid(t: f64) -> (Grid, SolverConfig) {
    let dx = 0.1;
    let g = Grid::symmetric(safe_half_width(20.0, t, 0.09, dx), dx).unwrap();
    let cfg = SolverConfig::new(g, t, 2.0, true).unwrap();
    (g, cfg)
}

#[test]
fn comparison_cases() {
    let (g, cfg) = comparison_grid(20.0);
    let phi = japanese_bracket_profile(1.5, g).unwrap();
    let lo = phi.scale(0.01).unwrap();
    let hi = phi.scale(0.02).unwrap();
    let z = GridFunction::zeros(g);

    let same = comparison_experiment(&lo, &z, UpperSide::Evolved { u0: &lo, u1: &z }, &cfg, 20.0, 1e-6).unwrap();
    assert_eq!(same.max_excess, 0.0);

    let ordered = comparison_experiment(&lo, &z, UpperSide::Evolved { u0: &hi, u1: &z }, &cfg, 20.0, 1e-6).unwrap();
    assert!(ordered.report.passed);
    assert!(ordered.smallness <= 1.0);

    let family = OdeSupersolution::new(2.0, 1.0).unwrap();
    let ode = comparison_experiment(&lo, &z, UpperSide::Ode { family, eps: 0.01 }, &cfg, 20.0, 1e-6).unwrap();
    assert!(ode.report.passed);

    let err = comparison_experiment(&hi, &z, UpperSide::Evolved { u0: &lo, u1: &z }, &cfg, 20.0, 1e-6);
    assert!(matches!(err, Err(Error::Ordering { .. })));
}

#[test]
fn lemma_ratios_constant_data() {
    let g = Grid::symmetric(120.0, 0.05).unwrap();
    let one = GridFunction::constant(g, 1.0).unwrap();
    let ts = [2.0, 5.0, 10.0, 20.0, 50.0];
    let r = kernel_lemma_ratios(&one, 0.6, &ts, 0.05, &Sequential).unwrap();
    for &(t, first, _) in &r.rows {
        let exact = (-t).exp() / (1.0 - (-t).exp()) / t.powf(-0.8);
        // Compared on the scale of d_t S 1 itself, where the quadrature error is absolute.
        assert!((first - exact).abs() * t.powf(-0.8) < 5e-5, "t={t}: {first} vs {exact}");
    }
}

#[test]
fn lemma_ratios_bracket_and_sigma_monotone() {
    let g = Grid::symmetric(150.0, 0.05).unwrap();
    let phi = japanese_bracket_profile(1.5, g).unwrap();
    let ts = [2.0, 5.0, 10.0, 20.0, 50.0];
    let a = kernel_lemma_ratios(&phi, 0.6, &ts, 0.05, &Sequential).unwrap();
    assert!(a.report.passed, "{a:?}");
    let b = kernel_lemma_ratios(&phi, 0.9, &ts, 0.05, &Sequential).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert!(rb.1 <= ra.1 && rb.2 <= ra.2);
    }
    assert!(kernel_lemma_ratios(&phi, 0.4, &ts, 0.05, &Sequential).is_err());
    assert!(kernel_lemma_ratios(&phi, 0.6, &[1.0], 0.05, &Sequential).is_err());
}

#[test]
fn wave_to_heat_domination_is_bounded() {
    let g = Grid::symmetric(250.0, 0.1).unwrap();
    let phi = japanese_bracket_profile(1.5, g).unwrap();
    let r = heat_domination_constant(&phi, &[1.0, 10.0, 100.0], 0.1, &Sequential).unwrap();
    assert!(r.passed);
    let c = r.empirical_constant.unwrap();
    assert!(c > 0.5 && c < 5.0, "{c}");
}

proptest! {
    #[test]
    fn domination_is_scale_invariant(c in 1e-3f64..1e3, a in 0.1f64..2.0) {
        let g = Grid::symmetric(4.0, 0.25).unwrap();
        let bound = GridFunction::from_fn(g, |x| 1.0 / (1.0 + x * x)).unwrap();
        let u = GridFunction::from_fn(g, |x| a * (-x * x).exp()).unwrap();
        let r1 = check_domination(&[snap(0.0, u.clone())], &[snap(0.0, bound.clone())], 1e-2).unwrap();
        let r2 = check_domination(&[snap(0.0, u.scale(c).unwrap())], &[snap(0.0, bound.scale(c).unwrap())], 1e-2).unwrap();
        prop_assert!((r1.max_ratio - r2.max_ratio).abs() <= 1e-13 * r1.max_ratio);
        prop_assert_eq!(r1.violations, r2.violations);
    }

    #[test]
    fn fit_recovers_any_exponent(k in -3.0f64..1.0, c in 0.01f64..100.0) {
        let ts = log_spaced(10.0, 1e4, 9);
        let ns: Vec<f64> = ts.iter().map(|t| c * t.powf(k)).collect();
        let fit = fit_decay(&ts, &ns, (10.0, 1e4), k).unwrap();
        prop_assert!(fit.deviation().abs() < 1e-12);
    }
}
