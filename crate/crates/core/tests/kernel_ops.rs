use dampwave_core::grid::{japanese_bracket_profile, Grid, GridFunction};
use dampwave_core::kernel::{
    apply_dt_s, apply_dtt_s, apply_s, k1, k1_cone_limit, k2, k2_cone_limit, k2_raw, k2_stabilized, linear_solution,
    ConeOperator,
};
use dampwave_core::special::{bessel_i, BesselOrder};
use proptest::prelude::*;

fn ones(t: f64) -> GridFunction {
    GridFunction::constant(Grid::symmetric(t + 1.0, 0.5).unwrap(), 1.0).unwrap()
}

fn at_origin(f: &GridFunction) -> f64 {
    let j = f.grid().index_of(0.0).unwrap();
    f.values()[j]
}

fn y_for_omega(t: f64, omega: f64) -> f64 {
    (t * t - omega * omega).sqrt()
}

#[test]
fn constant_data_identities() {
    for t in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let f = ones(t);
        let q = 1e-3 * t;
        let e = (-t).exp();
        for v in apply_s(t, &f, q).unwrap().values() {
            assert!((v - (1.0 - e)).abs() < 1e-6, "S t={t}");
        }
        for v in apply_dt_s(t, &f, q).unwrap().values() {
            assert!((v - e).abs() < 1e-6, "dS t={t}");
        }
        for v in apply_dtt_s(t, &f, None, q).unwrap().values() {
            assert!((v + e).abs() < 1e-6, "ddS t={t}");
        }
    }
}

#[test]
fn mass_identity_over_a_range_of_times() {
    let mut t = 0.1;
    while t <= 30.0 {
        let f = ones(t);
        let v = at_origin(&apply_s(t, &f, 1e-3 * t.max(1.0)).unwrap());
        assert!((v - (1.0 - (-t).exp())).abs() < 1e-6, "t={t}");
        t *= 1.2;
    }
}

#[test]
fn k1_spot_values() {
    // (t/omega) I1(omega/2) - I0(omega/2) at y = 0 is I1(t/2) - I0(t/2) < 0.
    assert!(k1(0.1, 0.0).unwrap() < 0.0);
    let unscaled =
        0.25 * (-1.0f64).exp() * (bessel_i(BesselOrder::One, 1.0).unwrap() - bessel_i(BesselOrder::Zero, 1.0).unwrap());
    assert!((k1(2.0, 0.0).unwrap() - unscaled).abs() < 1e-13);
}

#[test]
fn cone_limits_at_small_omega() {
    for t in [1.0, 5.0, 20.0] {
        let y = y_for_omega(t, 1e-6);
        let limit = k2_cone_limit(t);
        assert!(((k2(t, y).unwrap() - limit) / limit).abs() < 1e-6);
        let y8 = y_for_omega(t, 1e-8);
        assert!(((k2(t, y8).unwrap() - limit) / limit).abs() < 1e-8);
        let l1 = k1_cone_limit(t);
        if l1 != 0.0 {
            assert!(((k1(t, y8).unwrap() - l1) / l1).abs() < 1e-8);
        }
    }
}

#[test]
fn k2_converges_to_cone_limit() {
    for t in [1.0, 5.0, 20.0] {
        let limit = k2_cone_limit(t);
        let gaps: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&w| (k2_stabilized(t, y_for_omega(t, w)).unwrap() - limit).abs())
            .collect();
        assert!(gaps[0] < 1e-5 * limit.abs().max(1e-3));
        assert!(gaps[1] <= gaps[0] && gaps[2] <= gaps[1], "{gaps:?}");
    }
}

#[test]
fn raw_formula_loses_digits_at_the_cone() {
    let t = 5.0;
    let y = y_for_omega(t, 1e-6);
    let raw = k2_raw(t, y).unwrap();
    let limit = k2_cone_limit(t);
    // The stabilized path is what makes small omega usable.
    assert!(((k2(t, y).unwrap() - limit) / limit).abs() < 1e-9);
    assert!(((raw - limit) / limit).abs() > 1e-9);
}

fn gaussian(x: f64) -> f64 {
    (-x * x / 2.0).exp()
}

#[test]
fn time_derivative_consistency() {
    let grid = Grid::symmetric(20.0, 1e-3).unwrap();
    let f = GridFunction::from_fn(grid, gaussian).unwrap();
    let fp = GridFunction::from_fn(grid, |x| -x * gaussian(x)).unwrap();
    let (t, h, q) = (3.0, 1e-3, 1e-3);
    let s_plus = ConeOperator::solution(t + h, q).unwrap();
    let s_minus = ConeOperator::solution(t - h, q).unwrap();
    let v = ConeOperator::velocity(t, q).unwrap();
    let v_plus = ConeOperator::velocity(t + h, q).unwrap();
    let v_minus = ConeOperator::velocity(t - h, q).unwrap();
    let a = ConeOperator::acceleration(t, q).unwrap();
    for x in [-2.5, -0.7, 0.0, 1.3, 4.0] {
        let fd = (s_plus.eval_at(&f, None, x).unwrap() - s_minus.eval_at(&f, None, x).unwrap()) / (2.0 * h);
        let exact = v.eval_at(&f, None, x).unwrap();
        assert!((fd - exact).abs() < 1e-5, "dS at x={x}: {fd} vs {exact}");
        let fd2 = (v_plus.eval_at(&f, None, x).unwrap() - v_minus.eval_at(&f, None, x).unwrap()) / (2.0 * h);
        let exact2 = a.eval_at(&f, Some(&fp), x).unwrap();
        assert!((fd2 - exact2).abs() < 1e-5, "ddS at x={x}: {fd2} vs {exact2}");
    }
}

#[test]
fn quadrature_converges_at_second_order() {
    let grid = Grid::symmetric(30.0, 0.0125).unwrap();
    let f = GridFunction::from_fn(grid, |x| 1.0 / (1.0 + x * x)).unwrap();
    let t = 4.0;
    let reference = ConeOperator::solution(t, 0.0125).unwrap();
    let x = 0.5;
    let r = reference.eval_at(&f, None, x).unwrap();
    let e1 = (ConeOperator::solution(t, 0.2).unwrap().eval_at(&f, None, x).unwrap() - r).abs();
    let e2 = (ConeOperator::solution(t, 0.1).unwrap().eval_at(&f, None, x).unwrap() - r).abs();
    assert!(e1 / e2 > 3.0, "{e1} {e2}");
}

#[test]
fn finite_propagation_speed() {
    let grid = Grid::symmetric(20.0, 0.05).unwrap();
    let hat = GridFunction::from_fn(grid, |x| (1.0 - (x - 1.0).abs() / 0.1).max(0.0)).unwrap();
    let t = 3.0;
    let out = apply_s(t, &hat, 0.05).unwrap();
    for (x, v) in out.samples() {
        if (x - 1.0).abs() > t + 0.1 + 1e-9 {
            assert_eq!(v, 0.0, "x={x}");
        }
    }
    assert!(at_origin(&out) > 0.0);
}

#[test]
fn truncation_is_reported() {
    let f = GridFunction::constant(Grid::symmetric(3.0, 0.5).unwrap(), 1.0).unwrap();
    let op = ConeOperator::solution(2.0, 0.1).unwrap();
    assert!(op.eval_at(&f, None, 1.5).is_err());
    assert!(apply_s(4.0, &f, 0.1).is_err());
}

#[test]
fn linear_solution_of_constant_data() {
    let f = ones(7.0);
    for v in linear_solution(7.0, &f, 0.01, 0.01).unwrap().values() {
        assert!((v - 0.01).abs() < 1e-8, "{v}");
    }
}

#[test]
fn linear_solution_lower_bound_against_data() {
    let rho = 1.5;
    let t = 10.0;
    let grid = Grid::symmetric(40.0, 0.05).unwrap();
    let phi = japanese_bracket_profile(rho, grid).unwrap();
    let u = linear_solution(t, &phi, 1.0, 0.05).unwrap();
    let mut c = f64::INFINITY;
    for (x, v) in u.samples() {
        if x.abs() <= 20.0 {
            let p = (1.0 + x * x).powf(-rho / 2.0);
            c = c.min(v / (t.powf(-0.5) * p));
        }
    }
    assert!(c > 0.0 && c.is_finite(), "c = {c}");
}

#[test]
fn lemma_ratios_are_finite_at_t5() {
    let t = 5.0;
    let sigma: f64 = 0.6;
    let grid = Grid::symmetric(30.0, 0.02).unwrap();
    let phi = japanese_bracket_profile(1.5, grid).unwrap();
    let s = apply_s(t, &phi, 0.02).unwrap();
    let ds = apply_dt_s(t, &phi, 0.02).unwrap();
    let dds = apply_dtt_s(t, &phi, None, 0.02).unwrap();
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for ((x, sv), (dv, ddv)) in s.samples().zip(ds.values().iter().zip(dds.values())) {
        if x.abs() <= 20.0 {
            c1 = c1.max(dv.abs() / (t.powf(-2.0 * (1.0 - sigma)) * sv));
            c2 = c2.max(ddv.abs() / (t.powf(-4.0 * (1.0 - sigma)) * sv));
        }
    }
    assert!(c1.is_finite() && c1 > 0.0);
    assert!(c2.is_finite() && c2 > 0.0);
}

proptest! {
    #[test]
    fn solution_operator_preserves_positivity(
        bumps in prop::collection::vec((-8.0f64..8.0, 0.0f64..2.0, 0.1f64..3.0), 1..5),
        t in 0.1f64..6.0,
    ) {
        let grid = Grid::symmetric(16.0, 0.1).unwrap();
        let f = GridFunction::from_fn(grid, |x| {
            bumps.iter().map(|(c, a, w)| a * (-(x - c) * (x - c) / w).exp()).sum()
        }).unwrap();
        let out = apply_s(t, &f, 0.1).unwrap();
        prop_assert!(out.min() >= 0.0);
    }
}
