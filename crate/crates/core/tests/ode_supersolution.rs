use dampwave_core::ode::{absorption_flow, OdeSupersolution, OdeSupersolutionParams};
use proptest::prelude::*;

/// Radical-inverse (Halton) sequence; deterministic stand-in for random points.
fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn close(fd: f64, exact: f64, scale: f64) -> bool {
    (fd - exact).abs() <= 1e-6 * exact.abs().max(scale)
}

#[test]
fn derivatives_match_finite_differences() {
    let (ht, he) = (1e-5, 1e-6);
    for i in 1..=100u64 {
        let p = 1.2 + 1.7 * halton(i, 2);
        let alpha = 0.05 + 0.95 * halton(i, 3);
        let t = 10f64.powf(-1.0 + 4.0 * halton(i, 5));
        let h = OdeSupersolution::new(p, alpha).unwrap();
        let eps = (0.01 + 0.99 * halton(i, 7)).min(h.max_eps());
        let d = h.derivatives(t, eps);
        let val = h.value(t, eps);

        let fd_t = (h.value(t + ht, eps) - h.value(t - ht, eps)) / (2.0 * ht);
        let fd_e = (h.value(t, eps + he) - h.value(t, eps - he)) / (2.0 * he);
        let fd_te = (h.derivatives(t + ht, eps).deps - h.derivatives(t - ht, eps).deps) / (2.0 * ht);
        let fd_ee = (h.derivatives(t, eps + he).deps - h.derivatives(t, eps - he).deps) / (2.0 * he);
        let fd_tt = (h.derivatives(t + ht, eps).dt - h.derivatives(t - ht, eps).dt) / (2.0 * ht);

        // Each scale is the size of the terms that cancel inside the exact value.
        let g = h.decay(t, eps);
        let r = (g / eps).powf(p - 1.0) / eps;
        let rate = h.decay_rate() * g.powf(p - 1.0);
        let scale_t = (rate + 1.0) * val * 1e-3;
        assert!(close(fd_t, d.dt, scale_t), "dt at {i}: {fd_t} vs {}", d.dt);
        assert!(close(fd_e, d.deps, 0.0), "deps at {i}");
        assert!(
            close(fd_te, d.dt_deps, r * val * 1e-3),
            "dt_deps at {i}: {fd_te} vs {}",
            d.dt_deps
        );
        assert!(
            close(fd_ee, d.deps2, p * r * r * val),
            "deps2 at {i}: {fd_ee} vs {}",
            d.deps2
        );
        assert!(
            close(fd_tt, d.dt2, d.dt.abs() * 1e-3),
            "dt2 at {i}: {fd_tt} vs {}",
            d.dt2
        );
    }
}

fn log_times() -> Vec<f64> {
    let mut ts = vec![0.0];
    for k in 0..63 {
        ts.push(10f64.powf(-3.0 + 7.0 * k as f64 / 62.0));
    }
    ts
}

#[test]
fn residual_sweep_is_nonnegative() {
    for p in [1.5, 2.0, 2.5, 3.0] {
        for alpha in [0.25, 0.5, 1.0] {
            for eps in [1e-3, 1e-2] {
                let params = OdeSupersolutionParams::new(p, alpha, eps).unwrap();
                let h = params.family();
                for t in log_times() {
                    let r = h.residuals(t, eps);
                    assert!(r.main >= 0.0, "main p={p} a={alpha} e={eps} t={t}: {}", r.main);
                    assert!(r.halfdamp >= 0.0, "half p={p} a={alpha} e={eps} t={t}");
                }
            }
        }
    }
}

#[test]
fn spec_examples() {
    let h = OdeSupersolution::new(2.0, 1.0).unwrap();
    assert!((h.value(0.0, 0.1) - 0.1).abs() < 1e-16);
    let dt0 = h.derivatives(0.0, 0.1).dt;
    assert!((dt0 - (0.025 - 0.01 / 6.0)).abs() < 1e-15);
    let r = h.residuals(0.0, 0.01);
    let expected = 0.01 * (0.5 + 0.25) - 1e-4 / 6.0;
    assert!((r.halfdamp - expected).abs() < 1e-16);
    assert!((h.decay(6.0, 1.0) - 0.5).abs() < 1e-15);
    // Large-time asymptotics of g.
    for p in [1.5f64, 2.0, 2.5] {
        let f = OdeSupersolution::new(p, 1.0).unwrap();
        let t = 1e6;
        let c = (p * (p + 1.0) / ((p - 1.0) * (p - 1.0))).powf(1.0 / (p - 1.0));
        assert!((f.decay(t, 1.0) / (c * t.powf(-1.0 / (p - 1.0))) - 1.0).abs() < 0.01);
    }
    assert!((h.weight(1e6) - 2.0).abs() < 1e-3);
    // (p-1)/(p(p+1)) peaks at p = 1 + sqrt(2) with value about 0.17.
    let peak = OdeSupersolution::new(1.0 + 2f64.sqrt(), 1.0).unwrap().decay_rate();
    assert!((peak - 0.1716).abs() < 1e-3);
    for k in 1..200 {
        let p = 1.0 + 2.0 * k as f64 / 200.0;
        assert!(OdeSupersolution::new(p, 1.0).unwrap().decay_rate() <= peak + 1e-15);
    }
}

/// Classical RK4 for `f'' + f' + f^p = 0`.
fn rk4(f0: f64, v0: f64, p: f64, dt: f64, steps: usize) -> Vec<f64> {
    let rhs = |f: f64, v: f64| (v, -v - f.abs().powf(p - 1.0) * f);
    let (mut f, mut v) = (f0, v0);
    let mut out = vec![f];
    for _ in 0..steps {
        let (a1, b1) = rhs(f, v);
        let (a2, b2) = rhs(f + 0.5 * dt * a1, v + 0.5 * dt * b1);
        let (a3, b3) = rhs(f + 0.5 * dt * a2, v + 0.5 * dt * b2);
        let (a4, b4) = rhs(f + dt * a3, v + dt * b3);
        f += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        out.push(f);
    }
    out
}

#[test]
fn supersolution_dominates_ode_solution() {
    let h = OdeSupersolution::new(2.0, 1.0).unwrap();
    let eps = 0.01;
    let dt = 1e-2;
    // Same initial value, smaller initial velocity.
    let path = rk4(eps, 0.0, 2.0, dt, 100_000);
    for (k, f) in path.iter().enumerate() {
        let t = k as f64 * dt;
        assert!(*f <= h.value(t, eps) * (1.0 + 1e-9), "t={t}");
    }
}

proptest! {
    #[test]
    fn bounds_and_concavity(p in 1.05f64..3.0, alpha in 0.01f64..1.0, t in 0.0f64..1e5, e in 1e-6f64..1.0) {
        let h = OdeSupersolution::new(p, alpha).unwrap();
        let eps = e * h.max_eps();
        prop_assert!(h.decay(t, eps) <= eps);
        prop_assert!(h.value(t, eps) <= 2f64.powf(1.0 / (p - 1.0)) * eps * (1.0 + 1e-14));
        prop_assert!(h.derivatives(t, eps).deps2 <= 0.0);
        let (dw, ddw) = h.weight_derivatives(t);
        prop_assert!(dw > 0.0);
        prop_assert!(dw + ddw >= 0.0);
    }

    #[test]
    fn weight_is_increasing(p in 1.05f64..3.5, alpha in 0.1f64..1.0, t in 0.0f64..1e4, dt in 1e-3f64..10.0) {
        let h = OdeSupersolution::new(p, alpha).unwrap();
        prop_assert!(h.weight(t + dt) > h.weight(t));
        prop_assert!(h.weight(t) >= 1.0 - 1e-15);
    }

    #[test]
    fn absorption_flow_semigroup(p in 1.1f64..3.5, f in 0.0f64..10.0, s in 0.0f64..100.0, t in 0.0f64..100.0) {
        let a = absorption_flow(t, absorption_flow(s, f, p), p);
        let b = absorption_flow(t + s, f, p);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn absorption_flow_monotone(p in 1.1f64..3.5, f in 1e-6f64..10.0, df in 1e-6f64..1.0, t in 0.0f64..100.0) {
        prop_assert!(absorption_flow(t, f + df, p) > absorption_flow(t, f, p));
        prop_assert!(absorption_flow(t + 1.0, f, p) < absorption_flow(t, f, p));
        prop_assert!(absorption_flow(t, f, p) <= f);
    }
}
