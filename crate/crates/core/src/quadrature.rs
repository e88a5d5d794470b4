//! Quadrature helpers and the per-point evaluation hook.

use alloc::vec::Vec;

use crate::math::powf;
use crate::{Error, Result};

/// Maps an index range through a fallible pointwise function.
///
/// Operators in this crate evaluate each output point independently. They
/// hand that loop to a `PointMap` so callers with threads can run it in
/// parallel. Implementations must return results in index order; with that
/// the output does not depend on scheduling.
pub trait PointMap {
    fn map_points(&self, n: usize, f: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Result<Vec<f64>>;
}

/// Plain loop on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PointMap for Sequential {
    fn map_points(&self, n: usize, f: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Result<Vec<f64>> {
        (0..n).map(f).collect()
    }
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Composite five-point Gauss-Legendre rule for `int_a^b f`.
///
/// The endpoints are never sampled, so integrable endpoint singularities
/// and removable `0/0` limits are harmless.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            sum += weight * f(mid + 0.5 * h * node);
        }
    }
    0.5 * h * sum
}

/// `int_{x_start}^inf f(x) dx` for `f` decaying like `x^{-decay}`, `decay > 1`.
///
/// The substitution `x = x_start s^{-k}` with `k = 1/(decay - 1)` maps the
/// half-line onto `(0, 1]` and turns an exact power law into a constant, so a
/// modest number of panels is accurate for anything asymptotically algebraic.
pub fn algebraic_tail_integral(f: impl Fn(f64) -> f64, x_start: f64, decay: f64, panels: usize) -> Result<f64> {
    if !(decay.is_finite() && decay > 1.0) {
        return Err(Error::Domain {
            what: "tail integral needs algebraic decay faster than 1/x",
            value: decay,
        });
    }
    if !(x_start.is_finite() && x_start > 0.0) {
        return Err(Error::Domain {
            what: "tail integral needs a positive start point",
            value: x_start,
        });
    }
    let k = 1.0 / (decay - 1.0);
    let g = |s: f64| {
        let x = x_start * powf(s, -k);
        f(x) * x * k / s
    };
    Ok(gauss_legendre(g, 0.0, 1.0, panels))
}

/// Trapezoidal rule on arbitrary (sorted) abscissae.
pub fn trapezoid_nonuniform(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Domain {
            what: "abscissae and values differ in length",
            value: y.len() as f64,
        });
    }
    Ok(x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_degree_nine() {
        let f = |x: f64| powf(x, 9.0) - 3.0 * x * x;
        let v = gauss_legendre(f, 0.0, 2.0, 1);
        let exact = 1024.0 / 10.0 - 8.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn tail_of_pure_power_law() {
        let v = algebraic_tail_integral(|x| powf(x, -2.5), 10.0, 2.5, 4).unwrap();
        let exact = powf(10.0, -1.5) / 1.5;
        assert!((v / exact - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tail_of_bracket_profile() {
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let v = algebraic_tail_integral(f, 100.0, 2.0, 64).unwrap();
        let exact = core::f64::consts::FRAC_PI_2 - libm::atan(100.0);
        assert!((v / exact - 1.0).abs() < 1e-12);
    }
}
