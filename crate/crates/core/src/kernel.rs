//! The linear damped wave solution operator and its first two time derivatives.
//!
//! With `omega = sqrt(t^2 - y^2)` on the light cone `|y| <= t`:
//!
//! ```text
//! S(t) f(x)      = int K0(t,y) f(x-y) dy,        K0 = e^{-t/2} I0(omega/2) / 2
//! d_t S(t) f(x)  = e^{-t/2} (f(x+t) + f(x-t)) / 2 + int K1(t,y) f(x-y) dy
//! d_t^2 S(t) f(x) = e^{-t/2} (f'(x+t) - f'(x-t)) / 2
//!                + e^{-t/2} (t/16 - 1/2) (f(x+t) + f(x-t)) + int K2(t,y) f(x-y) dy
//! K1 = e^{-t/2} ((t/omega) I1(omega/2) - I0(omega/2)) / 4
//! K2 = e^{-t/2} ( t^2/(16 omega^2) I2 - (t/(4 omega) + y^2/(4 omega^3)) I1
//!                + (1/8 + t^2/(16 omega^2)) I0 )            (Bessel args omega/2)
//! ```
//!
//! `K2` is a sum of terms that blow up like `omega^{-3}` at the cone while the
//! sum stays bounded. Writing `z = omega/2` and using
//! `A = (I0 - 1)/z^2`, `B = (I1/z - 1/2)/z^2`, `C = I2/z^2` (all entire in `z^2`)
//! the divergent parts collapse to `(t^2 - y^2)/(64 z^2) = 1/16`:
//!
//! ```text
//! K2 = e^{-t/2} ( t^2/64 C - t/8 I1/z + I0/8 + t^2/64 A - y^2/32 B + 1/16 )
//! ```
//!
//! Every Bessel factor is evaluated scaled, `e^{-t/2} I_n(z) = e^{(omega-t)/2} e^{-z} I_n(z)`.

use alloc::vec::Vec;

use crate::grid::{Grid, GridFunction};
use crate::math::{abs, ceil, exp, sqrt};
use crate::quadrature::{PointMap, Sequential};
use crate::special::{
    i0_reduced_scaled_unchecked, i0_scaled_unchecked, i1_over_z_scaled_unchecked, i1_reduced_scaled_unchecked,
    i1_scaled_unchecked, i2_reduced_scaled_unchecked, i2_scaled_unchecked,
};
use crate::{Error, Result};

/// Below `omega < CONE_THRESHOLD * max(1, t)` [`k2`] switches from the raw
/// formula to the reduced-series form.
pub const CONE_THRESHOLD: f64 = 1e-3;

/// A point `(t, y)` inside the light cone together with `omega = sqrt(t^2 - y^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCoordinate {
    t: f64,
    y: f64,
    omega: f64,
}

impl ConeCoordinate {
    /// `|y|` may exceed `t` by a relative `1e-12` (rounding in node placement);
    /// such points are moved onto the cone.
    pub fn new(t: f64, y: f64) -> Result<Self> {
        check_time(t)?;
        if !y.is_finite() || abs(y) > t * (1.0 + 1e-12) {
            return Err(Error::Domain {
                what: "cone coordinate needs |y| <= t",
                value: y,
            });
        }
        let a = abs(y).min(t);
        let y = if y < 0.0 { -a } else { a };
        Ok(ConeCoordinate {
            t,
            y,
            omega: sqrt((t - a) * (t + a)),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn near_cone(&self) -> bool {
        self.omega < CONE_THRESHOLD * self.t.max(1.0)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "kernel time must be positive and finite",
            value: t,
        })
    }
}

/// `Some(coordinate)` inside the cone, `None` outside (where kernels vanish).
fn cone(t: f64, y: f64) -> Result<Option<ConeCoordinate>> {
    check_time(t)?;
    if !y.is_finite() {
        return Err(Error::Domain {
            what: "kernel offset must be finite",
            value: y,
        });
    }
    if abs(y) > t * (1.0 + 1e-12) {
        return Ok(None);
    }
    ConeCoordinate::new(t, y).map(Some)
}

fn solution_kernel_at(c: &ConeCoordinate) -> f64 {
    let z = 0.5 * c.omega;
    0.5 * exp(0.5 * (c.omega - c.t)) * i0_scaled_unchecked(z)
}

fn k1_at(c: &ConeCoordinate) -> f64 {
    let z = 0.5 * c.omega;
    let scale = exp(0.5 * (c.omega - c.t));
    0.25 * scale * (0.5 * c.t * i1_over_z_scaled_unchecked(z) - i0_scaled_unchecked(z))
}

fn k2_stabilized_at(c: &ConeCoordinate) -> f64 {
    let (t, y, omega) = (c.t, c.y, c.omega);
    let z = 0.5 * omega;
    let scale = exp(0.5 * (omega - t));
    let t2 = t * t;
    let bessel_part = t2 / 64.0 * i2_reduced_scaled_unchecked(z) - t / 8.0 * i1_over_z_scaled_unchecked(z)
        + i0_scaled_unchecked(z) / 8.0
        + t2 / 64.0 * i0_reduced_scaled_unchecked(z)
        - y * y / 32.0 * i1_reduced_scaled_unchecked(z);
    scale * bessel_part + exp(-0.5 * t) / 16.0
}

fn k2_raw_at(c: &ConeCoordinate) -> f64 {
    let (t, y, omega) = (c.t, c.y, c.omega);
    let z = 0.5 * omega;
    let scale = exp(0.5 * (omega - t));
    let w2 = omega * omega;
    let a = t * t / (16.0 * w2);
    scale
        * (a * i2_scaled_unchecked(z) - (t / (4.0 * omega) + y * y / (4.0 * w2 * omega)) * i1_scaled_unchecked(z)
            + (0.125 + a) * i0_scaled_unchecked(z))
}

/// `e^{-t/2} I0(omega/2) / 2`, the kernel of `S(t)`; zero outside the cone.
pub fn solution_kernel(t: f64, y: f64) -> Result<f64> {
    Ok(cone(t, y)?.map_or(0.0, |c| solution_kernel_at(&c)))
}

/// Kernel of the convolution part of `d_t S(t)`; zero outside the cone.
///
/// Uses `(t/omega) I1(omega/2) = (t/2) I1(z)/z`, which is regular at the cone.
pub fn k1(t: f64, y: f64) -> Result<f64> {
    Ok(cone(t, y)?.map_or(0.0, |c| k1_at(&c)))
}

/// Kernel of the convolution part of `d_t^2 S(t)`; zero outside the cone.
pub fn k2(t: f64, y: f64) -> Result<f64> {
    Ok(cone(t, y)?.map_or(0.0, |c| {
        if c.near_cone() {
            k2_stabilized_at(&c)
        } else {
            k2_raw_at(&c)
        }
    }))
}

/// `K2` from the reduced-series form, valid everywhere inside the cone.
pub fn k2_stabilized(t: f64, y: f64) -> Result<f64> {
    Ok(cone(t, y)?.map_or(0.0, |c| k2_stabilized_at(&c)))
}

/// `K2` from the formula as written, with its `omega^{-3}` cancellation.
/// Requires `omega > 0`.
pub fn k2_raw(t: f64, y: f64) -> Result<f64> {
    match cone(t, y)? {
        None => Ok(0.0),
        Some(c) if c.omega > 0.0 => Ok(k2_raw_at(&c)),
        Some(_) => Err(Error::Domain {
            what: "raw K2 formula is singular on the light cone",
            value: y,
        }),
    }
}

/// `lim_{|y| -> t} K1 = e^{-t/2} (t/4 - 1) / 4`.
pub fn k1_cone_limit(t: f64) -> f64 {
    0.25 * exp(-0.5 * t) * (0.25 * t - 1.0)
}

/// `lim_{|y| -> t} K2 = e^{-t/2} (t^2/256 - t/16 + 3/16)`.
pub fn k2_cone_limit(t: f64) -> f64 {
    exp(-0.5 * t) * (t * t / 256.0 - t / 16.0 + 3.0 / 16.0)
}

/// Which member of the solution-operator family a [`ConeOperator`] represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeOperatorKind {
    /// `S(t)`.
    Solution,
    /// `d_t S(t)`.
    Velocity,
    /// `d_t^2 S(t)`.
    Acceleration,
    /// `eps (S(t) + d_t S(t))`, the linear solution with data `(eps f, 0)`.
    LinearSolution { eps: f64 },
}

/// One of `S(t)`, `d_t S(t)`, `d_t^2 S(t)` discretized for repeated use.
///
/// The trapezoidal rule in `y` uses `m = max(2, ceil(2t / quad_dx))` equal
/// panels on `[-t, t]`, so `+-t` are nodes. Kernel values times weights are
/// precomputed once; evaluating at a point is then one dot product against
/// linearly interpolated data, plus the light-cone boundary terms.
#[derive(Debug, Clone)]
pub struct ConeOperator {
    kind: ConeOperatorKind,
    t: f64,
    /// Node spacing; node `k` sits at `y = -t + k h`.
    h: f64,
    weights: Vec<f64>,
    /// Coefficient of `f(x+t) + f(x-t)`.
    edge_even: f64,
    /// Coefficient of `f'(x+t) - f'(x-t)`.
    edge_odd: f64,
}

impl ConeOperator {
    pub fn new(kind: ConeOperatorKind, t: f64, quad_dx: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain {
                what: "operator time must be nonnegative and finite",
                value: t,
            });
        }
        if !(quad_dx.is_finite() && quad_dx > 0.0) {
            return Err(Error::Domain {
                what: "quadrature spacing must be positive",
                value: quad_dx,
            });
        }
        if let ConeOperatorKind::LinearSolution { eps } = kind {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidParam {
                    name: "eps",
                    value: eps,
                    expected: "eps > 0",
                });
            }
        }
        let decay = exp(-0.5 * t);
        let (edge_even, edge_odd) = match kind {
            ConeOperatorKind::Solution => (0.0, 0.0),
            ConeOperatorKind::Velocity => (0.5 * decay, 0.0),
            ConeOperatorKind::Acceleration => (decay * (t / 16.0 - 0.5), 0.5 * decay),
            ConeOperatorKind::LinearSolution { eps } => (0.5 * eps * decay, 0.0),
        };
        if t == 0.0 {
            return Ok(ConeOperator {
                kind,
                t,
                h: 0.0,
                weights: Vec::new(),
                edge_even,
                edge_odd,
            });
        }
        let m = (ceil(2.0 * t / quad_dx - 1e-9) as usize).max(2);
        let h = 2.0 * t / m as f64;
        let mut weights = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let y = t * (2.0 * k as f64 / m as f64 - 1.0);
            let c = ConeCoordinate::new(t, y)?;
            let kernel = match kind {
                ConeOperatorKind::Solution => solution_kernel_at(&c),
                ConeOperatorKind::Velocity => k1_at(&c),
                ConeOperatorKind::Acceleration => {
                    if c.near_cone() {
                        k2_stabilized_at(&c)
                    } else {
                        k2_raw_at(&c)
                    }
                }
                ConeOperatorKind::LinearSolution { eps } => eps * (solution_kernel_at(&c) + k1_at(&c)),
            };
            let end = if k == 0 || k == m { 0.5 } else { 1.0 };
            weights.push(end * h * kernel);
        }
        Ok(ConeOperator {
            kind,
            t,
            h,
            weights,
            edge_even,
            edge_odd,
        })
    }

    pub fn solution(t: f64, quad_dx: f64) -> Result<Self> {
        ConeOperator::new(ConeOperatorKind::Solution, t, quad_dx)
    }

    pub fn velocity(t: f64, quad_dx: f64) -> Result<Self> {
        ConeOperator::new(ConeOperatorKind::Velocity, t, quad_dx)
    }

    pub fn acceleration(t: f64, quad_dx: f64) -> Result<Self> {
        ConeOperator::new(ConeOperatorKind::Acceleration, t, quad_dx)
    }

    pub fn linear_solution(t: f64, eps: f64, quad_dx: f64) -> Result<Self> {
        ConeOperator::new(ConeOperatorKind::LinearSolution { eps }, t, quad_dx)
    }

    pub fn kind(&self) -> ConeOperatorKind {
        self.kind
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Distance from an output point to the farthest data sample used.
    pub fn reach(&self) -> f64 {
        self.t
    }

    /// Number of quadrature nodes (zero at `t = 0`).
    pub fn nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn needs_derivative(&self) -> bool {
        self.edge_odd != 0.0
    }

    /// Value at a single point `x`.
    ///
    /// `f_prime` is required by `d_t^2 S` and ignored otherwise. Data needed
    /// beyond the grid is reported as [`Error::Truncation`].
    pub fn eval_at(&self, f: &GridFunction, f_prime: Option<&GridFunction>, x: f64) -> Result<f64> {
        let grid = f.grid();
        let slack = 1e-9 * grid.dx();
        if !(x - self.t >= grid.x0() - slack && x + self.t <= grid.x_last() + slack) {
            return Err(Error::Truncation {
                x,
                reach: self.t,
                lo: grid.x0(),
                hi: grid.x_last(),
            });
        }
        let mut acc = 0.0;
        if !self.weights.is_empty() {
            acc = f.strided_dot(x + self.t, self.h, &self.weights)?;
        }
        if self.edge_even != 0.0 {
            acc += self.edge_even * (f.interpolate(x + self.t)? + f.interpolate(x - self.t)?);
        }
        if self.edge_odd != 0.0 {
            let d = f_prime.ok_or(Error::Domain {
                what: "second time derivative needs the data derivative",
                value: x,
            })?;
            if !d.grid().same_as(grid) {
                return Err(Error::GridMismatch);
            }
            acc += self.edge_odd * (d.interpolate(x + self.t)? - d.interpolate(x - self.t)?);
        }
        Ok(acc)
    }

    /// Values at every node of `target`.
    pub fn apply_on<M: PointMap + ?Sized>(
        &self,
        f: &GridFunction,
        f_prime: Option<&GridFunction>,
        target: &Grid,
        exec: &M,
    ) -> Result<GridFunction> {
        let derivative;
        let f_prime = match (self.needs_derivative(), f_prime) {
            (true, None) => {
                derivative = f.centered_derivative();
                Some(&derivative)
            }
            (_, d) => d,
        };
        let values = exec.map_points(target.len(), &|i| self.eval_at(f, f_prime, target.x(i)))?;
        GridFunction::new(*target, values)
    }

    /// Values on the largest subgrid of `f`'s grid whose points are at least
    /// `t` from both ends. A missing `f_prime` is replaced by centered
    /// differences of `f`.
    pub fn apply_with<M: PointMap + ?Sized>(
        &self,
        f: &GridFunction,
        f_prime: Option<&GridFunction>,
        exec: &M,
    ) -> Result<GridFunction> {
        let target = output_grid(f.grid(), self.t)?;
        self.apply_on(f, f_prime, &target, exec)
    }

    pub fn apply(&self, f: &GridFunction, f_prime: Option<&GridFunction>) -> Result<GridFunction> {
        self.apply_with(f, f_prime, &Sequential)
    }
}

/// Nodes of `grid` at distance at least `reach` from both ends.
pub fn output_grid(grid: &Grid, reach: f64) -> Result<Grid> {
    if reach == 0.0 {
        return Ok(*grid);
    }
    grid.interior(reach)
}

/// `S(t) f` on the interior subgrid of `f` at distance `t` from the ends.
pub fn apply_s(t: f64, f: &GridFunction, quad_dx: f64) -> Result<GridFunction> {
    ConeOperator::solution(t, quad_dx)?.apply(f, None)
}

/// `d_t S(t) f`, see [`apply_s`] for the output grid.
pub fn apply_dt_s(t: f64, f: &GridFunction, quad_dx: f64) -> Result<GridFunction> {
    ConeOperator::velocity(t, quad_dx)?.apply(f, None)
}

/// `d_t^2 S(t) f`; without `f_prime` the data derivative is taken by centered differences.
pub fn apply_dtt_s(t: f64, f: &GridFunction, f_prime: Option<&GridFunction>, quad_dx: f64) -> Result<GridFunction> {
    ConeOperator::acceleration(t, quad_dx)?.apply(f, f_prime)
}

/// `eps (S(t) phi + d_t S(t) phi)`, the linear solution with data `(eps phi, 0)`.
pub fn linear_solution(t: f64, phi: &GridFunction, eps: f64, quad_dx: f64) -> Result<GridFunction> {
    ConeOperator::linear_solution(t, eps, quad_dx)?.apply(phi, None)
}

/// `S(t)(u0 + u1) + d_t S(t) u0`, the linear solution with data `(u0, u1)`.
pub fn free_solution(t: f64, u0: &GridFunction, u1: &GridFunction, quad_dx: f64) -> Result<GridFunction> {
    free_solution_with(t, u0, u1, quad_dx, &Sequential)
}

/// [`free_solution`] with an explicit point executor.
pub fn free_solution_with<M: PointMap + ?Sized>(
    t: f64,
    u0: &GridFunction,
    u1: &GridFunction,
    quad_dx: f64,
    exec: &M,
) -> Result<GridFunction> {
    let sum = u0.zip_with(u1, |a, b| a + b)?;
    let s = ConeOperator::solution(t, quad_dx)?.apply_with(&sum, None, exec)?;
    let v = ConeOperator::velocity(t, quad_dx)?.apply_with(u0, None, exec)?;
    s.zip_with(&v, |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_identity() {
        let c = ConeCoordinate::new(3.0, -1.2).unwrap();
        assert!((c.omega() * c.omega() + c.y() * c.y() - 9.0).abs() < 1e-12 * 9.0);
        assert!(ConeCoordinate::new(3.0, 3.5).is_err());
        assert!(ConeCoordinate::new(0.0, 0.0).is_err());
    }

    #[test]
    fn kernels_vanish_outside_cone() {
        assert_eq!(k1(1.0, 1.5).unwrap(), 0.0);
        assert_eq!(k2(1.0, -1.5).unwrap(), 0.0);
        assert_eq!(solution_kernel(1.0, 2.0).unwrap(), 0.0);
        assert!(k1(0.0, 0.0).is_err());
        assert!(k2(-1.0, 0.0).is_err());
    }

    #[test]
    fn cone_values() {
        for t in [0.5, 1.0, 5.0, 20.0] {
            assert!((k1(t, t).unwrap() - k1_cone_limit(t)).abs() <= 1e-15 * k1_cone_limit(t).abs().max(1e-300));
            let k = k2(t, t).unwrap();
            assert!((k - k2_cone_limit(t)).abs() <= 1e-14 * k2_cone_limit(t).abs());
        }
    }

    #[test]
    fn raw_and_stabilized_agree_away_from_cone() {
        for (t, y) in [(10.0, 0.0), (10.0, 6.0), (2.0, 1.0), (40.0, 39.0)] {
            let a = k2_raw(t, y).unwrap();
            let b = k2_stabilized(t, y).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{t} {y}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_time_operators() {
        let g = Grid::symmetric(2.0, 0.5).unwrap();
        let f = GridFunction::from_fn(g, |x| 1.0 + x * x).unwrap();
        let s = apply_s(0.0, &f, 0.1).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
        let v = apply_dt_s(0.0, &f, 0.1).unwrap();
        assert_eq!(v.values(), f.values());
        let u = linear_solution(0.0, &f, 0.3, 0.1).unwrap();
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - 0.3 * b).abs() < 1e-15);
        }
    }
}
