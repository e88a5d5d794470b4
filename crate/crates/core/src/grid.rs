//! Uniform 1D grids, immutable grid functions and `L^q` norms.

use alloc::vec::Vec;

use crate::math::{abs, ceil, floor, powf, round};
use crate::{Error, Result};

/// Relative slack (in units of `dx`) used when deciding whether a point lies
/// on or inside a grid.
const POINT_SLACK: f64 = 1e-9;

/// Uniform grid `x_j = x0 + j dx`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x0: f64,
    dx: f64,
    n: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidGrid("left endpoint must be finite"));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid("spacing must be positive and finite"));
        }
        if n < 2 {
            return Err(Error::InvalidGrid("a grid needs at least two points"));
        }
        Ok(Grid { x0, dx, n })
    }

    /// Grid symmetric about the origin with `x = 0` as a node. The half-width
    /// is rounded up to a whole number of cells.
    pub fn symmetric(half_width: f64, dx: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid("half-width must be positive and finite"));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid("spacing must be positive and finite"));
        }
        let m = ceil(half_width / dx - POINT_SLACK) as usize;
        let m = m.max(1);
        Grid::new(-(m as f64) * dx, dx, 2 * m + 1)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a grid has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_last(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Whether two grids describe the same nodes (up to rounding).
    pub fn same_as(&self, other: &Grid) -> bool {
        let tol = POINT_SLACK * self.dx;
        self.n == other.n && abs(self.x0 - other.x0) <= tol && abs(self.dx - other.dx) <= tol
    }

    /// Index of the node at `x`, if `x` is a node.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let s = (x - self.x0) / self.dx;
        let j = round(s);
        if abs(s - j) > POINT_SLACK * 1e3 || j < 0.0 || j > (self.n - 1) as f64 {
            None
        } else {
            Some(j as usize)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let s = (x - self.x0) / self.dx;
        s >= -POINT_SLACK && s <= (self.n - 1) as f64 + POINT_SLACK
    }

    /// Contiguous run of `len` nodes starting at `start`.
    pub fn subgrid(&self, start: usize, len: usize) -> Result<Grid> {
        if start + len > self.n {
            return Err(Error::InvalidGrid("subgrid exceeds parent grid"));
        }
        Grid::new(self.x(start), self.dx, len)
    }

    /// Nodes whose distance to both ends is at least `margin`, as
    /// `(first index, count)`.
    pub fn interior_range(&self, margin: f64) -> Result<(usize, usize)> {
        let k = ceil(margin / self.dx - POINT_SLACK).max(0.0) as usize;
        if 2 * k + 2 > self.n {
            return Err(Error::Truncation {
                x: 0.5 * (self.x0 + self.x_last()),
                reach: margin,
                lo: self.x0,
                hi: self.x_last(),
            });
        }
        Ok((k, self.n - 2 * k))
    }

    /// Interior subgrid at distance `margin` from both ends.
    pub fn interior(&self, margin: f64) -> Result<Grid> {
        let (start, len) = self.interior_range(margin)?;
        self.subgrid(start, len)
    }

    /// Linear interpolation stencil `(j, theta)` with
    /// `f(x) ~ (1 - theta) v_j + theta v_{j+1}`.
    #[inline]
    pub(crate) fn stencil(&self, x: f64) -> Option<(usize, f64)> {
        let s = (x - self.x0) / self.dx;
        let last = (self.n - 1) as f64;
        if !(s >= -POINT_SLACK && s <= last + POINT_SLACK) {
            return None;
        }
        let s = s.clamp(0.0, last);
        let j = floor(s).min(last - 1.0);
        Some((j as usize, s - j))
    }
}

/// A real function sampled on a [`Grid`]. Values are finite and immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        GridFunction::new(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        GridFunction::new(grid, alloc::vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: alloc::vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(x_j, v_j)` pairs.
    pub fn samples(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(j, &v)| (self.grid.x(j), v))
    }

    /// Linear interpolation; points off the grid are a truncation error.
    #[inline]
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        match self.grid.stencil(x) {
            Some((j, theta)) => Ok(self.lerp(j, theta)),
            None => Err(Error::Truncation {
                x,
                reach: 0.0,
                lo: self.grid.x0(),
                hi: self.grid.x_last(),
            }),
        }
    }

    #[inline]
    pub(crate) fn lerp(&self, j: usize, theta: f64) -> f64 {
        if theta == 0.0 {
            self.values[j]
        } else {
            (1.0 - theta) * self.values[j] + theta * self.values[j + 1]
        }
    }

    /// `sum_k w_k f(start - k h)` with linear interpolation between nodes.
    ///
    /// When the sample points coincide with grid nodes the values are read
    /// directly, which makes aligned convolutions exact in the data.
    pub(crate) fn strided_dot(&self, start: f64, h: f64, weights: &[f64]) -> Result<f64> {
        if weights.is_empty() {
            return Ok(0.0);
        }
        let grid = &self.grid;
        let dx = grid.dx();
        let s0 = (start - grid.x0()) / dx;
        let j0 = round(s0);
        let r = h / dx;
        let step = round(r);
        let span = (weights.len() - 1) as f64 * step;
        if abs(s0 - j0) < 1e-7 && abs(r - step) < 1e-9 && step >= 1.0 && j0 >= span && j0 < grid.len() as f64 {
            let (j0, step) = (j0 as usize, step as usize);
            let v = &self.values;
            return Ok(weights.iter().enumerate().map(|(k, w)| w * v[j0 - k * step]).sum());
        }
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let x = start - k as f64 * h;
            let (j, theta) = grid.stencil(x).ok_or(Error::Truncation {
                x,
                reach: 0.0,
                lo: grid.x0(),
                hi: grid.x_last(),
            })?;
            acc += w * self.lerp(j, theta);
        }
        Ok(acc)
    }

    /// Second-order centered differences inside, second-order one-sided
    /// differences at the two ends.
    pub fn centered_derivative(&self) -> GridFunction {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.dx();
        let mut d = alloc::vec![0.0; n];
        if n == 2 {
            let s = (v[1] - v[0]) / h;
            d[0] = s;
            d[1] = s;
        } else {
            for j in 1..n - 1 {
                d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
            }
            d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        }
        GridFunction {
            grid: self.grid,
            values: d,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<GridFunction> {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridFunction::new(self.grid, values)
    }

    /// Samples of `self` at the nodes of `target`, which must lie inside
    /// `self`'s grid. Exact when the nodes coincide.
    pub fn resample(&self, target: &Grid) -> Result<GridFunction> {
        let values = target
            .points()
            .map(|x| self.interpolate(x))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(*target, values)
    }

    /// Values at the nodes of `target`, which must be a node-aligned part of
    /// `self`'s grid. Values are copied, not interpolated.
    pub fn restrict(&self, target: &Grid) -> Result<GridFunction> {
        if abs(target.dx() - self.grid.dx()) > POINT_SLACK * self.grid.dx() {
            return Err(Error::GridMismatch);
        }
        let start = self.grid.index_of(target.x0()).ok_or(Error::GridMismatch)?;
        if start + target.len() > self.len() {
            return Err(Error::GridMismatch);
        }
        GridFunction::new(*target, self.values[start..start + target.len()].to_vec())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(abs(v)))
    }
}

/// Integrability exponent `q` of an `L^q` norm. `q = infinity` is a
/// distinct variant rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LqExponent {
    Finite(f64),
    Infinity,
}

impl LqExponent {
    /// Accepts any `q >= 1`; `f64::INFINITY` maps to [`LqExponent::Infinity`].
    pub fn new(q: f64) -> Result<Self> {
        if q == f64::INFINITY {
            Ok(LqExponent::Infinity)
        } else if q.is_finite() && q >= 1.0 {
            Ok(LqExponent::Finite(q))
        } else {
            Err(Error::Domain {
                what: "norm exponent must satisfy q >= 1",
                value: q,
            })
        }
    }

    /// `q` as a float, `f64::INFINITY` for the sup norm.
    pub fn as_f64(self) -> f64 {
        match self {
            LqExponent::Finite(q) => q,
            LqExponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/q`, zero for the sup norm.
    pub fn reciprocal(self) -> f64 {
        match self {
            LqExponent::Finite(q) => 1.0 / q,
            LqExponent::Infinity => 0.0,
        }
    }
}

impl core::fmt::Display for LqExponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LqExponent::Finite(q) => write!(f, "{q}"),
            LqExponent::Infinity => f.write_str("inf"),
        }
    }
}

/// `(int |f|^q dx)^{1/q}` by the trapezoidal rule, or `max |f|` for `q = inf`.
pub fn lq_norm(f: &GridFunction, q: LqExponent) -> f64 {
    lq_norm_of_slice(f.values(), f.grid().dx(), q)
}

/// [`lq_norm`] on raw samples with spacing `dx`.
pub fn lq_norm_of_slice(values: &[f64], dx: f64, q: LqExponent) -> f64 {
    match q {
        LqExponent::Infinity => values.iter().fold(0.0, |m, &v| m.max(abs(v))),
        LqExponent::Finite(q) => {
            let integral = trapezoid_power(values, dx, q);
            if q == 1.0 {
                integral
            } else {
                powf(integral, 1.0 / q)
            }
        }
    }
}

/// `int |f|^q dx` by the trapezoidal rule.
pub fn trapezoid_power(values: &[f64], dx: f64, q: f64) -> f64 {
    let pw = |v: f64| {
        let a = abs(v);
        if q == 1.0 {
            a
        } else if q == 2.0 {
            a * a
        } else {
            powf(a, q)
        }
    };
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().map(|&v| pw(v)).sum();
    dx * (inner + 0.5 * (pw(values[0]) + pw(values[n - 1])))
}

/// `<x>^{-rho} = (1 + x^2)^{-rho/2}` sampled on `grid`.
pub fn japanese_bracket_profile(rho: f64, grid: Grid) -> Result<GridFunction> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParam {
            name: "rho",
            value: rho,
            expected: "rho > 0",
        });
    }
    GridFunction::from_fn(grid, |x| japanese_bracket(rho, x))
}

/// `<x>^{-rho}` at a single point.
#[inline]
pub fn japanese_bracket(rho: f64, x: f64) -> f64 {
    powf(1.0 + x * x, -0.5 * rho)
}

/// Bound on `int_{|x| > x_max} <x>^{-q rho} dx`, namely `2 x_max^{1 - q rho} / (q rho - 1)`.
///
/// `None` when `q rho <= 1` (the tail is not integrable). For the sup norm
/// the tail does not contribute and the bound is zero.
pub fn bracket_tail_bound(rho: f64, q: LqExponent, x_max: f64) -> Option<f64> {
    match q {
        LqExponent::Infinity => Some(0.0),
        LqExponent::Finite(q) => {
            let s = q * rho;
            if s <= 1.0 || x_max <= 0.0 {
                None
            } else {
                Some(2.0 * powf(x_max, 1.0 - s) / (s - 1.0))
            }
        }
    }
}

/// Value of an `L^q` norm of `<x>^{-rho}` data truncated to a grid, with the
/// analytic bound on the discarded tail of `int |f|^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNorm {
    pub value: f64,
    pub tail_bound: Option<f64>,
}

/// `L^q` norm of `<x>^{-rho}` on `grid` together with [`bracket_tail_bound`]
/// at the smaller of the two grid half-widths.
pub fn bracket_lq_norm(rho: f64, q: LqExponent, grid: Grid) -> Result<TruncatedNorm> {
    let f = japanese_bracket_profile(rho, grid)?;
    let x_max = abs(grid.x0()).min(abs(grid.x_last()));
    Ok(TruncatedNorm {
        value: lq_norm(&f, q),
        tail_bound: bracket_tail_bound(rho, q, x_max),
    })
}
