//! Theorem-level checks: profile conditions on the data, decay fits, the
//! pullback supersolution bound, the a priori sandwich, ordered-data
//! comparison and the kernel ratio estimates.

use alloc::string::String;
use alloc::vec::Vec;

use crate::grid::{bracket_tail_bound, japanese_bracket, trapezoid_power, Grid, GridFunction, LqExponent};
use crate::heat::HeatOperator;
use crate::kernel::ConeOperator;
use crate::math::{abs, ceil, exp, ln, powf, sqrt};
use crate::ode::OdeSupersolution;
use crate::quadrature::PointMap;
use crate::solver::{init_state, safe_half_width, simulate, Snapshot, SolverConfig, Trajectory};
use crate::{CheckReport, Error, Result};

// ---------------------------------------------------------------------------
// Decay fits

/// Least-squares slope of `log norm` against `log t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub q: Option<LqExponent>,
    pub window: (f64, f64),
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub target: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn with_q(mut self, q: LqExponent) -> Self {
        self.q = Some(q);
        self
    }

    pub fn deviation(&self) -> f64 {
        self.slope - self.target
    }

    pub fn within(&self, tolerance: f64) -> bool {
        abs(self.deviation()) <= tolerance
    }
}

/// Fit over the samples with `t` in `window` (inclusive).
pub fn fit_decay(t_list: &[f64], norms: &[f64], window: (f64, f64), target: f64) -> Result<DecayFit> {
    if t_list.len() != norms.len() {
        return Err(Error::Fit("times and norms differ in length"));
    }
    if !(window.0 > 0.0 && window.0 < window.1) {
        return Err(Error::Fit("degenerate fit window"));
    }
    let slack = 1e-12 * window.1;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &n) in t_list.iter().zip(norms) {
        if t >= window.0 - slack && t <= window.1 + slack {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Domain {
                    what: "norms must be positive and finite",
                    value: n,
                });
            }
            xs.push(ln(t));
            ys.push(ln(n));
        }
    }
    let k = xs.len();
    if k < 3 {
        return Err(Error::Fit("fewer than three samples in the window"));
    }
    let mx = xs.iter().sum::<f64>() / k as f64;
    let my = ys.iter().sum::<f64>() / k as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all samples at one time"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    Ok(DecayFit {
        q: None,
        window,
        slope,
        slope_stderr: sqrt(ssr / (k - 2).max(1) as f64 / sxx),
        intercept,
        target,
        samples: k,
    })
}

/// `n` times spaced evenly in `log t` on `[a, b]`, endpoints included.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![a];
    }
    let (la, lb) = (ln(a), ln(b));
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                exp(la + (lb - la) * k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Domination

#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub max_ratio: f64,
    pub argmax: (f64, f64),
    /// Number of points with `u / bound > 1 + tolerance`.
    pub violations: usize,
    pub tolerance: f64,
    pub points: usize,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn snapshot_times_match(a: f64, b: f64) -> bool {
    abs(a - b) <= 1e-9 * a.max(1.0)
}

/// `max u / bound` over matching snapshots. A zero bound counts as ratio
/// zero where `u <= 0` and infinite otherwise.
pub fn check_domination(u: &[Snapshot], bound: &[Snapshot], tolerance: f64) -> Result<DominationReport> {
    if u.len() != bound.len() {
        return Err(Error::SnapshotMismatch);
    }
    let mut report = DominationReport {
        max_ratio: f64::NEG_INFINITY,
        argmax: (0.0, 0.0),
        violations: 0,
        tolerance,
        points: 0,
    };
    for (a, b) in u.iter().zip(bound) {
        if !snapshot_times_match(a.t, b.t) {
            return Err(Error::SnapshotMismatch);
        }
        if !a.u.grid().same_as(b.u.grid()) {
            return Err(Error::GridMismatch);
        }
        for (j, (&uv, &bv)) in a.u.values().iter().zip(b.u.values()).enumerate() {
            let ratio = if bv > 0.0 {
                uv / bv
            } else if uv <= 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            if ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.argmax = (a.t, a.u.grid().x(j));
            }
            if ratio > 1.0 + tolerance {
                report.violations += 1;
            }
            report.points += 1;
        }
    }
    if report.points == 0 {
        report.max_ratio = 0.0;
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Profile conditions

/// Empirical constants of the four structural conditions on a data profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiConstants {
    /// `sup phi(x) / inf_{|y-x|<1} phi(y)`.
    pub local: f64,
    /// `sup phi(x) / inf_{|y|<2|x|} phi(y)`.
    pub dilation: f64,
    /// `sup |phi'(x)| / phi(x)`.
    pub log_derivative: f64,
    /// `(delta, sup e^{-delta|x|} / phi(x))` for `delta = 0.1, 0.5, 1`.
    pub exponential: [(f64, f64); 3],
}

impl PhiConstants {
    fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("local", self.local),
            ("dilation", self.dilation),
            ("log-derivative", self.log_derivative),
            ("exponential(0.1)", self.exponential[0].1),
            ("exponential(0.5)", self.exponential[1].1),
            ("exponential(1)", self.exponential[2].1),
        ]
    }
}

/// Constants over the whole grid and over its inner half, and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiConditions {
    pub full: PhiConstants,
    pub inner: PhiConstants,
    pub failed: Vec<&'static str>,
    pub report: CheckReport,
}

/// A constant counts as finite when doubling the window grows it by less than this.
pub const PHI_GROWTH_LIMIT: f64 = 1.5;

pub const EXPONENTIAL_RATES: [f64; 3] = [0.1, 0.5, 1.0];

fn phi_constants(phi: &GridFunction, in_window: impl Fn(f64) -> bool) -> PhiConstants {
    let grid = phi.grid();
    let v = phi.values();
    let n = v.len();
    let dx = grid.dx();

    // Nodes strictly inside (x-1, x+1).
    let k = (ceil(1.0 / dx - 1e-9) as usize).saturating_sub(1);
    // Running minimum of phi over |y| < r, ordered by |y|.
    let mut by_radius: Vec<(f64, f64)> = (0..n).map(|j| (abs(grid.x(j)), v[j])).collect();
    by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut running = Vec::with_capacity(n);
    let mut m = f64::INFINITY;
    for &(_, val) in &by_radius {
        m = m.min(val);
        running.push(m);
    }
    let d = phi.centered_derivative();

    let mut c = PhiConstants {
        local: 0.0,
        dilation: 0.0,
        log_derivative: 0.0,
        exponential: [
            (EXPONENTIAL_RATES[0], 0.0),
            (EXPONENTIAL_RATES[1], 0.0),
            (EXPONENTIAL_RATES[2], 0.0),
        ],
    };
    for j in 0..n {
        let x = grid.x(j);
        if !in_window(x) {
            continue;
        }
        let lo = j.saturating_sub(k);
        let hi = (j + k).min(n - 1);
        let local_min = v[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
        c.local = c.local.max(v[j] / local_min);
        if x != 0.0 {
            let r = 2.0 * abs(x);
            let count = by_radius.partition_point(|e| e.0 < r);
            if count > 0 {
                c.dilation = c.dilation.max(v[j] / running[count - 1]);
            }
        }
        c.log_derivative = c.log_derivative.max(abs(d.values()[j]) / v[j]);
        for e in &mut c.exponential {
            e.1 = e.1.max(exp(-e.0 * abs(x)) / v[j]);
        }
    }
    c
}

/// Measures the four profile conditions. On a finite grid every constant is
/// finite, so a condition is declared to fail when its constant over the
/// full grid exceeds [`PHI_GROWTH_LIMIT`] times its value over the inner half
/// of the grid (a constant that keeps growing with the window).
pub fn check_phi_conditions(phi: &GridFunction) -> Result<PhiConditions> {
    if let Some(j) = phi.values().iter().position(|&v| v <= 0.0) {
        return Err(Error::Domain {
            what: "profile must be positive",
            value: phi.values()[j],
        });
    }
    let grid = phi.grid();
    let center = 0.5 * (grid.x0() + grid.x_last());
    let half = 0.5 * (grid.x_last() - grid.x0());
    let full = phi_constants(phi, |_| true);
    let inner = phi_constants(phi, |x| abs(x - center) <= 0.5 * half);
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    for ((name, f), (_, i)) in full.entries().into_iter().zip(inner.entries()) {
        let growth = if i > 0.0 {
            f / i
        } else if f > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        worst = worst.max(growth);
        if !(growth <= PHI_GROWTH_LIMIT) {
            failed.push(name);
        }
    }
    let largest = full.entries().iter().map(|e| e.1).fold(0.0, f64::max);
    let mut name = String::from("profile conditions");
    if !failed.is_empty() {
        name.push_str(" (failed:");
        for f in &failed {
            name.push(' ');
            name.push_str(f);
        }
        name.push(')');
    }
    let report = CheckReport::new(name, failed.is_empty(), worst, (0.0, grid.x_last()), Some(largest));
    Ok(PhiConditions {
        full,
        inner,
        failed,
        report,
    })
}

// ---------------------------------------------------------------------------
// Main bound

fn check_nonnegative(f: &GridFunction, what: &'static str) -> Result<()> {
    match f.values().iter().find(|&&v| v < 0.0) {
        Some(&v) => Err(Error::Domain { what, value: v }),
        None => Ok(()),
    }
}

/// `(u_L^{p-1} / ((t+t0) u_L^{p-1} + 1))^{1/(p-1)}` with `u_L` evaluated at time `t + t0`.
pub fn main_theorem_bound(t: f64, u_l_at_shift: &GridFunction, t0: f64, p: f64) -> Result<GridFunction> {
    if !(t >= 0.0 && t0 >= 0.0) {
        return Err(Error::Domain {
            what: "t and t0 must be nonnegative",
            value: t.min(t0),
        });
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParam {
            name: "p",
            value: p,
            expected: "p > 1",
        });
    }
    check_nonnegative(u_l_at_shift, "linear solution must be nonnegative")?;
    let s = t + t0;
    u_l_at_shift.map(|v| {
        if v > 0.0 {
            v * powf(1.0 + s * powf(v, p - 1.0), -1.0 / (p - 1.0))
        } else {
            0.0
        }
    })
}

/// `H(t + t0, u_L(t + t0, x))`, the ODE supersolution pulled back through the linear solution.
pub fn main_theorem_pullback(
    t: f64,
    u_l_at_shift: &GridFunction,
    t0: f64,
    family: &OdeSupersolution,
) -> Result<GridFunction> {
    check_nonnegative(u_l_at_shift, "linear solution must be nonnegative")?;
    u_l_at_shift.map(|v| family.value(t + t0, v))
}

// ---------------------------------------------------------------------------
// A priori bounds

/// `int_{x0}^{x}` of the piecewise-linear interpolant, evaluated exactly.
struct RunningIntegral<'a> {
    f: &'a GridFunction,
    cumulative: Vec<f64>,
}

impl<'a> RunningIntegral<'a> {
    fn new(f: &'a GridFunction) -> Self {
        let v = f.values();
        let dx = f.grid().dx();
        let mut cumulative = Vec::with_capacity(v.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for j in 1..v.len() {
            acc += 0.5 * dx * (v[j - 1] + v[j]);
            cumulative.push(acc);
        }
        RunningIntegral { f, cumulative }
    }

    fn at(&self, x: f64) -> Result<f64> {
        let grid = self.f.grid();
        let (j, theta) = grid.stencil(x).ok_or(Error::Truncation {
            x,
            reach: 0.0,
            lo: grid.x0(),
            hi: grid.x_last(),
        })?;
        let v = self.f.values();
        let s = theta * grid.dx();
        Ok(self.cumulative[j] + v[j] * s + 0.5 * (v[j + 1] - v[j]) * s * theta)
    }
}

/// `e^{-t/2} (u0(x+t) + u0(x-t))/2 + e^{-t/2}/2 int_{x-t}^{x+t} (u1 + u0/2)` on `target`.
pub fn apriori_lower_bound(t: f64, u0: &GridFunction, u1: &GridFunction, target: &Grid) -> Result<GridFunction> {
    let mix = u1.zip_with(u0, |b, a| b + 0.5 * a)?;
    let integral = RunningIntegral::new(&mix);
    let d = exp(-0.5 * t);
    let values = target
        .points()
        .map(|x| {
            let edge = 0.5 * d * (u0.interpolate(x + t)? + u0.interpolate(x - t)?);
            Ok(edge + 0.5 * d * (integral.at(x + t)? - integral.at(x - t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(*target, values)
}

/// `S(t)(u0 + u1) + d_t S(t) u0` on `target`: the linear solution, an upper bound for `u`.
pub fn apriori_upper_bound<M: PointMap + ?Sized>(
    t: f64,
    u0: &GridFunction,
    u1: &GridFunction,
    quad_dx: f64,
    target: &Grid,
    exec: &M,
) -> Result<GridFunction> {
    let sum = u0.zip_with(u1, |a, b| a + b)?;
    let s = ConeOperator::solution(t, quad_dx)?.apply_on(&sum, None, target, exec)?;
    let v = ConeOperator::velocity(t, quad_dx)?.apply_on(u0, None, target, exec)?;
    s.zip_with(&v, |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    /// `max (lower - u)` and where.
    pub lower_excess: f64,
    pub lower_at: (f64, f64),
    /// `max (u - upper)` and where.
    pub upper_excess: f64,
    pub upper_at: (f64, f64),
    pub report: CheckReport,
}

/// Checks `lower <= u <= upper` at every snapshot over `|x| <= x_obs`;
/// excesses up to `tolerance` are accepted.
pub fn apriori_sandwich<M: PointMap + ?Sized>(
    snapshots: &[Snapshot],
    u0: &GridFunction,
    u1: &GridFunction,
    x_obs: f64,
    quad_dx: f64,
    tolerance: f64,
    exec: &M,
) -> Result<SandwichReport> {
    let obs = Grid::symmetric(x_obs, u0.grid().dx())?;
    let mut out = SandwichReport {
        lower_excess: f64::NEG_INFINITY,
        lower_at: (0.0, 0.0),
        upper_excess: f64::NEG_INFINITY,
        upper_at: (0.0, 0.0),
        report: CheckReport::new("a priori sandwich", true, 0.0, (0.0, 0.0), None),
    };
    for snap in snapshots {
        let u = snap.u.restrict(&obs)?;
        let lower = apriori_lower_bound(snap.t, u0, u1, &obs)?;
        let upper = apriori_upper_bound(snap.t, u0, u1, quad_dx, &obs, exec)?;
        for j in 0..obs.len() {
            let x = obs.x(j);
            let (uv, lv, hv) = (u.values()[j], lower.values()[j], upper.values()[j]);
            if lv - uv > out.lower_excess {
                out.lower_excess = lv - uv;
                out.lower_at = (snap.t, x);
            }
            if uv - hv > out.upper_excess {
                out.upper_excess = uv - hv;
                out.upper_at = (snap.t, x);
            }
        }
    }
    let (worst, at) = if out.lower_excess >= out.upper_excess {
        (out.lower_excess, out.lower_at)
    } else {
        (out.upper_excess, out.upper_at)
    };
    out.report = CheckReport::new("a priori sandwich", worst <= tolerance, worst, at, None);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Comparison

/// The upper side of a comparison run.
#[derive(Debug, Clone, Copy)]
pub enum UpperSide<'a> {
    /// A second PDE run from the given data.
    Evolved { u0: &'a GridFunction, u1: &'a GridFunction },
    /// The spatially constant ODE supersolution `H(t, eps)`.
    Ode { family: OdeSupersolution, eps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// `max (u_low - u_high)` over all steps and `|x| <= x_obs`.
    pub max_excess: f64,
    pub at: (f64, f64),
    /// `4p sup (u_low + u_high)^{p-1}` over the run; the comparison argument needs `<= 1`.
    pub smallness: f64,
    pub report: CheckReport,
}

fn check_ordered(low: &[f64], high: &[f64], grid: &Grid) -> Result<()> {
    for (j, (a, b)) in low.iter().zip(high).enumerate() {
        if a > b {
            return Err(Error::Ordering { index: j, x: grid.x(j) });
        }
    }
    Ok(())
}

/// Runs the lower data (and the upper data, if evolved) and records the
/// largest violation of `u_low <= u_high` on `|x| <= x_obs`.
pub fn comparison_experiment(
    u0_low: &GridFunction,
    u1_low: &GridFunction,
    upper: UpperSide<'_>,
    cfg: &SolverConfig,
    x_obs: f64,
    tolerance: f64,
) -> Result<ComparisonReport> {
    let cfg = cfg.clone().with_sign_check(true);
    let grid = cfg.grid;
    let p = cfg.p;
    let damped_low: Vec<f64> = u1_low
        .values()
        .iter()
        .zip(u0_low.values())
        .map(|(b, a)| b + 0.5 * a)
        .collect();
    let window: Vec<usize> = (0..grid.len()).filter(|&j| abs(grid.x(j)) <= x_obs + 1e-9).collect();
    if window.is_empty() {
        return Err(Error::InvalidGrid("observation window contains no nodes"));
    }

    let mut low = init_state(u0_low, u1_low, &cfg)?;
    let mut max_excess = f64::NEG_INFINITY;
    let mut at = (0.0, 0.0);
    let mut sup_sum = 0.0f64;
    let mut record = |t: f64, lo: &[f64], hi: &dyn Fn(usize) -> f64| {
        for &j in &window {
            let h = hi(j);
            let d = lo[j] - h;
            if d > max_excess {
                max_excess = d;
                at = (t, grid.x(j));
            }
            sup_sum = sup_sum.max(lo[j] + h);
        }
    };
    let steps = cfg.steps();
    match upper {
        UpperSide::Evolved { u0, u1 } => {
            check_ordered(u0_low.values(), u0.values(), &grid)?;
            let damped_high: Vec<f64> = u1.values().iter().zip(u0.values()).map(|(b, a)| b + 0.5 * a).collect();
            check_ordered(&damped_low, &damped_high, &grid)?;
            let mut high = init_state(u0, u1, &cfg)?;
            record(0.0, u0_low.values(), &|j| u0.values()[j]);
            loop {
                let (lc, hc) = (low.current_values(), high.current_values());
                record(low.t(), lc, &|j| hc[j]);
                if low.step_index() >= steps {
                    break;
                }
                low.advance(&cfg)?;
                high.advance(&cfg)?;
            }
        }
        UpperSide::Ode { family, eps } => {
            let h0 = family.value(0.0, eps);
            let dh0 = family.derivatives(0.0, eps).dt;
            let high0 = alloc::vec![h0; grid.len()];
            check_ordered(u0_low.values(), &high0, &grid)?;
            check_ordered(&damped_low, &alloc::vec![dh0 + 0.5 * h0; grid.len()], &grid)?;
            record(0.0, u0_low.values(), &|_| h0);
            loop {
                let h = family.value(low.t(), eps);
                record(low.t(), low.current_values(), &|_| h);
                if low.step_index() >= steps {
                    break;
                }
                low.advance(&cfg)?;
            }
        }
    }
    let smallness = 4.0 * p * powf(sup_sum.max(0.0), p - 1.0);
    let report = CheckReport::new(
        "comparison ordering",
        max_excess <= tolerance,
        max_excess,
        at,
        Some(smallness),
    );
    Ok(ComparisonReport {
        max_excess,
        at,
        smallness,
        report,
    })
}

// ---------------------------------------------------------------------------
// Kernel ratio estimates

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRatios {
    /// `(t, sup |d_t S phi| / (t^{-2(1-sigma)} S phi), sup |d_t^2 S phi| / (t^{-4(1-sigma)} S phi))`.
    pub rows: Vec<(f64, f64, f64)>,
    pub report: CheckReport,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sup over the output grid of the two time-derivative ratios, per `t`.
/// Passes when neither sequence has a maximum above ten times its median.
pub fn kernel_lemma_ratios<M: PointMap + ?Sized>(
    phi: &GridFunction,
    sigma: f64,
    t_list: &[f64],
    quad_dx: f64,
    exec: &M,
) -> Result<LemmaRatios> {
    if !(sigma > 0.5 && sigma < 1.0) {
        return Err(Error::InvalidParam {
            name: "sigma",
            value: sigma,
            expected: "1/2 < sigma < 1",
        });
    }
    if t_list.is_empty() {
        return Err(Error::Fit("no times given"));
    }
    if let Some(&t) = t_list.iter().find(|&&t| !(t >= 2.0)) {
        return Err(Error::Domain {
            what: "ratio times must be at least 2",
            value: t,
        });
    }
    if !check_phi_conditions(phi)?.report.passed {
        return Err(Error::Domain {
            what: "profile fails the structural conditions",
            value: 0.0,
        });
    }
    let derivative = phi.centered_derivative();
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let s = ConeOperator::solution(t, quad_dx)?.apply_with(phi, None, exec)?;
        let v = ConeOperator::velocity(t, quad_dx)?.apply_with(phi, None, exec)?;
        let a = ConeOperator::acceleration(t, quad_dx)?.apply_with(phi, Some(&derivative), exec)?;
        let (w1, w2) = (powf(t, -2.0 * (1.0 - sigma)), powf(t, -4.0 * (1.0 - sigma)));
        let mut r1 = 0.0f64;
        let mut r2 = 0.0f64;
        for j in 0..s.len() {
            let sv = s.values()[j];
            r1 = r1.max(abs(v.values()[j]) / (w1 * sv));
            r2 = r2.max(abs(a.values()[j]) / (w2 * sv));
        }
        rows.push((t, r1, r2));
    }
    let mut first: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let mut second: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let max1 = first.iter().copied().fold(0.0, f64::max);
    let max2 = second.iter().copied().fold(0.0, f64::max);
    let spread = (max1 / median(&mut first)).max(max2 / median(&mut second));
    let worst_t = rows
        .iter()
        .max_by(|a, b| (a.1 / max1).max(a.2 / max2).total_cmp(&(b.1 / max1).max(b.2 / max2)))
        .map_or(0.0, |r| r.0);
    let report = CheckReport::new(
        "kernel derivative ratios",
        spread <= 10.0,
        spread,
        (worst_t, 0.0),
        Some(max1.max(max2)),
    );
    Ok(LemmaRatios { rows, report })
}

/// `C = max S(t) phi / e^{t Delta} phi` over the points both operators can reach.
pub fn heat_domination_constant<M: PointMap + ?Sized>(
    phi: &GridFunction,
    t_list: &[f64],
    quad_dx: f64,
    exec: &M,
) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    let mut at = (0.0, 0.0);
    for &t in t_list {
        let cone = ConeOperator::solution(t, quad_dx)?;
        let heat = HeatOperator::new(t, quad_dx)?;
        let target = phi.grid().interior(cone.reach().max(heat.reach()))?;
        let s = cone.apply_on(phi, None, &target, exec)?;
        let h = heat.apply_on(phi, &target, exec)?;
        for j in 0..target.len() {
            let r = s.values()[j] / h.values()[j];
            if r > worst {
                worst = r;
                at = (t, target.x(j));
            }
        }
    }
    Ok(CheckReport::new(
        "wave-to-heat domination",
        worst.is_finite(),
        worst,
        at,
        Some(worst),
    ))
}

// ---------------------------------------------------------------------------
// Main-theorem experiment

#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremConfig {
    pub p: f64,
    pub rho: f64,
    pub alpha: f64,
    pub eps: f64,
    pub t0_sweep: Vec<f64>,
    pub dx: f64,
    pub dt: f64,
    pub x_obs: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub tolerance: f64,
}

impl Default for MainTheoremConfig {
    fn default() -> Self {
        let mut snapshot_times = alloc::vec![0.0, 1.0, 5.0];
        snapshot_times.extend((1..=20).map(|k| 10.0 * k as f64));
        MainTheoremConfig {
            p: 2.0,
            rho: 1.5,
            alpha: 1.0,
            eps: 0.01,
            t0_sweep: alloc::vec![10.0, 50.0, 200.0],
            dx: 0.05,
            dt: 0.045,
            x_obs: 200.0,
            t_final: 200.0,
            snapshot_times,
            tolerance: 1e-2,
        }
    }
}

/// The nonlinear run shared by every `t0` of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremRun {
    pub trajectory: Trajectory,
    pub u0: GridFunction,
    pub u1: GridFunction,
    pub observation: Grid,
}

/// Simulates data `(eps <x>^{-rho}, 0)` on a domain wide enough that the
/// boundary never reaches `|x| <= x_obs`.
pub fn run_main_simulation(cfg: &MainTheoremConfig) -> Result<MainTheoremRun> {
    let half = safe_half_width(cfg.x_obs, cfg.t_final, cfg.dt, cfg.dx);
    let grid = Grid::symmetric(half, cfg.dx)?;
    let u0 = GridFunction::from_fn(grid, |x| cfg.eps * japanese_bracket(cfg.rho, x))?;
    let u1 = GridFunction::zeros(grid);
    let solver = SolverConfig::new(grid, cfg.t_final, cfg.p, true)?
        .with_dt(cfg.dt)?
        .with_snapshots(cfg.snapshot_times.clone())?
        .with_sign_check(true);
    let trajectory = simulate(&u0, &u1, &solver)?;
    Ok(MainTheoremRun {
        trajectory,
        u0,
        u1,
        observation: Grid::symmetric(cfg.x_obs, cfg.dx)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOutcome {
    pub t0: f64,
    /// `max u0 / B(0, .)` over the observation window.
    pub calibration: f64,
    /// `u / B` without calibration.
    pub raw: DominationReport,
    /// `u / (calibration B)`.
    pub calibrated: DominationReport,
    /// Range of `H(t+t0, u_L) / B` over all checked points.
    pub pullback_ratio: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremOutcome {
    pub shifts: Vec<ShiftOutcome>,
    pub smallest_passing: Option<f64>,
    pub min_value_seen: f64,
    pub report: CheckReport,
}

/// For each `t0`, compares the run against the bound built from `u_L(t + t0)`.
pub fn main_theorem_experiment<M: PointMap + ?Sized>(
    cfg: &MainTheoremConfig,
    run: &MainTheoremRun,
    exec: &M,
) -> Result<MainTheoremOutcome> {
    let family = OdeSupersolution::new(cfg.p, cfg.alpha)?;
    let obs = run.observation;
    let t0_max = cfg.t0_sweep.iter().copied().fold(0.0, f64::max);
    let data_grid = Grid::symmetric(cfg.x_obs + cfg.t_final + t0_max + 2.0 * cfg.dx, cfg.dx)?;
    let phi = GridFunction::from_fn(data_grid, |x| japanese_bracket(cfg.rho, x))?;
    let u_obs: Vec<Snapshot> = run
        .trajectory
        .snapshots
        .iter()
        .map(|s| {
            Ok(Snapshot {
                requested: s.requested,
                t: s.t,
                u: s.u.restrict(&obs)?,
            })
        })
        .collect::<Result<_>>()?;
    let initial = run.u0.restrict(&obs)?;

    let mut shifts = Vec::with_capacity(cfg.t0_sweep.len());
    for &t0 in &cfg.t0_sweep {
        let bound_at = |t: f64| -> Result<(GridFunction, GridFunction)> {
            let u_l = ConeOperator::linear_solution(t + t0, cfg.eps, cfg.dx)?.apply_on(&phi, None, &obs, exec)?;
            Ok((
                main_theorem_bound(t, &u_l, t0, cfg.p)?,
                main_theorem_pullback(t, &u_l, t0, &family)?,
            ))
        };
        let (b0, _) = bound_at(0.0)?;
        let calibration = initial
            .values()
            .iter()
            .zip(b0.values())
            .map(|(u, b)| u / b)
            .fold(0.0, f64::max);
        let mut raw_bounds = Vec::with_capacity(u_obs.len());
        let mut scaled_bounds = Vec::with_capacity(u_obs.len());
        let mut pull = (f64::INFINITY, 0.0f64);
        for s in &u_obs {
            let (b, h) = bound_at(s.t)?;
            for (hv, bv) in h.values().iter().zip(b.values()) {
                let r = hv / bv;
                pull = (pull.0.min(r), pull.1.max(r));
            }
            scaled_bounds.push(Snapshot {
                requested: s.requested,
                t: s.t,
                u: b.scale(calibration)?,
            });
            raw_bounds.push(Snapshot {
                requested: s.requested,
                t: s.t,
                u: b,
            });
        }
        shifts.push(ShiftOutcome {
            t0,
            calibration,
            raw: check_domination(&u_obs, &raw_bounds, cfg.tolerance)?,
            calibrated: check_domination(&u_obs, &scaled_bounds, cfg.tolerance)?,
            pullback_ratio: pull,
        });
    }
    let smallest_passing = shifts
        .iter()
        .filter(|s| s.calibrated.passed())
        .map(|s| s.t0)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))));
    let best = shifts
        .iter()
        .min_by(|a, b| a.calibrated.max_ratio.total_cmp(&b.calibrated.max_ratio))
        .ok_or(Error::Fit("empty shift sweep"))?;
    let report = CheckReport::new(
        "main bound domination",
        smallest_passing.is_some(),
        best.calibrated.max_ratio,
        best.calibrated.argmax,
        Some(best.calibration),
    );
    Ok(MainTheoremOutcome {
        shifts,
        smallest_passing,
        min_value_seen: run.trajectory.min_value_seen,
        report,
    })
}

// ---------------------------------------------------------------------------
// Decay rates of the PDE solution

#[derive(Debug, Clone, PartialEq)]
pub struct RatesConfig {
    pub p: f64,
    pub rho: f64,
    pub eps: f64,
    pub dx: f64,
    pub dt: f64,
    pub x_obs: f64,
    pub times: Vec<f64>,
    pub qs: Vec<LqExponent>,
    pub window: (f64, f64),
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig {
            p: 2.0,
            rho: 1.5,
            eps: 0.5,
            dx: 0.2,
            dt: 0.18,
            x_obs: 1500.0,
            times: log_spaced(100.0, 1000.0, 9),
            qs: alloc::vec![LqExponent::Finite(1.0), LqExponent::Finite(2.0), LqExponent::Infinity],
            window: (100.0, 1000.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatesOutcome {
    /// `(t, q, norm)`; finite-`q` norms include the data tail beyond `x_obs`.
    pub norms: Vec<(f64, LqExponent, f64)>,
    pub fits: Vec<DecayFit>,
    pub min_value_seen: f64,
}

/// `||u(t)||_q` from a run with data `(eps <x>^{-rho}, 0)` and the fitted
/// slopes against `1/(q rho (p-1)) - 1/(p-1)`.
///
/// For finite `q` the integral over `|x| > x_obs` is replaced by the
/// corresponding integral of the data, `eps^q 2 x_obs^{1 - q rho} / (q rho - 1)`,
/// which bounds it since `0 <= u <= S(t) + d_t S(t)` of the data there.
pub fn rates_experiment(cfg: &RatesConfig) -> Result<RatesOutcome> {
    let t_final = cfg.times.iter().copied().fold(0.0, f64::max);
    let half = safe_half_width(cfg.x_obs, t_final, cfg.dt, cfg.dx);
    let grid = Grid::symmetric(half, cfg.dx)?;
    let u0 = GridFunction::from_fn(grid, |x| cfg.eps * japanese_bracket(cfg.rho, x))?;
    let u1 = GridFunction::zeros(grid);
    let solver = SolverConfig::new(grid, t_final, cfg.p, true)?
        .with_dt(cfg.dt)?
        .with_snapshots(cfg.times.clone())?
        .with_sign_check(true);
    let trajectory = simulate(&u0, &u1, &solver)?;
    let obs = Grid::symmetric(cfg.x_obs, cfg.dx)?;
    let mut norms = Vec::new();
    let mut fits = Vec::new();
    for &q in &cfg.qs {
        let mut ts = Vec::new();
        let mut ns = Vec::new();
        for s in &trajectory.snapshots {
            let u = s.u.restrict(&obs)?;
            let n = match q {
                LqExponent::Infinity => u.max_abs(),
                LqExponent::Finite(qf) => {
                    let tail = bracket_tail_bound(cfg.rho, q, cfg.x_obs).ok_or(Error::InvalidParam {
                        name: "q",
                        value: qf,
                        expected: "q rho > 1",
                    })?;
                    powf(
                        trapezoid_power(u.values(), cfg.dx, qf) + powf(cfg.eps, qf) * tail,
                        1.0 / qf,
                    )
                }
            };
            norms.push((s.t, q, n));
            ts.push(s.t);
            ns.push(n);
        }
        let inv_q = q.reciprocal();
        let target = inv_q / (cfg.rho * (cfg.p - 1.0)) - 1.0 / (cfg.p - 1.0);
        // Snapshot times sit within dt/2 of the requested ones.
        let window = (cfg.window.0 - cfg.dt, cfg.window.1 + cfg.dt);
        fits.push(fit_decay(&ts, &ns, window, target)?.with_q(q));
    }
    Ok(RatesOutcome {
        norms,
        fits,
        min_value_seen: trajectory.min_value_seen,
    })
}
