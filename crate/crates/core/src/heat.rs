//! Heat semigroup, the heat supersolution `G(t, e^{t Delta} phi)` and its `L^q` decay.
//!
//! `G(t, f) = ((p-1) t + f^{1-p})^{-1/(p-1)}` is the flow of `G' = -G^p`.
//! Since `G` is increasing and concave in `f`, composing it with the heat
//! flow of `phi` gives a supersolution of `v_t - v_xx + v^p = 0`.

use alloc::vec::Vec;

use crate::analysis::{fit_decay, DecayFit};
use crate::grid::{japanese_bracket, Grid, GridFunction, LqExponent};
use crate::math::{ceil, erfc, exp, ln, powf, sqrt};
use crate::ode::absorption_flow;
use crate::quadrature::{algebraic_tail_integral, trapezoid_nonuniform, PointMap, Sequential};
use crate::{CheckReport, Error, Result};

/// Half-width of the Gaussian quadrature window in units of `sqrt(t)`.
pub const HEAT_WINDOW: f64 = 8.0;

/// `e^{t Delta}` discretized for repeated use.
///
/// Nodes `y = -R + k h`, `R = m h`, `m = ceil(8 sqrt(t) / quad_dx)`. The
/// sampled Gaussian weights are rescaled to sum to one, so constants are
/// reproduced exactly and mass is conserved up to the grid truncation; the
/// Gaussian mass cut off outside the window is [`HeatOperator::tail_mass`].
#[derive(Debug, Clone)]
pub struct HeatOperator {
    t: f64,
    h: f64,
    reach: f64,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl HeatOperator {
    pub fn new(t: f64, quad_dx: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain {
                what: "heat time must be nonnegative and finite",
                value: t,
            });
        }
        if !(quad_dx.is_finite() && quad_dx > 0.0) {
            return Err(Error::Domain {
                what: "quadrature spacing must be positive",
                value: quad_dx,
            });
        }
        if t == 0.0 {
            return Ok(HeatOperator {
                t,
                h: quad_dx,
                reach: 0.0,
                weights: alloc::vec![1.0],
                tail_mass: 0.0,
            });
        }
        let sd = sqrt(t);
        if quad_dx > 2.0 * sd {
            return Err(Error::Domain {
                what: "quadrature spacing does not resolve the heat kernel (needs quad_dx <= 2 sqrt(t))",
                value: quad_dx,
            });
        }
        let m = ceil(HEAT_WINDOW * sd / quad_dx - 1e-9) as usize;
        let reach = m as f64 * quad_dx;
        let mut weights: Vec<f64> = (0..=2 * m)
            .map(|k| {
                let y = (k as f64 - m as f64) * quad_dx;
                exp(-y * y / (4.0 * t))
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Ok(HeatOperator {
            t,
            h: quad_dx,
            reach,
            weights,
            tail_mass: erfc(reach / (2.0 * sd)),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Distance from an output point to the farthest data sample used.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Gaussian mass outside the quadrature window, `erfc(R / (2 sqrt t))`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn eval_at(&self, f: &GridFunction, x: f64) -> Result<f64> {
        let grid = f.grid();
        let slack = 1e-9 * grid.dx();
        if !(x - self.reach >= grid.x0() - slack && x + self.reach <= grid.x_last() + slack) {
            return Err(Error::Truncation {
                x,
                reach: self.reach,
                lo: grid.x0(),
                hi: grid.x_last(),
            });
        }
        f.strided_dot(x + self.reach, self.h, &self.weights)
    }

    /// Heat flow of a function given in closed form.
    pub fn eval_fn(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let start = x + self.reach;
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * f(start - k as f64 * self.h))
            .sum()
    }

    pub fn apply_on<M: PointMap + ?Sized>(&self, f: &GridFunction, target: &Grid, exec: &M) -> Result<GridFunction> {
        let values = exec.map_points(target.len(), &|i| self.eval_at(f, target.x(i)))?;
        GridFunction::new(*target, values)
    }

    /// Values on the largest subgrid of `f`'s grid at distance `reach` from the ends.
    pub fn apply_with<M: PointMap + ?Sized>(&self, f: &GridFunction, exec: &M) -> Result<GridFunction> {
        let target = if self.reach == 0.0 {
            *f.grid()
        } else {
            f.grid().interior(self.reach)?
        };
        self.apply_on(f, &target, exec)
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply_with(f, &Sequential)
    }
}

fn check_nonnegative(f: &GridFunction) -> Result<()> {
    if let Some(index) = f.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Domain {
            what: "heat data must be nonnegative",
            value: f.values()[index],
        });
    }
    Ok(())
}

/// `e^{t Delta} f` on the interior of `f`'s grid.
pub fn heat_apply(t: f64, f: &GridFunction, quad_dx: f64) -> Result<GridFunction> {
    check_nonnegative(f)?;
    HeatOperator::new(t, quad_dx)?.apply(f)
}

/// `G(t, e^{t Delta} phi)` on the interior of `phi`'s grid.
pub fn heat_supersolution(t: f64, phi: &GridFunction, p: f64, quad_dx: f64) -> Result<GridFunction> {
    heat_supersolution_with(t, phi, p, quad_dx, &Sequential)
}

pub fn heat_supersolution_with<M: PointMap + ?Sized>(
    t: f64,
    phi: &GridFunction,
    p: f64,
    quad_dx: f64,
    exec: &M,
) -> Result<GridFunction> {
    check_p(p)?;
    check_nonnegative(phi)?;
    HeatOperator::new(t, quad_dx)?
        .apply_with(phi, exec)?
        .map(|v| absorption_flow(t, v, p))
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name: "p",
            value: p,
            expected: "p > 1",
        })
    }
}

/// Settings of the discrete supersolution residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatResidualConfig {
    pub dx: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub x_max: f64,
    /// Residuals down to `-tolerance` are accepted as discretization error.
    pub tolerance: f64,
}

impl Default for HeatResidualConfig {
    /// `dx = 0.05`, `dt = 1e-3`, nine log-spaced times in `[1, 100]`, `|x| <= 50`.
    fn default() -> Self {
        HeatResidualConfig {
            dx: 0.05,
            dt: 1e-3,
            times: (0..9).map(|k| powf(10.0, k as f64 / 4.0)).collect(),
            x_max: 50.0,
            tolerance: 1e-4,
        }
    }
}

/// Half-width a data grid needs for [`heat_residual_check`] to avoid truncation.
pub fn heat_residual_data_half_width(cfg: &HeatResidualConfig) -> f64 {
    let t_max = cfg.times.iter().copied().fold(0.0, f64::max) + cfg.dt;
    cfg.x_max + 2.0 * cfg.dx + HEAT_WINDOW * sqrt(t_max) + 2.0 * cfg.dx
}

/// Minimum over `times x {|x| <= x_max}` of the centered-difference residual
/// `G*_t - G*_xx + (G*)^p`. `phi` must be sampled with spacing `cfg.dx`.
pub fn heat_residual_check<M: PointMap + ?Sized>(
    phi: &GridFunction,
    p: f64,
    cfg: &HeatResidualConfig,
    exec: &M,
) -> Result<CheckReport> {
    check_p(p)?;
    check_nonnegative(phi)?;
    let dx = cfg.dx;
    if (phi.grid().dx() - dx).abs() > 1e-12 * dx {
        return Err(Error::GridMismatch);
    }
    let j_mid = phi
        .grid()
        .index_of(0.0)
        .ok_or(Error::InvalidGrid("data grid must contain x = 0"))?;
    let half = ceil(cfg.x_max / dx - 1e-9) as usize + 1;
    if half > j_mid {
        return Err(Error::Truncation {
            x: cfg.x_max,
            reach: 0.0,
            lo: phi.grid().x0(),
            hi: phi.grid().x_last(),
        });
    }
    let target = phi.grid().subgrid(j_mid - half, 2 * half + 1)?;
    let mut worst = f64::INFINITY;
    let mut at = (0.0, 0.0);
    for &t in &cfg.times {
        if t - cfg.dt <= 0.0 {
            return Err(Error::Domain {
                what: "residual times must exceed dt",
                value: t,
            });
        }
        let level = |s: f64| -> Result<GridFunction> {
            HeatOperator::new(s, dx)?
                .apply_on(phi, &target, exec)?
                .map(|v| absorption_flow(s, v, p))
        };
        let before = level(t - cfg.dt)?;
        let now = level(t)?;
        let after = level(t + cfg.dt)?;
        let (b, n, a) = (before.values(), now.values(), after.values());
        for j in 1..n.len() - 1 {
            let x = target.x(j);
            if x.abs() > cfg.x_max + 1e-9 {
                continue;
            }
            let dt_term = (a[j] - b[j]) / (2.0 * cfg.dt);
            let lap = (n[j + 1] - 2.0 * n[j] + n[j - 1]) / (dx * dx);
            let r = dt_term - lap + powf(n[j], p);
            if r < worst {
                worst = r;
                at = (t, x);
            }
        }
    }
    Ok(CheckReport::new(
        "heat supersolution residual",
        worst >= -cfg.tolerance,
        worst,
        at,
        None,
    ))
}

/// Sampling plan for `||G*(t)||_q` with closed-form `<x>^{-rho}` data.
///
/// For each `t` the half-line is covered by a uniform core `[0, W]`,
/// `W = core_width sqrt(t)`, and a log-spaced outer part `[W, X]`,
/// `X = max(W, reach t^{1/(rho(p-1))})`. Beyond `X` the integral is done by
/// [`algebraic_tail_integral`]. All of these scale with `t`, so the relative
/// resolution does not degrade over many decades.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateGrid {
    pub core_width: f64,
    pub core_points: usize,
    pub outer_points: usize,
    pub reach: f64,
    /// Gaussian quadrature nodes per unit `sqrt(t)`.
    pub heat_nodes_per_sd: f64,
    pub tail_panels: usize,
}

impl Default for RateGrid {
    fn default() -> Self {
        RateGrid {
            core_width: 20.0,
            core_points: 4000,
            outer_points: 4000,
            reach: 60.0,
            heat_nodes_per_sd: 50.0,
            tail_panels: 16,
        }
    }
}

/// `||G(t, e^{t Delta} <.>^{-rho})||_q` for each `q`, at a single `t`.
pub fn heat_supersolution_norms<M: PointMap + ?Sized>(
    p: f64,
    rho: f64,
    qs: &[LqExponent],
    t: f64,
    plan: &RateGrid,
    exec: &M,
) -> Result<Vec<f64>> {
    check_p(p)?;
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::InvalidParam {
            name: "rho",
            value: rho,
            expected: "rho > 1",
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain {
            what: "rate times must be positive",
            value: t,
        });
    }
    let sd = sqrt(t);
    let heat = HeatOperator::new(t, sd / plan.heat_nodes_per_sd)?;
    let profile = |x: f64| japanese_bracket(rho, x);
    let g_star = |x: f64| absorption_flow(t, heat.eval_fn(profile, x), p);

    let w = plan.core_width * sd;
    let x_far = (plan.reach * powf(t, 1.0 / (rho * (p - 1.0)))).max(w);
    let nc = plan.core_points.max(2);
    let no = plan.outer_points.max(2);
    let mut xs: Vec<f64> = (0..nc - 1).map(|k| w * k as f64 / (nc - 1) as f64).collect();
    let ratio = ln(x_far / w);
    xs.extend((0..no).map(|k| w * exp(ratio * k as f64 / (no - 1) as f64)));
    let vals = exec.map_points(xs.len(), &|i| Ok(g_star(xs[i])))?;

    let mut out = Vec::with_capacity(qs.len());
    for &q in qs {
        let norm = match q {
            LqExponent::Infinity => vals.iter().copied().fold(0.0, f64::max),
            LqExponent::Finite(q) => {
                let powered: Vec<f64> = vals.iter().map(|&v| powf(v, q)).collect();
                let core = trapezoid_nonuniform(&xs, &powered)?;
                let tail = algebraic_tail_integral(|x| powf(g_star(x), q), x_far, q * rho, plan.tail_panels)?;
                powf(2.0 * (core + tail), 1.0 / q)
            }
        };
        out.push(norm);
    }
    Ok(out)
}

/// Ratio of `||G*(t)||_q` to `t^{1/(2q) - 1/(p-1)} sqrt(log t)` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBand {
    pub q: LqExponent,
    pub window: (f64, f64),
    pub samples: Vec<(f64, f64)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl LogBand {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Result of [`heat_rate_check`]: a fitted slope when `rho < 2/(p-1)`, a
/// ratio band against the `sqrt(log t)`-corrected rate otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum RateOutcome {
    Slope { fit: DecayFit, norms: Vec<(f64, f64)> },
    Band(LogBand),
}

/// `L^q` decay of the heat supersolution over `t_list`.
pub fn heat_rate_check<M: PointMap + ?Sized>(
    p: f64,
    rho: f64,
    q: LqExponent,
    t_list: &[f64],
    plan: &RateGrid,
    exec: &M,
) -> Result<RateOutcome> {
    if t_list.len() < 3 {
        return Err(Error::Fit("need at least three times"));
    }
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Fit("times must be strictly increasing"));
    }
    let mut norms = Vec::with_capacity(t_list.len());
    for &t in t_list {
        norms.push(heat_supersolution_norms(p, rho, &[q], t, plan, exec)?[0]);
    }
    rate_outcome(p, rho, q, t_list, &norms)
}

/// Slope fit or log-corrected band from precomputed norms, as in [`heat_rate_check`].
pub fn rate_outcome(p: f64, rho: f64, q: LqExponent, t_list: &[f64], norms: &[f64]) -> Result<RateOutcome> {
    if t_list.len() < 3 {
        return Err(Error::Fit("need at least three times"));
    }
    if t_list.len() != norms.len() {
        return Err(Error::Fit("times and norms differ in length"));
    }
    let window = (t_list[0], t_list[t_list.len() - 1]);
    let inv_q = q.reciprocal();
    if rho < 2.0 / (p - 1.0) {
        let target = inv_q / (rho * (p - 1.0)) - 1.0 / (p - 1.0);
        let fit = fit_decay(t_list, norms, window, target)?.with_q(q);
        Ok(RateOutcome::Slope {
            fit,
            norms: t_list.iter().copied().zip(norms.iter().copied()).collect(),
        })
    } else {
        let exponent = 0.5 * inv_q - 1.0 / (p - 1.0);
        let samples: Vec<(f64, f64)> = t_list
            .iter()
            .zip(norms)
            .map(|(&t, &n)| (t, n / (powf(t, exponent) * sqrt(ln(t)))))
            .collect();
        let min_ratio = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let max_ratio = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        Ok(RateOutcome::Band(LogBand {
            q,
            window,
            samples,
            min_ratio,
            max_ratio,
        }))
    }
}

/// Empirical constants of the two-zone envelope of `e^{t Delta} <x>^{-rho}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConstants {
    /// `max e^{t Delta} phi` over `|x| <= R(t) = t^{1/(rho(p-1))}`.
    pub inner_max: f64,
    /// `min` and `max` of `e^{t Delta} phi(x) / |x|^{-rho}` over `R(t) <= |x| <= 100 R(t)`.
    pub outer_min: f64,
    pub outer_max: f64,
}

pub fn heat_envelope_constants(p: f64, rho: f64, t_list: &[f64], points: usize) -> Result<EnvelopeConstants> {
    check_p(p)?;
    let points = points.max(2);
    let mut env = EnvelopeConstants {
        inner_max: 0.0,
        outer_min: f64::INFINITY,
        outer_max: 0.0,
    };
    for &t in t_list {
        let heat = HeatOperator::new(t, sqrt(t) / 50.0)?;
        let phi = |x: f64| japanese_bracket(rho, x);
        let r = powf(t, 1.0 / (rho * (p - 1.0)));
        for k in 0..points {
            let x = r * k as f64 / (points - 1) as f64;
            env.inner_max = env.inner_max.max(heat.eval_fn(phi, x));
            let y = r * powf(100.0, k as f64 / (points - 1) as f64);
            let ratio = heat.eval_fn(phi, y) / powf(y, -rho);
            env.outer_min = env.outer_min.min(ratio);
            env.outer_max = env.outer_max.max(ratio);
        }
    }
    Ok(env)
}
