//! Explicit finite-difference integrator for `u_tt + u_t - u_xx + |u|^{p-1} u = 0`.
//!
//! ```text
//! (u+ - 2u + u-)/dt^2 + (u+ - u-)/(2 dt) - D2 u + N(u) = 0
//! ```
//!
//! with the three-point Laplacian `D2`. The damping term is centered at the
//! current level, so the update is explicit and second order in `dt` and `dx`.
//! The second time level comes from the Taylor start
//! `u0 + dt u1 + dt^2/2 (u0'' - u1 - N(u0))`. The two end nodes keep their
//! initial values (Dirichlet at the data). Information moves one node per
//! step, so choosing the domain with [`safe_half_width`] keeps the boundary
//! out of an observation window exactly.

use alloc::vec::Vec;

use crate::grid::{Grid, GridFunction};
use crate::math::{abs, ceil, round, signed_pow};
use crate::{Error, Result};

/// Time stepping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    pub p: f64,
    pub nonlinear: bool,
    /// Sorted; each is taken at the nearest step.
    pub snapshot_times: Vec<f64>,
    /// Reject data violating `u0 >= 0`, `u1 + u0/2 >= 0` (needed by the comparison checks).
    pub check_sign_condition: bool,
}

impl SolverConfig {
    /// Config with `dt = 0.9 dx`, snapshots only at `t_final`, no sign check.
    pub fn new(grid: Grid, t_final: f64, p: f64, nonlinear: bool) -> Result<Self> {
        let cfg = SolverConfig {
            grid,
            dt: 0.9 * grid.dx(),
            t_final,
            p,
            nonlinear,
            snapshot_times: alloc::vec![t_final],
            check_sign_condition: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Result<Self> {
        self.snapshot_times = times;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sign_check(mut self, on: bool) -> Self {
        self.check_sign_condition = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 3 {
            return Err(Error::InvalidGrid("solver needs at least three nodes"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParam {
                name: "dt",
                value: self.dt,
                expected: "dt > 0",
            });
        }
        if self.dt > self.grid.dx() * (1.0 + 1e-12) {
            return Err(Error::InvalidParam {
                name: "dt",
                value: self.dt,
                expected: "CFL condition dt <= dx",
            });
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidParam {
                name: "t_final",
                value: self.t_final,
                expected: "t_final > 0",
            });
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(Error::InvalidParam {
                name: "p",
                value: self.p,
                expected: "p > 1",
            });
        }
        let mut last = 0.0;
        for &s in &self.snapshot_times {
            if !(s >= last) {
                return Err(Error::InvalidParam {
                    name: "snapshot_times",
                    value: s,
                    expected: "sorted nonnegative times",
                });
            }
            last = s;
        }
        if last > self.t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidParam {
                name: "snapshot_times",
                value: last,
                expected: "all snapshot times <= t_final",
            });
        }
        Ok(())
    }

    /// Number of steps to reach `t_final` (rounded to the nearest step).
    pub fn steps(&self) -> usize {
        self.step_of(self.t_final)
    }

    fn step_of(&self, t: f64) -> usize {
        round(t / self.dt) as usize
    }
}

/// Half-width `x_obs + (ceil(t_final/dt) + 2) dx`: no boundary value reaches
/// `|x| <= x_obs` before `t_final`.
pub fn safe_half_width(x_obs: f64, t_final: f64, dt: f64, dx: f64) -> f64 {
    x_obs + (ceil(t_final / dt) + 2.0) * dx
}

/// Two time levels of the scheme plus a positivity monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    grid: Grid,
    u_prev: Vec<f64>,
    u_curr: Vec<f64>,
    scratch: Vec<f64>,
    step_index: usize,
    dt: f64,
    min_value_seen: f64,
}

impl SimulationState {
    pub fn u_prev(&self) -> GridFunction {
        GridFunction::new(self.grid, self.u_prev.clone()).expect("state values are finite")
    }

    pub fn u_curr(&self) -> GridFunction {
        GridFunction::new(self.grid, self.u_curr.clone()).expect("state values are finite")
    }

    pub fn current_values(&self) -> &[f64] {
        &self.u_curr
    }

    pub fn t(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Smallest value of either level seen so far.
    pub fn min_value_seen(&self) -> f64 {
        self.min_value_seen
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Advance one step in place.
    pub fn advance(&mut self, cfg: &SolverConfig) -> Result<()> {
        let n = self.u_curr.len();
        let dt = cfg.dt;
        let lam = dt * dt / (cfg.grid.dx() * cfg.grid.dx());
        let back = 1.0 - 0.5 * dt;
        let inv = 1.0 / (1.0 + 0.5 * dt);
        let dt2 = dt * dt;
        let (prev, curr, next) = (&self.u_prev, &self.u_curr, &mut self.scratch);
        next[0] = curr[0];
        next[n - 1] = curr[n - 1];
        let mut lo = f64::INFINITY;
        let mut bad = false;
        for j in 1..n - 1 {
            let u = curr[j];
            let mut acc = 2.0 * u - back * prev[j] + lam * (curr[j + 1] - 2.0 * u + curr[j - 1]);
            if cfg.nonlinear {
                acc -= dt2 * signed_pow(u, cfg.p);
            }
            let v = acc * inv;
            bad |= !v.is_finite();
            lo = lo.min(v);
            next[j] = v;
        }
        self.step_index += 1;
        if bad {
            return Err(Error::Instability {
                step: self.step_index,
                t: self.t(),
            });
        }
        self.min_value_seen = self.min_value_seen.min(lo);
        core::mem::swap(&mut self.u_prev, &mut self.u_curr);
        core::mem::swap(&mut self.u_curr, &mut self.scratch);
        Ok(())
    }
}

fn check_sign_condition(u0: &GridFunction, u1: &GridFunction) -> Result<()> {
    for (j, (&a, &b)) in u0.values().iter().zip(u1.values()).enumerate() {
        if a < 0.0 || b + 0.5 * a < 0.0 {
            return Err(Error::SignCondition {
                index: j,
                x: u0.grid().x(j),
            });
        }
    }
    Ok(())
}

/// First two time levels from the data.
pub fn init_state(u0: &GridFunction, u1: &GridFunction, cfg: &SolverConfig) -> Result<SimulationState> {
    cfg.validate()?;
    if !u0.grid().same_as(&cfg.grid) || !u1.grid().same_as(&cfg.grid) {
        return Err(Error::GridMismatch);
    }
    if cfg.check_sign_condition {
        check_sign_condition(u0, u1)?;
    }
    let (a, b) = (u0.values(), u1.values());
    let n = a.len();
    let dt = cfg.dt;
    let dx2 = cfg.grid.dx() * cfg.grid.dx();
    let mut curr = a.to_vec();
    for j in 1..n - 1 {
        let lap = (a[j + 1] - 2.0 * a[j] + a[j - 1]) / dx2;
        let nl = if cfg.nonlinear { signed_pow(a[j], cfg.p) } else { 0.0 };
        curr[j] = a[j] + dt * b[j] + 0.5 * dt * dt * (lap - b[j] - nl);
    }
    if let Some(index) = curr.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let lo = a.iter().chain(&curr).copied().fold(f64::INFINITY, f64::min);
    Ok(SimulationState {
        grid: cfg.grid,
        u_prev: a.to_vec(),
        u_curr: curr,
        scratch: alloc::vec![0.0; n],
        step_index: 1,
        dt,
        min_value_seen: lo,
    })
}

/// One step, returning the new state.
pub fn step(mut state: SimulationState, cfg: &SolverConfig) -> Result<SimulationState> {
    state.advance(cfg)?;
    Ok(state)
}

/// Solution at one step. `t` is the step time, which may differ from the
/// requested time by up to `dt/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub t: f64,
    pub u: GridFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub min_value_seen: f64,
    pub steps: usize,
    pub dt: f64,
    /// Distance from the ends within which the boundary may have influenced the
    /// solution (unit speed times `t_final`).
    pub boundary_influence: f64,
}

/// Run to `t_final`, keeping the requested snapshots.
pub fn simulate(u0: &GridFunction, u1: &GridFunction, cfg: &SolverConfig) -> Result<Trajectory> {
    simulate_observed(u0, u1, cfg, |_| Ok(()))
}

/// [`simulate`], calling `observe` after every step (including the two
/// initial levels at steps 0 and 1).
pub fn simulate_observed(
    u0: &GridFunction,
    u1: &GridFunction,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&SimulationState) -> Result<()>,
) -> Result<Trajectory> {
    let mut state = init_state(u0, u1, cfg)?;
    let targets: Vec<(f64, usize)> = cfg.snapshot_times.iter().map(|&s| (s, cfg.step_of(s))).collect();
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut next = 0;
    let take = |snaps: &mut Vec<Snapshot>, next: &mut usize, k: usize, values: &[f64]| -> Result<()> {
        while *next < targets.len() && targets[*next].1 == k {
            snaps.push(Snapshot {
                requested: targets[*next].0,
                t: k as f64 * cfg.dt,
                u: GridFunction::new(cfg.grid, values.to_vec())?,
            });
            *next += 1;
        }
        Ok(())
    };
    take(&mut snapshots, &mut next, 0, u0.values())?;
    take(&mut snapshots, &mut next, 1, state.current_values())?;
    let total = cfg.steps().max(targets.last().map_or(0, |t| t.1));
    while state.step_index < total {
        state.advance(cfg)?;
        observe(&state)?;
        let k = state.step_index;
        take(&mut snapshots, &mut next, k, state.current_values())?;
    }
    Ok(Trajectory {
        snapshots,
        min_value_seen: state.min_value_seen,
        steps: state.step_index,
        dt: cfg.dt,
        boundary_influence: cfg.t_final,
    })
}

/// Largest `|u - v|` over two grid functions on grids with the same spacing,
/// restricted to the common nodes with `|x| <= x_max`.
pub fn max_difference_on(u: &GridFunction, v: &GridFunction, x_max: f64) -> Result<f64> {
    if abs(u.grid().dx() - v.grid().dx()) > 1e-12 * u.grid().dx() {
        return Err(Error::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for (x, a) in u.samples() {
        if abs(x) > x_max + 1e-9 {
            continue;
        }
        let j = v.grid().index_of(x).ok_or(Error::GridMismatch)?;
        worst = worst.max(abs(a - v.values()[j]));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::symmetric(1.0, 0.1).unwrap();
        let cfg = SolverConfig::new(g, 1.0, 2.0, true).unwrap();
        let z = GridFunction::zeros(g);
        let traj = simulate(&z, &z, &cfg).unwrap();
        assert!(traj.snapshots[0].u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cfl_is_enforced() {
        let g = Grid::symmetric(1.0, 0.1).unwrap();
        assert!(SolverConfig::new(g, 1.0, 2.0, true).unwrap().with_dt(0.2).is_err());
    }

    #[test]
    fn unsorted_snapshots_rejected() {
        let g = Grid::symmetric(1.0, 0.1).unwrap();
        let cfg = SolverConfig::new(g, 1.0, 2.0, true).unwrap();
        assert!(cfg.with_snapshots(alloc::vec![0.5, 0.2]).is_err());
    }
}
