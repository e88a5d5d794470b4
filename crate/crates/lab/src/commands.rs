//! One function per subcommand. Each writes its CSVs under `<out>/<command>/`
//! and returns the checks it evaluated.

use dampwave_core::analysis::{
    apriori_sandwich, check_phi_conditions, comparison_experiment, heat_domination_constant, kernel_lemma_ratios,
    log_spaced, main_theorem_experiment, rates_experiment, run_main_simulation, MainTheoremConfig, RatesConfig,
    UpperSide,
};
use dampwave_core::grid::{japanese_bracket, japanese_bracket_profile};
use dampwave_core::heat::{
    heat_envelope_constants, heat_residual_check, heat_residual_data_half_width, heat_supersolution_norms,
    rate_outcome, HeatResidualConfig, RateGrid, RateOutcome,
};
use dampwave_core::kernel::{k2, k2_cone_limit, ConeOperator};
use dampwave_core::ode::{OdeSupersolution, OdeSupersolutionParams};
use dampwave_core::solver::{safe_half_width, simulate, SolverConfig};
use dampwave_core::special::{
    bessel_i_scaled, bessel_i_scaled_asymptotic, bessel_i_scaled_series, i0_integral_oracle_scaled,
    i0_lower_bound_scaled, BesselOrder, SERIES_SWITCH,
};
use dampwave_core::{CheckReport, Grid, GridFunction, LqExponent};

use crate::config::{Command, ScenarioConfig};
use crate::exec::RayonMap;
use crate::output::{num, OutputDir};
use crate::LabError;

/// What a subcommand needs: the resolved config, where to write, and the worker pool.
pub struct Context<'a> {
    pub cfg: &'a ScenarioConfig,
    pub out: &'a OutputDir,
    pub exec: &'a RayonMap,
}

pub fn run_command(cmd: Command, ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    match cmd {
        Command::BesselCheck => bessel_check(ctx),
        Command::KernelCheck => kernel_check(ctx),
        Command::OdeCheck => ode_check(ctx),
        Command::HeatRates => heat_rates(ctx),
        Command::Simulate => simulate_linear(ctx),
        Command::MainTheorem => main_theorem(ctx),
        Command::PdeRates => pde_rates(ctx),
        Command::Comparison => comparison(ctx),
        Command::LemmaRatios => lemma_ratios(ctx),
    }
}

fn file(cmd: Command, name: &str) -> String {
    format!("{}/{name}", cmd.name())
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn qs_or_default(ctx: &Context<'_>) -> Vec<LqExponent> {
    ctx.cfg
        .settings
        .q
        .clone()
        .unwrap_or_else(|| vec![LqExponent::Finite(1.0), LqExponent::Finite(2.0), LqExponent::Infinity])
}

fn bessel_check(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::BesselCheck;
    let mut rows = Vec::new();
    let mut worst = (0.0f64, 0.0);
    for i in 0..=300 {
        let x = i as f64 * 0.1;
        let series = bessel_i_scaled(BesselOrder::Zero, x)?;
        let oracle = i0_integral_oracle_scaled(x, 2048)?;
        let r = rel(series, oracle);
        if r > worst.0 {
            worst = (r, x);
        }
        rows.push(format!("{},{},{},{}", num(x), num(series), num(oracle), num(r)));
    }
    ctx.out
        .csv(&file(cmd, "oracle.csv"), "x,i0_scaled,oracle,rel_err", &rows)?;

    let mut rows = Vec::new();
    let mut margin = (f64::INFINITY, 0.0);
    for i in 1..=5000 {
        let x = i as f64 * 0.01;
        let v = bessel_i_scaled(BesselOrder::Zero, x)?;
        let lb = i0_lower_bound_scaled(x)?;
        let m = v / lb - 1.0;
        if m < margin.0 {
            margin = (m, x);
        }
        if i % 10 == 0 {
            rows.push(format!("{},{},{}", num(x), num(v), num(lb)));
        }
    }
    ctx.out
        .csv(&file(cmd, "lower_bound.csv"), "x,i0_scaled,lower_bound_scaled", &rows)?;

    let mut seam = 0.0f64;
    for n in 0..3u8 {
        let order = BesselOrder::new(n)?;
        let a = bessel_i_scaled_series(order, SERIES_SWITCH)?;
        let b = bessel_i_scaled_asymptotic(order, SERIES_SWITCH)?;
        seam = seam.max(rel(a, b));
    }

    let mut recurrence = (0.0f64, 0.0);
    let mut x = 0.01;
    while x <= 1000.0 {
        let i0 = bessel_i_scaled(BesselOrder::Zero, x)?;
        let i1 = bessel_i_scaled(BesselOrder::One, x)?;
        let i2 = bessel_i_scaled(BesselOrder::Two, x)?;
        let r = rel(i0 - i2, 2.0 * i1 / x);
        if r > recurrence.0 {
            recurrence = (r, x);
        }
        x *= 1.01;
    }

    Ok(vec![
        CheckReport::new(
            "I0 series vs integral oracle on [0,30]",
            worst.0 <= 1e-10,
            worst.0,
            (0.0, worst.1),
            None,
        ),
        CheckReport::new(
            "I0 lower bound on (0,50]",
            margin.0 >= 0.0,
            margin.0,
            (0.0, margin.1),
            None,
        ),
        CheckReport::new(
            "series/asymptotic seam agreement",
            seam <= 1e-12,
            seam,
            (0.0, SERIES_SWITCH),
            None,
        ),
        CheckReport::new(
            "I0 - I2 = 2 I1 / x",
            recurrence.0 <= 1e-12,
            recurrence.0,
            (0.0, recurrence.1),
            None,
        ),
    ])
}

fn kernel_check(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::KernelCheck;
    let mut rows = Vec::new();
    let mut worst = (0.0f64, 0.0);
    for t in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let q = 1e-3 * t;
        let g = Grid::symmetric(t + 2.0 * q, q)?;
        let one = GridFunction::constant(g, 1.0)?;
        let zero = GridFunction::zeros(g);
        let e = (-t).exp();
        let cases = [
            ("S", ConeOperator::solution(t, q)?, 1.0 - e),
            ("dS", ConeOperator::velocity(t, q)?, e),
            ("ddS", ConeOperator::acceleration(t, q)?, -e),
        ];
        for (name, op, exact) in cases {
            let v = op.eval_at(&one, Some(&zero), 0.0)?;
            let err = (v - exact).abs();
            if err > worst.0 {
                worst = (err, t);
            }
            rows.push(format!("{},{name},{},{},{}", num(t), num(v), num(exact), num(err)));
        }
    }
    ctx.out
        .csv(&file(cmd, "identities.csv"), "t,operator,value,exact,abs_err", &rows)?;

    let mut rows = Vec::new();
    let mut cone = (0.0f64, 0.0);
    for t in [1.0f64, 5.0, 20.0] {
        let omega: f64 = 1e-6;
        let y = (t * t - omega * omega).sqrt();
        let v = k2(t, y)?;
        let limit = k2_cone_limit(t);
        let r = rel(v, limit);
        if r > cone.0 {
            cone = (r, t);
        }
        rows.push(format!(
            "{},{},{},{},{}",
            num(t),
            num(omega),
            num(v),
            num(limit),
            num(r)
        ));
    }
    ctx.out
        .csv(&file(cmd, "cone_limit.csv"), "t,omega,k2,limit,rel_err", &rows)?;
    Ok(vec![
        CheckReport::new(
            "constant-data kernel identities",
            worst.0 <= 1e-6,
            worst.0,
            (worst.1, 0.0),
            None,
        ),
        CheckReport::new("k2 light-cone limit", cone.0 <= 1e-6, cone.0, (cone.1, 0.0), None),
    ])
}

/// Radical-inverse sequence used for deterministic sample points.
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

fn ode_check(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::OdeCheck;
    let mut times = vec![0.0];
    times.extend((0..63).map(|k| 10f64.powf(-3.0 + 7.0 * k as f64 / 62.0)));
    let mut rows = Vec::new();
    let mut worst = (f64::INFINITY, (0.0, 0.0));
    for p in [1.5, 2.0, 2.5, 3.0] {
        for alpha in [0.25, 0.5, 1.0] {
            for eps in [1e-3, 1e-2] {
                let h = OdeSupersolutionParams::new(p, alpha, eps)?.family();
                for &t in &times {
                    let r = h.residuals(t, eps);
                    let m = r.main.min(r.halfdamp);
                    if m < worst.0 {
                        worst = (m, (t, p));
                    }
                    rows.push(format!(
                        "{},{},{},{},{},{}",
                        num(p),
                        num(alpha),
                        num(eps),
                        num(t),
                        num(r.main),
                        num(r.halfdamp)
                    ));
                }
            }
        }
    }
    ctx.out
        .csv(&file(cmd, "residuals.csv"), "p,alpha,eps,t,main,halfdamp", &rows)?;

    // Central differences against the closed-form partials. Each comparison
    // uses the size of the terms that cancel in the exact value as a floor.
    let (ht, he) = (1e-5, 1e-6);
    let mut rows = Vec::new();
    let mut fd_worst = (0.0f64, 0u64);
    for i in 1..=100u64 {
        let p = 1.2 + 1.7 * halton(i, 2);
        let alpha = 0.05 + 0.95 * halton(i, 3);
        let t = 10f64.powf(-1.0 + 4.0 * halton(i, 5));
        let h = OdeSupersolution::new(p, alpha)?;
        let eps = (0.01 + 0.99 * halton(i, 7)).min(h.max_eps());
        let d = h.derivatives(t, eps);
        let val = h.value(t, eps);
        let g = h.decay(t, eps);
        let r = (g / eps).powf(p - 1.0) / eps;
        let rate = h.decay_rate() * g.powf(p - 1.0);
        let checks = [
            (
                "dt",
                d.dt,
                (h.value(t + ht, eps) - h.value(t - ht, eps)) / (2.0 * ht),
                (rate + 1.0) * val * 1e-3,
            ),
            (
                "deps",
                d.deps,
                (h.value(t, eps + he) - h.value(t, eps - he)) / (2.0 * he),
                0.0,
            ),
            (
                "dt_deps",
                d.dt_deps,
                (h.derivatives(t + ht, eps).deps - h.derivatives(t - ht, eps).deps) / (2.0 * ht),
                r * val * 1e-3,
            ),
            (
                "deps2",
                d.deps2,
                (h.derivatives(t, eps + he).deps - h.derivatives(t, eps - he).deps) / (2.0 * he),
                p * r * r * val,
            ),
            (
                "dt2",
                d.dt2,
                (h.derivatives(t + ht, eps).dt - h.derivatives(t - ht, eps).dt) / (2.0 * ht),
                d.dt.abs() * 1e-3,
            ),
        ];
        for (name, exact, fd, floor) in checks {
            let e = (fd - exact).abs() / exact.abs().max(floor);
            if e > fd_worst.0 {
                fd_worst = (e, i);
            }
            rows.push(format!(
                "{i},{},{},{},{},{name},{},{},{}",
                num(p),
                num(alpha),
                num(t),
                num(eps),
                num(exact),
                num(fd),
                num(e)
            ));
        }
    }
    ctx.out.csv(
        &file(cmd, "derivatives.csv"),
        "point,p,alpha,t,eps,partial,exact,finite_difference,rel_err",
        &rows,
    )?;
    Ok(vec![
        CheckReport::new("ODE supersolution residuals", worst.0 >= 0.0, worst.0, worst.1, None),
        CheckReport::new(
            "supersolution partials vs finite differences",
            fd_worst.0 <= 1e-6,
            fd_worst.0,
            (fd_worst.1 as f64, 0.0),
            None,
        ),
    ])
}

fn rate_rows(
    ctx: &Context<'_>,
    p: f64,
    rho: f64,
    qs: &[LqExponent],
    ts: &[f64],
) -> Result<(Vec<String>, Vec<RateOutcome>), LabError> {
    let plan = RateGrid::default();
    let mut per_t = Vec::with_capacity(ts.len());
    for &t in ts {
        per_t.push(heat_supersolution_norms(p, rho, qs, t, &plan, ctx.exec)?);
    }
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for (k, &q) in qs.iter().enumerate() {
        let norms: Vec<f64> = per_t.iter().map(|n| n[k]).collect();
        let target = if rho < 2.0 / (p - 1.0) {
            q.reciprocal() / (rho * (p - 1.0)) - 1.0 / (p - 1.0)
        } else {
            0.5 * q.reciprocal() - 1.0 / (p - 1.0)
        };
        for (&t, &n) in ts.iter().zip(&norms) {
            rows.push(format!("{},{q},{},{}", num(t), num(n), num(target)));
        }
        outcomes.push(rate_outcome(p, rho, q, ts, &norms)?);
    }
    Ok((rows, outcomes))
}

fn rate_reports(p: f64, rho: f64, outcomes: &[RateOutcome], fit_rows: &mut Vec<String>) -> Vec<CheckReport> {
    outcomes
        .iter()
        .map(|o| match o {
            RateOutcome::Slope { fit, .. } => {
                let q = fit.q.map(|q| q.to_string()).unwrap_or_default();
                fit_rows.push(format!(
                    "{},{},{q},slope,{},{},{}",
                    num(p),
                    num(rho),
                    num(fit.slope),
                    num(fit.slope_stderr),
                    num(fit.target)
                ));
                CheckReport::new(
                    format!("heat supersolution slope q={q} rho={rho}"),
                    fit.within(0.05),
                    fit.deviation(),
                    (fit.window.1, 0.0),
                    Some(fit.slope),
                )
            }
            RateOutcome::Band(band) => {
                fit_rows.push(format!(
                    "{},{},{},band,{},{},{}",
                    num(p),
                    num(rho),
                    band.q,
                    num(band.min_ratio),
                    num(band.max_ratio),
                    num(band.spread())
                ));
                CheckReport::new(
                    format!("heat supersolution log band q={} rho={rho}", band.q),
                    band.spread() <= 4.0,
                    band.spread(),
                    (band.window.1, 0.0),
                    Some(band.max_ratio),
                )
            }
        })
        .collect()
}

fn heat_rates(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::HeatRates;
    let params = ctx.cfg.params();
    let (p, rho) = (params.p, params.rho);
    let qs = qs_or_default(ctx);
    let ts = log_spaced(1e2, 1e5, 16);
    let mut fit_rows = Vec::new();

    let (rows, outcomes) = rate_rows(ctx, p, rho, &qs, &ts)?;
    ctx.out
        .csv(&file(cmd, "heat_rates.csv"), "t,q,norm,target_exponent", &rows)?;
    let mut reports = rate_reports(p, rho, &outcomes, &mut fit_rows);

    let critical = 2.0 / (p - 1.0);
    if rho < critical {
        let rho_fast = critical + 1.0;
        let q2 = [LqExponent::Finite(2.0)];
        let (rows, outcomes) = rate_rows(ctx, p, rho_fast, &q2, &ts)?;
        ctx.out
            .csv(&file(cmd, "heat_band.csv"), "t,q,norm,target_exponent", &rows)?;
        reports.extend(rate_reports(p, rho_fast, &outcomes, &mut fit_rows));
    }
    ctx.out.csv(&file(cmd, "fits.csv"), "p,rho,q,kind,a,b,c", &fit_rows)?;

    let res = HeatResidualConfig::default();
    let g = Grid::symmetric(heat_residual_data_half_width(&res), res.dx)?;
    let phi = japanese_bracket_profile(rho, g)?;
    reports.push(heat_residual_check(&phi, p, &res, ctx.exec)?);

    if rho < critical {
        let env = heat_envelope_constants(p, rho, &[1e2, 1e3, 1e4], 200)?;
        ctx.out.csv(
            &file(cmd, "envelope.csv"),
            "inner_max,outer_min,outer_max",
            &[format!(
                "{},{},{}",
                num(env.inner_max),
                num(env.outer_min),
                num(env.outer_max)
            )],
        )?;
        reports.push(CheckReport::new(
            "heat flow two-zone envelope",
            env.outer_min > 0.0 && env.outer_max.is_finite(),
            env.outer_max / env.outer_min,
            (1e4, 0.0),
            Some(env.inner_max),
        ));
    }
    Ok(reports)
}

/// Linear FD error against the kernel solution at `t_final`, on `|x| <= 15`.
fn linear_error(ctx: &Context<'_>, dx: f64, dt: f64, t_final: f64) -> Result<(f64, f64, GridFunction, f64), LabError> {
    let x_obs = 15.0;
    let bump = |x: f64| (-x * x).exp();
    let g = Grid::symmetric(safe_half_width(x_obs, t_final, dt, dx), dx)?;
    let u0 = GridFunction::from_fn(g, bump)?;
    let u1 = GridFunction::zeros(g);
    let cfg = SolverConfig::new(g, t_final, 2.0, false)?.with_dt(dt)?;
    let traj = simulate(&u0, &u1, &cfg)?;
    let snap = traj
        .snapshots
        .into_iter()
        .next_back()
        .ok_or(LabError::Config("no snapshot".into()))?;
    let qdx = dx / 4.0;
    let fine = Grid::symmetric(x_obs + snap.t + 4.0 * dx, qdx)?;
    let f0 = GridFunction::from_fn(fine, bump)?;
    let obs = Grid::symmetric(x_obs, dx)?;
    let s = ConeOperator::solution(snap.t, qdx)?.apply_on(&f0, None, &obs, ctx.exec)?;
    let v = ConeOperator::velocity(snap.t, qdx)?.apply_on(&f0, None, &obs, ctx.exec)?;
    let u = snap.u.restrict(&obs)?;
    let err = (0..obs.len())
        .map(|j| (u.values()[j] - s.values()[j] - v.values()[j]).abs())
        .fold(0.0, f64::max);
    Ok((err, snap.t, snap.u, traj.min_value_seen))
}

fn simulate_linear(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::Simulate;
    let s = &ctx.cfg.settings;
    let dx = s.dx.unwrap_or(0.01);
    let dt = s.dt.unwrap_or(0.9 * dx);
    let t_final = s.t_final.unwrap_or(10.0);
    let (e1, t1, u, min_seen) = linear_error(ctx, dx, dt, t_final)?;
    let (e2, t2, _, _) = linear_error(ctx, 0.5 * dx, 0.5 * dt, t_final)?;
    ctx.out.snapshot(&file(cmd, "snapshot_final.csv"), t1, &u)?;
    ctx.out.write(
        &file(cmd, "run.txt"),
        &format!(
            "dx = {dx:?}\ndt = {dt:?}\ndomain = [{:?}, {:?}]\np = 2.0\nnonlinear = false\nt = {t1:?}\nmin_value_seen = {min_seen:?}\n",
            u.grid().x0(),
            u.grid().x_last()
        ),
    )?;
    ctx.out.csv(
        &file(cmd, "linear_vs_kernel.csv"),
        "dx,dt,t,linf_error",
        &[
            format!("{},{},{},{}", num(dx), num(dt), num(t1), num(e1)),
            format!("{},{},{},{}", num(0.5 * dx), num(0.5 * dt), num(t2), num(e2)),
        ],
    )?;
    Ok(vec![
        CheckReport::new("linear FD vs kernel solution", e1 <= 1e-3, e1, (t1, 0.0), None),
        CheckReport::new(
            "error reduction on halving dx, dt",
            e1 / e2 >= 3.0,
            e1 / e2,
            (t1, 0.0),
            None,
        ),
    ])
}

fn main_theorem(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::MainTheorem;
    let s = &ctx.cfg.settings;
    let params = ctx.cfg.params();
    let mut mt = MainTheoremConfig {
        p: params.p,
        rho: params.rho,
        alpha: params.alpha,
        ..MainTheoremConfig::default()
    };
    if let Some(eps) = s.eps {
        mt.eps = eps;
    }
    if let Some(t0) = s.t0 {
        mt.t0_sweep = vec![t0];
    }
    if let Some(dx) = s.dx {
        mt.dx = dx;
        mt.dt = 0.9 * dx;
    }
    if let Some(dt) = s.dt {
        mt.dt = dt;
    }
    if let Some(t_final) = s.t_final {
        mt.t_final = t_final;
        mt.snapshot_times.retain(|&t| t <= t_final);
        if mt.snapshot_times.last() != Some(&t_final) {
            mt.snapshot_times.push(t_final);
        }
    }
    let run = run_main_simulation(&mt)?;
    let outcome = main_theorem_experiment(&mt, &run, ctx.exec)?;
    let rows: Vec<String> = outcome
        .shifts
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                num(s.t0),
                num(s.calibration),
                num(s.raw.max_ratio),
                s.raw.violations,
                num(s.calibrated.max_ratio),
                s.calibrated.violations,
                num(s.calibrated.argmax.0),
                num(s.calibrated.argmax.1),
                num(s.pullback_ratio.0),
                num(s.pullback_ratio.1)
            )
        })
        .collect();
    ctx.out.csv(
        &file(cmd, "domination.csv"),
        "t0,calibration,raw_max_ratio,raw_violations,max_ratio,violations,t,x,pullback_min,pullback_max",
        &rows,
    )?;

    let tol = 10.0 * mt.dx * mt.dx;
    let sandwich_times = [1.0, 5.0, 20.0, 100.0];
    let snaps: Vec<_> = run
        .trajectory
        .snapshots
        .iter()
        .filter(|s| sandwich_times.contains(&s.requested))
        .cloned()
        .collect();
    let sandwich = apriori_sandwich(&snaps, &run.u0, &run.u1, mt.x_obs, mt.dx, tol, ctx.exec)?;
    ctx.out.csv(
        &file(cmd, "apriori.csv"),
        "lower_excess,lower_t,lower_x,upper_excess,upper_t,upper_x,tolerance",
        &[format!(
            "{},{},{},{},{},{},{}",
            num(sandwich.lower_excess),
            num(sandwich.lower_at.0),
            num(sandwich.lower_at.1),
            num(sandwich.upper_excess),
            num(sandwich.upper_at.0),
            num(sandwich.upper_at.1),
            num(tol)
        )],
    )?;
    let monitor = CheckReport::new(
        "positivity monitor",
        outcome.min_value_seen >= -tol,
        outcome.min_value_seen,
        (mt.t_final, 0.0),
        None,
    );
    Ok(vec![outcome.report, sandwich.report, monitor])
}

fn pde_rates(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::PdeRates;
    let s = &ctx.cfg.settings;
    let params = ctx.cfg.params();
    let mut rc = RatesConfig {
        p: params.p,
        rho: params.rho,
        qs: qs_or_default(ctx),
        ..RatesConfig::default()
    };
    if let Some(eps) = s.eps {
        rc.eps = eps;
    }
    if let Some(dx) = s.dx {
        rc.dx = dx;
        rc.dt = 0.9 * dx;
    }
    if let Some(dt) = s.dt {
        rc.dt = dt;
    }
    if let Some(t_final) = s.t_final {
        rc.times = log_spaced(rc.window.0.min(0.1 * t_final), t_final, 9);
        rc.window = (rc.times[0], t_final);
    }
    let outcome = rates_experiment(&rc)?;
    let target = |q: LqExponent| q.reciprocal() / (rc.rho * (rc.p - 1.0)) - 1.0 / (rc.p - 1.0);
    let rows: Vec<String> = outcome
        .norms
        .iter()
        .map(|(t, q, n)| format!("{},{q},{},{}", num(*t), num(*n), num(target(*q))))
        .collect();
    ctx.out
        .csv(&file(cmd, "pde_rates.csv"), "t,q,norm,target_exponent", &rows)?;
    let fit_rows: Vec<String> = outcome
        .fits
        .iter()
        .map(|f| {
            format!(
                "{},{},{},{},{},{}",
                f.q.map(|q| q.to_string()).unwrap_or_default(),
                num(f.slope),
                num(f.slope_stderr),
                num(f.target),
                num(f.window.0),
                num(f.window.1)
            )
        })
        .collect();
    ctx.out
        .csv(&file(cmd, "fits.csv"), "q,slope,stderr,target,t_min,t_max", &fit_rows)?;
    Ok(outcome
        .fits
        .iter()
        .map(|f| {
            CheckReport::new(
                format!(
                    "solution decay slope q={}",
                    f.q.map(|q| q.to_string()).unwrap_or_default()
                ),
                f.within(0.1),
                f.deviation(),
                (f.window.1, 0.0),
                Some(f.slope),
            )
        })
        .collect())
}

fn comparison(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::Comparison;
    let s = &ctx.cfg.settings;
    let params = ctx.cfg.params();
    let dx = s.dx.unwrap_or(0.05);
    let dt = s.dt.unwrap_or(0.9 * dx);
    let t_final = s.t_final.unwrap_or(100.0);
    let x_obs = 100.0;
    let g = Grid::symmetric(safe_half_width(x_obs, t_final, dt, dx), dx)?;
    let phi = GridFunction::from_fn(g, |x| japanese_bracket(params.rho, x))?;
    let low = phi.scale(params.eps)?;
    let high = phi.scale(2.0 * params.eps)?;
    let zero = GridFunction::zeros(g);
    let cfg = SolverConfig::new(g, t_final, params.p, true)?.with_dt(dt)?;
    let family = OdeSupersolution::new(params.p, params.alpha)?;
    let cases = [
        ("identical data", UpperSide::Evolved { u0: &low, u1: &zero }),
        ("doubled data", UpperSide::Evolved { u0: &high, u1: &zero }),
        (
            "ODE supersolution",
            UpperSide::Ode {
                family,
                eps: params.eps,
            },
        ),
    ];
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (name, upper) in cases {
        let r = comparison_experiment(&low, &zero, upper, &cfg, x_obs, 1e-6)?;
        rows.push(format!(
            "{name},{},{},{},{}",
            num(r.max_excess),
            num(r.at.0),
            num(r.at.1),
            num(r.smallness)
        ));
        let mut report = r.report;
        report.name = format!("comparison ordering ({name})");
        reports.push(report);
    }
    ctx.out
        .csv(&file(cmd, "comparison.csv"), "case,max_excess,t,x,smallness", &rows)?;
    Ok(reports)
}

fn lemma_ratios(ctx: &Context<'_>) -> Result<Vec<CheckReport>, LabError> {
    let cmd = Command::LemmaRatios;
    let params = ctx.cfg.params();
    let dx = ctx.cfg.settings.dx.unwrap_or(0.05);
    let phi = japanese_bracket_profile(params.rho, Grid::symmetric(150.0, dx)?)?;
    let cond = check_phi_conditions(&phi)?;
    let c_rows: Vec<String> = cond
        .full
        .exponential
        .iter()
        .map(|(d, c)| format!("exponential({d}),{}", num(*c)))
        .chain([
            format!("local,{}", num(cond.full.local)),
            format!("dilation,{}", num(cond.full.dilation)),
            format!("log-derivative,{}", num(cond.full.log_derivative)),
        ])
        .collect();
    ctx.out
        .csv(&file(cmd, "profile_constants.csv"), "condition,constant", &c_rows)?;

    let ts = [2.0, 5.0, 10.0, 20.0, 50.0];
    let ratios = kernel_lemma_ratios(&phi, params.sigma, &ts, dx, ctx.exec)?;
    let rows: Vec<String> = ratios
        .rows
        .iter()
        .map(|(t, a, b)| format!("{},{},{},{}", num(*t), num(params.sigma), num(*a), num(*b)))
        .collect();
    ctx.out.csv(
        &file(cmd, "lemma_ratios.csv"),
        "t,sigma,first_derivative_ratio,second_derivative_ratio",
        &rows,
    )?;

    let wide = japanese_bracket_profile(params.rho, Grid::symmetric(250.0, 0.1)?)?;
    let dom = heat_domination_constant(&wide, &[1.0, 10.0, 100.0], 0.1, ctx.exec)?;
    Ok(vec![cond.report, ratios.report, dom])
}
