//! Flat `key = value` scenario files and their resolution against CLI flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dampwave_core::{LqExponent, ModelParams};

use crate::LabError;

/// One runnable scenario. `all` expands to every entry of [`Command::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BesselCheck,
    KernelCheck,
    OdeCheck,
    HeatRates,
    Simulate,
    MainTheorem,
    PdeRates,
    Comparison,
    LemmaRatios,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::BesselCheck,
        Command::KernelCheck,
        Command::OdeCheck,
        Command::HeatRates,
        Command::Simulate,
        Command::MainTheorem,
        Command::PdeRates,
        Command::Comparison,
        Command::LemmaRatios,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::BesselCheck => "bessel-check",
            Command::KernelCheck => "kernel-check",
            Command::OdeCheck => "ode-check",
            Command::HeatRates => "heat-rates",
            Command::Simulate => "simulate",
            Command::MainTheorem => "main-theorem",
            Command::PdeRates => "pde-rates",
            Command::Comparison => "comparison",
            Command::LemmaRatios => "lemma-ratios",
        }
    }
}

impl FromStr for Command {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown check `{s}`")))
    }
}

/// Raw settings from a file or from flags. `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub scenario: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub p: Option<f64>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub eps: Option<f64>,
    pub t0: Option<f64>,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub q: Option<Vec<LqExponent>>,
    pub checks: Option<Vec<Command>>,
}

pub fn parse_q(s: &str) -> Result<LqExponent, LabError> {
    let s = s.trim();
    if matches!(s, "inf" | "infinity" | "Inf" | "INF") {
        return Ok(LqExponent::Infinity);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| LabError::Config(format!("q = `{s}` is not a number or `inf`")))?;
    LqExponent::new(v).map_err(|e| LabError::Config(e.to_string()))
}

fn parse_f64(key: &str, s: &str) -> Result<f64, LabError> {
    s.parse()
        .map_err(|_| LabError::Config(format!("{key} = `{s}` is not a number")))
}

impl Settings {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scenario" => s.scenario = Some(value.to_string()),
                "out" => s.out = Some(PathBuf::from(value)),
                "jobs" => {
                    s.jobs = Some(
                        value
                            .parse()
                            .map_err(|_| LabError::Config(format!("jobs = `{value}` is not a count")))?,
                    )
                }
                "p" => s.p = Some(parse_f64(key, value)?),
                "rho" => s.rho = Some(parse_f64(key, value)?),
                "alpha" => s.alpha = Some(parse_f64(key, value)?),
                "sigma" => s.sigma = Some(parse_f64(key, value)?),
                "eps" => s.eps = Some(parse_f64(key, value)?),
                "t0" => s.t0 = Some(parse_f64(key, value)?),
                "dx" => s.dx = Some(parse_f64(key, value)?),
                "dt" => s.dt = Some(parse_f64(key, value)?),
                "t_final" => s.t_final = Some(parse_f64(key, value)?),
                "q" => s.q = Some(value.split(',').map(parse_q).collect::<Result<_, _>>()?),
                "checks" => s.checks = Some(value.split(',').map(|c| c.trim().parse()).collect::<Result<_, _>>()?),
                _ => return Err(LabError::Config(format!("line {}: unknown key `{key}`", n + 1))),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// `other`'s values win where present.
    pub fn overlay(mut self, other: Settings) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(scenario, out, jobs, p, rho, alpha, sigma, eps, t0, dx, dt, t_final, q, checks);
        self
    }
}

/// Validated settings. Per-scenario defaults apply to every field left as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub out: PathBuf,
    pub jobs: usize,
    pub settings: Settings,
    pub checks: Vec<Command>,
}

fn positive(name: &str, v: Option<f64>) -> Result<(), LabError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(LabError::Config(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl ScenarioConfig {
    pub fn resolve(settings: Settings, default_checks: Vec<Command>) -> Result<Self, LabError> {
        let d = ModelParams::default();
        let params = ModelParams {
            p: settings.p.unwrap_or(d.p),
            rho: settings.rho.unwrap_or(d.rho),
            alpha: settings.alpha.unwrap_or(d.alpha),
            sigma: settings.sigma.unwrap_or(d.sigma),
            eps: settings.eps.unwrap_or(d.eps),
            t0: settings.t0.unwrap_or(d.t0),
        };
        params.validate().map_err(|e| LabError::Config(e.to_string()))?;
        positive("dx", settings.dx)?;
        positive("dt", settings.dt)?;
        positive("t_final", settings.t_final)?;
        if let (Some(dx), Some(dt)) = (settings.dx, settings.dt) {
            if dt > dx {
                return Err(LabError::Config(format!(
                    "dt = {dt} violates the CFL condition dt <= dx = {dx}"
                )));
            }
        }
        let jobs = settings.jobs.unwrap_or(1);
        if jobs == 0 {
            return Err(LabError::Config("jobs must be at least 1".into()));
        }
        let checks = settings.checks.clone().unwrap_or(default_checks);
        Ok(ScenarioConfig {
            scenario: settings.scenario.clone().unwrap_or_else(|| "default".into()),
            out: settings.out.clone().unwrap_or_else(|| PathBuf::from("dampwave-out")),
            jobs,
            settings,
            checks,
        })
    }

    pub fn params(&self) -> ModelParams {
        let d = ModelParams::default();
        let s = &self.settings;
        ModelParams {
            p: s.p.unwrap_or(d.p),
            rho: s.rho.unwrap_or(d.rho),
            alpha: s.alpha.unwrap_or(d.alpha),
            sigma: s.sigma.unwrap_or(d.sigma),
            eps: s.eps.unwrap_or(d.eps),
            t0: s.t0.unwrap_or(d.t0),
        }
    }

    /// The config in file syntax. Keys left to scenario defaults are written
    /// as comments, so feeding the file back reproduces the run.
    pub fn to_text(&self) -> String {
        let s = &self.settings;
        let m = self.params();
        let mut out = String::new();
        let _ = writeln!(out, "scenario = {}", self.scenario);
        let _ = writeln!(out, "out = {}", self.out.display());
        let _ = writeln!(out, "jobs = {}", self.jobs);
        let nums = [
            ("p", Some(m.p)),
            ("rho", Some(m.rho)),
            ("alpha", Some(m.alpha)),
            ("sigma", Some(m.sigma)),
            ("eps", s.eps),
            ("t0", s.t0),
            ("dx", s.dx),
            ("dt", s.dt),
            ("t_final", s.t_final),
        ];
        for (k, v) in nums {
            match v {
                Some(v) => {
                    let _ = writeln!(out, "{k} = {v:?}");
                }
                None => {
                    let _ = writeln!(out, "# {k} = (scenario default)");
                }
            }
        }
        match &s.q {
            Some(qs) => {
                let list: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
                let _ = writeln!(out, "q = {}", list.join(","));
            }
            None => {
                let _ = writeln!(out, "# q = (scenario default)");
            }
        }
        let names: Vec<&str> = self.checks.iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "checks = {}", names.join(","));
        out
    }
}
