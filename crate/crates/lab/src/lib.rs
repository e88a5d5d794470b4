//! Scenario runner for `dampwave-core`: config files, CSV output and the
//! `dampwave` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod exec;
pub mod output;

use config::{parse_q, Command, ScenarioConfig, Settings};
use output::{report_row, summary, OutputDir, REPORT_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical error: {0}")]
    Numeric(#[from] dampwave_core::Error),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Io { .. } | LabError::Numeric(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dampwave",
    version,
    about = "Checks and simulations for the damped wave equation with absorption"
)]
struct Cli {
    /// Scenario file with `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for pointwise evaluations.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    dx: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    t0: Option<f64>,
    #[arg(long = "t-final", global = true)]
    t_final: Option<f64>,
    /// Lebesgue exponent; repeat for several. Accepts `inf`.
    #[arg(long, global = true)]
    q: Vec<String>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Bessel function conformance against an integral oracle.
    BesselCheck,
    /// Kernel identities on constant data and the light-cone limit.
    KernelCheck,
    /// ODE supersolution residuals and derivative checks.
    OdeCheck,
    /// Decay of the heat-flow supersolution.
    HeatRates,
    /// Linear finite-difference run compared with the kernel solution.
    Simulate,
    /// Domination of the nonlinear solution by the shifted pullback bound.
    MainTheorem,
    /// Decay slopes of the nonlinear solution.
    PdeRates,
    /// Ordering of solutions with ordered data.
    Comparison,
    /// Derivative-to-profile ratios of the linear evolution.
    LemmaRatios,
    /// Every check, or the `checks` list from the config file.
    All,
}

impl Sub {
    fn command(&self) -> Option<Command> {
        Some(match self {
            Sub::BesselCheck => Command::BesselCheck,
            Sub::KernelCheck => Command::KernelCheck,
            Sub::OdeCheck => Command::OdeCheck,
            Sub::HeatRates => Command::HeatRates,
            Sub::Simulate => Command::Simulate,
            Sub::MainTheorem => Command::MainTheorem,
            Sub::PdeRates => Command::PdeRates,
            Sub::Comparison => Command::Comparison,
            Sub::LemmaRatios => Command::LemmaRatios,
            Sub::All => return None,
        })
    }
}

impl Cli {
    fn flag_settings(&self) -> Result<Settings, LabError> {
        let q = if self.q.is_empty() {
            None
        } else {
            Some(self.q.iter().map(|s| parse_q(s)).collect::<Result<_, _>>()?)
        };
        Ok(Settings {
            scenario: None,
            out: self.out.clone(),
            jobs: self.jobs,
            p: self.p,
            rho: self.rho,
            alpha: self.alpha,
            sigma: self.sigma,
            eps: self.eps,
            t0: self.t0,
            dx: self.dx,
            dt: self.dt,
            t_final: self.t_final,
            q,
            checks: None,
        })
    }
}

/// Parses `args` (including the program name), runs the selected checks and
/// returns the process exit code: 0 when every check passes, 1 on a failed
/// check or numerical error, 2 on a usage or config error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("dampwave: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, LabError> {
    let file = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let mut settings = file.overlay(cli.flag_settings()?);
    let checks = match cli.command.command() {
        Some(cmd) => {
            settings.scenario.get_or_insert_with(|| cmd.name().to_string());
            vec![cmd]
        }
        None => {
            settings.scenario.get_or_insert_with(|| "all".to_string());
            settings.checks.clone().unwrap_or_else(|| Command::ALL.to_vec())
        }
    };
    settings.checks = None;
    let cfg = ScenarioConfig::resolve(settings, checks)?;
    let out = OutputDir::create(&cfg.out)?;
    out.write("resolved_config.txt", &cfg.to_text())?;
    let exec = exec::RayonMap::new(cfg.jobs)?;
    let ctx = commands::Context {
        cfg: &cfg,
        out: &out,
        exec: &exec,
    };

    let mut reports = Vec::new();
    let mut numeric_error = None;
    for &cmd in &cfg.checks {
        match commands::run_command(cmd, &ctx) {
            Ok(rs) => reports.extend(rs.into_iter().map(|r| (cmd.name().to_string(), r))),
            Err(LabError::Numeric(e)) => {
                reports.push((
                    cmd.name().to_string(),
                    dampwave_core::CheckReport::new(
                        format!("{} aborted: {e}", cmd.name()),
                        false,
                        f64::NAN,
                        (0.0, 0.0),
                        None,
                    ),
                ));
                numeric_error.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    let rows: Vec<String> = reports
        .iter()
        .map(|(cmd, r)| format!("{cmd},{}", report_row(r)))
        .collect();
    out.csv("report.csv", &format!("command,{REPORT_HEADER}"), &rows)?;
    let text = summary(&reports);
    out.write("summary.txt", &text)?;
    print!("{text}");
    for (cmd, r) in reports.iter().filter(|r| !r.1.passed) {
        eprintln!("dampwave: check failed: {cmd}: {}", r.name);
    }
    Ok(numeric_error.is_none() && reports.iter().all(|r| r.1.passed))
}
