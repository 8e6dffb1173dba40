//! `mzidm`: dilaton phases, signal amplitudes, scans and verification gates
//! for atom-interferometer gradiometers.
//!
//! Exit status: 0 success, 1 invalid input, 2 a verification gate failed,
//! 3 a quadrature did not converge.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use mzi_dm::{ParamPath, PhiSMode, ScanAxis, Spacing};

use commands::Output;
use config::{parse_phi_s_mode, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "mzidm", version, about = "Dilaton dark-matter signals in atom-interferometer gradiometers")]
struct Cli {
    /// Scenario configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// CSV output file. Without it the CSV goes to stdout and the report to stderr.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Seed of the random verification scenarios.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,

    /// Worker threads.
    #[arg(long, global = true, env = "MZIDM_THREADS")]
    threads: Option<usize>,

    /// Relative tolerance for both verification gates.
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase contributions of both interferometers at a fixed dilaton phase.
    Phases,
    /// Signal amplitude with per-pair correlations.
    Signal {
        /// coherent or independent; defaults to numerics.phi_s_mode.
        #[arg(long, value_parser = parse_phi_s_mode)]
        phi_s: Option<PhiSMode>,
    },
    /// Signal amplitude over a grid of one or two parameters.
    Scan {
        /// PATH=START:END:linear|log:POINTS, SI values. Repeat for a second axis.
        #[arg(long = "axis", required = true, value_parser = parse_axis)]
        axes: Vec<ScanAxis>,
        /// coherent or independent; defaults to numerics.phi_s_mode.
        #[arg(long, value_parser = parse_phi_s_mode)]
        phi_s: Option<PhiSMode>,
    },
    /// Catalog-vs-oracle and analytic-vs-numeric gates over seeded scenarios.
    Verify {
        /// Number of scenarios; defaults to numerics.trials or 100.
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn parse_axis(s: &str) -> Result<ScanAxis, String> {
    let (path, range) = s.split_once('=').ok_or("expected PATH=START:END:SPACING:POINTS")?;
    let path: ParamPath = path.parse().map_err(|e: mzi_dm::Error| e.to_string())?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, end, spacing, points] = parts[..] else {
        return Err(format!("{path}: expected START:END:SPACING:POINTS, got '{range}'"));
    };
    let number = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("{path}: '{t}' is not a number"));
    let spacing: Spacing = spacing.parse().map_err(|e: mzi_dm::Error| e.to_string())?;
    let points: usize = points.trim().parse().map_err(|_| format!("{path}: '{points}' is not a point count"))?;
    ScanAxis::new(path, number(start)?, number(end)?, spacing, points).map_err(|e| e.to_string())
}

#[derive(Debug)]
struct GateFailure;

impl std::fmt::Display for GateFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification gate failed")
    }
}

impl std::error::Error for GateFailure {}

fn load(path: Option<&Path>) -> Result<ScenarioConfig> {
    let path = path.ok_or_else(|| anyhow!("this command needs --config PATH"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ScenarioConfig::parse(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn emit(out: &Output, path: Option<&Path>) -> Result<()> {
    match path {
        Some(_) => print!("{}", out.report),
        None => eprint!("{}", out.report),
    }
    out.table.emit(path)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(anyhow!("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(anyhow!("--tolerance must be a non-negative number, got {t}"));
        }
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Phases => emit(&commands::phases(&load(cli.config.as_deref())?)?, out),
        Command::Signal { phi_s } => {
            let cfg = load(cli.config.as_deref())?;
            emit(&commands::signal(&cfg, phi_s.unwrap_or(cfg.numerics.phi_s_mode))?, out)
        }
        Command::Scan { axes, phi_s } => {
            let cfg = load(cli.config.as_deref())?;
            emit(&commands::scan(&cfg, &axes, phi_s.unwrap_or(cfg.numerics.phi_s_mode))?, out)
        }
        Command::Verify { trials } => {
            let numerics = match cli.config.as_deref() {
                Some(p) => load(Some(p))?.numerics,
                None => config::Numerics::default(),
            };
            let mut tol = numerics.tolerances;
            if let Some(t) = cli.tolerance {
                tol.oracle_rel = t;
                tol.catalog_rel = t;
            }
            let v = commands::verify(trials.unwrap_or(numerics.trials), cli.seed, tol)?;
            emit(&v.output, out)?;
            if v.report.non_converged() {
                let e = v.report.errors.iter().find(|(_, e)| matches!(e, mzi_dm::Error::NonConvergence { .. }));
                let (n, e) = e.expect("non-converged trial");
                return Err(anyhow::Error::new(e.clone()).context(format!("trial {n}")));
            }
            if !v.report.passed() {
                return Err(GateFailure.into());
            }
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<GateFailure>()) {
        return 2;
    }
    let non_converged =
        err.chain().any(|e| matches!(e.downcast_ref::<mzi_dm::Error>(), Some(mzi_dm::Error::NonConvergence { .. })));
    if non_converged {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
