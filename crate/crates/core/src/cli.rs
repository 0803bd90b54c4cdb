//! Command-line surface: argument definitions, report records, and rendering.
//!
//! Reports are rendered fully in memory before anything is written, so a failing
//! command never leaves partial output behind. Reals use the shortest
//! representation that round-trips binary64.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::coupling::{eta_star, gamma_closed_form, gamma_star, ScaledParams};
use crate::dynamics::{run_time, ReducedSearch};
use crate::johnson::{GraphParams, VertexId, DEFAULT_FULL_CAP};
use crate::spectral::SpectralData;
use crate::validation::{convergence_sweep, validate_instance};

/// Relative `--out` paths are resolved against this directory when it is set.
pub const OUT_DIR_ENV: &str = "JOHNSON_WALK_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "johnson-walk", version, about = "Quantum-walk search on Johnson graphs J(n,k)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, multiplicities and squared projector overlaps.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical coupling γ°, with the closed form for k in {3,4,5}.
    Gamma {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Success probability at one time (default: the running time).
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Success probability on a uniform time grid.
    Scan {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// Defaults to twice the running time.
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long, default_value_t = 201)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full-space oracle checks against the reduced model.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        w: u64,
        #[arg(long, default_value_t = DEFAULT_FULL_CAP)]
        full_cap: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Asymptotic sweep over n at γ°.
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n_list: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Spectrum { output, .. }
            | Command::Gamma { output, .. }
            | Command::Simulate { output, .. }
            | Command::Scan { output, .. }
            | Command::Validate { output, .. }
            | Command::Sweep { output, .. } => output,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => e.exit_code(),
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub ell: usize,
    pub lambda: f64,
    pub mult: u64,
    pub p_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRow {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub eta_star: f64,
    pub gamma_star: f64,
    pub gamma_closed_form: Option<f64>,
    pub rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateRow {
    pub gamma: f64,
    pub t: f64,
    pub p_succ: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateRow {
    pub instance: String,
    pub check: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

/// Rendered report plus the exit code the process should return.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub exit_code: i32,
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

fn params(graph: &GraphArgs) -> Result<GraphParams, CliError> {
    Ok(GraphParams::new(graph.n, graph.k)?)
}

fn gamma_or_star(p: &GraphParams, gamma: Option<f64>) -> Result<f64, CliError> {
    match gamma {
        Some(g) if !(g > 0.0 && g.is_finite()) => {
            Err(crate::Error::Domain(format!("gamma must be positive and finite, got {g}")).into())
        }
        Some(g) => Ok(g),
        None => Ok(gamma_star(p)),
    }
}

/// Runs a command and renders its report without touching the filesystem.
pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let format = command.output().format;
    let done = |bytes| Ok(Outcome { bytes, exit_code: 0 });
    match command {
        Command::Spectrum { graph, .. } => {
            let spec = SpectralData::new(&params(graph)?)?;
            let rows: Vec<SpectrumRow> = (0..spec.dim())
                .map(|ell| SpectrumRow {
                    ell,
                    lambda: spec.lambdas[ell],
                    mult: spec.mults[ell],
                    p_sq: spec.overlaps_sq[ell],
                })
                .collect();
            done(render(&rows, format)?)
        }
        Command::Gamma { graph, .. } => {
            let p = params(graph)?;
            let sp = ScaledParams::from_graph(&p);
            let g = gamma_star(&p);
            let closed = gamma_closed_form(&sp).ok();
            let row = GammaRow {
                n: p.n(),
                k: p.k(),
                eps: sp.eps(),
                eta_star: eta_star(&sp),
                gamma_star: g,
                gamma_closed_form: closed,
                rel_diff: closed.map(|c| ((c - g) / g).abs()),
            };
            done(render(&[row], format)?)
        }
        Command::Simulate { graph, gamma, t, .. } => {
            let p = params(graph)?;
            let gamma = gamma_or_star(&p, *gamma)?;
            let t = t.unwrap_or_else(|| run_time(&p));
            if !(t >= 0.0 && t.is_finite()) {
                return Err(crate::Error::Domain(format!("time must be finite and non-negative, got {t}")).into());
            }
            let p_succ = ReducedSearch::new(&p, gamma)?.probability(t);
            done(render(&[SimulateRow { gamma, t, p_succ }], format)?)
        }
        Command::Scan { graph, gamma, t0, t1, m, .. } => {
            let p = params(graph)?;
            let gamma = gamma_or_star(&p, *gamma)?;
            let t1 = t1.unwrap_or_else(|| 2.0 * run_time(&p));
            let scan = ReducedSearch::new(&p, gamma)?.scan(*t0, t1, *m)?;
            let rows: Vec<ScanRow> =
                scan.times.iter().zip(&scan.probs).map(|(&t, &p)| ScanRow { t, p }).collect();
            done(render(&rows, format)?)
        }
        Command::Validate { graph, gamma, w, full_cap, .. } => {
            let p = params(graph)?;
            p.full_dim(*full_cap)?;
            let gamma = gamma_or_star(&p, *gamma)?;
            let report = validate_instance(&p, gamma, VertexId(*w), *full_cap)?;
            let rows: Vec<ValidateRow> = report
                .checks
                .iter()
                .map(|c| ValidateRow {
                    instance: report.instance.clone(),
                    check: c.check.clone(),
                    passed: c.passed,
                    residual: c.residual,
                    tolerance: c.tolerance,
                })
                .collect();
            let exit_code = if report.all_passed() { 0 } else { 1 };
            Ok(Outcome { bytes: render(&rows, format)?, exit_code })
        }
        Command::Sweep { k, n_list, .. } => done(render(&convergence_sweep(*k, n_list)?, format)?),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Executes the command and writes its report; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let outcome = execute(&cli.command)?;
    match &cli.command.output().out {
        Some(path) => std::fs::write(resolve_out(path), &outcome.bytes)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&outcome.bytes)?;
            lock.flush()?;
        }
    }
    Ok(outcome.exit_code)
}
