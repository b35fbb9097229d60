use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use casimir_core::checks::run_check;
use casimir_core::config::{load_config, Format, RunConfig};
use casimir_core::kernel::DenominatorPath;
use casimir_core::quadrature::Prefactors;
use casimir_core::report::{render_csv, render_sweep_table, render_table, SweepRow};
use casimir_core::run::{run_compute, run_sweep};
use casimir_core::Error;

const THREADS_VAR: &str = "CASIMIR_THREADS";

mod exit {
    pub const CHECK_FAILED: u8 = 1;
    pub const NON_CONVERGENCE: u8 = 2;
    pub const DEGENERATE: u8 = 3;
    pub const CONFIG: u8 = 4;
}

/// Casimir energy and forces between two plates across a layered medium.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy and forces for the configured system.
    Compute(Common),
    /// Energy and forces over the configured list of thicknesses.
    Sweep(Common),
    /// Run the verification suite on the configured system.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run description.
    #[arg(long)]
    config: PathBuf,
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Override the quadrature relative tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Use the single-interface closed form for the denominator (two-layer media only).
    #[arg(long)]
    debug_n2_path: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: exit::CONFIG,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => exit::NON_CONVERGENCE,
            Error::Degenerate(_) => exit::DEGENERATE,
            Error::Domain(_) | Error::Invalid { .. } => exit::CONFIG,
        };
        Failure { code, error: e.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::config(anyhow::anyhow!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(Failure::config)
}

fn prepare(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = load_config(&common.config).map_err(Failure::config)?;
    if let Some(tol) = common.rel_tol {
        cfg.quadrature.rel_tol = tol;
        cfg.quadrature.validate().map_err(Failure::config)?;
    }
    if let Some(f) = common.format {
        cfg.output.format = match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
        };
    }
    if let Some(out) = &common.out {
        cfg.output.path = Some(out.clone());
    }
    Ok(cfg)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::config),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("cannot write to stdout")
                .map_err(Failure::config)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let (Command::Compute(common) | Command::Sweep(common) | Command::Check(common)) = &cli.command;
    let cfg = prepare(common)?;
    let path = if common.debug_n2_path {
        DenominatorPath::TwoMedium
    } else {
        DenominatorPath::General
    };
    let title = format!("{} ({} layers)", common.config.display(), cfg.system.layer_count());

    match cli.command {
        Command::Compute(_) => {
            let result = run_compute(&cfg, path)?;
            let text = match cfg.output.format {
                Format::Table => render_table(&result, &title),
                Format::Csv => {
                    // The row is labelled by the swept thickness when a sweep is configured, else by d1.
                    let index = cfg
                        .sweep
                        .as_ref()
                        .map_or(1, |s| s.target.layer_index(cfg.system.layer_count()));
                    let target_m = cfg.system.layer(index)?.thickness;
                    render_csv(&[SweepRow {
                        target_m,
                        outcome: Ok(result),
                    }])
                }
            };
            emit(&text, cfg.output.path.as_deref())
        }
        Command::Sweep(_) => {
            let rows = run_sweep(&cfg, path)?;
            for row in &rows {
                if let Err(msg) = &row.outcome {
                    eprintln!("warning: target {:e} m failed: {msg}", row.target_m);
                }
            }
            let text = match cfg.output.format {
                Format::Table => render_sweep_table(&rows, &title),
                Format::Csv => render_csv(&rows),
            };
            emit(&text, cfg.output.path.as_deref())
        }
        Command::Check(_) => {
            let report = run_check(&cfg, &Prefactors::STANDARD);
            emit(&report.render(), cfg.output.path.as_deref())?;
            if report.passed() {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().map(|o| o.name).collect();
                Err(Failure {
                    code: exit::CHECK_FAILED,
                    error: anyhow::anyhow!("failed checks: {}", names.join(", ")),
                })
            }
        }
    }
}
