//! Subcommand dispatch and exit-code mapping.
//!
//! Data goes to the output paths only; diagnostics go to stderr. Exit codes:
//! 0 ok, 2 config/data parse, 3 invalid parameters, 4 nonconvergence,
//! 5 data/order mismatch, 6 Monte Carlo quality gate.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cli::config::RawConfig;
use crate::cli::output::{
    read_series_csv, write_aggregates_csv, write_json, write_replications_csv, write_series_csv,
    FitSummary, RunManifest,
};
use crate::error::Error;
use crate::estimator::{fit, fpe, select_order};
use crate::mc::{
    run_eig_experiment, run_moment_experiment, run_mspe_experiment, run_selection_experiment,
    ExperimentKind, McResult,
};
use crate::model::{validate_params, ModelOrder, ParamSpace};
use crate::sim::simulate;

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const CONFIG_PARSE: u8 = 2;
    pub const INVALID_PARAMS: u8 = 3;
    pub const NONCONVERGENCE: u8 = 4;
    pub const DATA_MISMATCH: u8 = 5;
    pub const MC_QUALITY: u8 = 6;
}

#[derive(Parser, Debug)]
#[command(
    name = "arma-fpe",
    version,
    about = "Conditional-least-squares ARMA estimation, FPE order selection, and Monte Carlo experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a series and write it as CSV (`t,y,eps`).
    Simulate(SimulateArgs),
    /// Fit a model to a data CSV and write a JSON summary.
    Fit(DataArgs),
    /// Run a Monte Carlo experiment into an output directory.
    Mc(McArgs),
    /// FPE order selection on a data CSV.
    Select(DataArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = auto). Never changes results.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DataArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Input data CSV with a `y` column.
    #[arg(long)]
    pub data: PathBuf,
    /// Output file path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    /// Which experiment to run.
    #[arg(value_enum)]
    pub kind: McKind,
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the master seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = auto). Never changes results.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum McKind {
    Moments,
    Mspe,
    Eig,
    Select,
}

impl From<McKind> for ExperimentKind {
    fn from(kind: McKind) -> Self {
        match kind {
            McKind::Moments => ExperimentKind::Moments,
            McKind::Mspe => ExperimentKind::Mspe,
            McKind::Eig => ExperimentKind::Eig,
            McKind::Select => ExperimentKind::Select,
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) => exit::CONFIG_PARSE,
        Error::InvalidParams(_) | Error::NoFeasibleStart => exit::INVALID_PARAMS,
        Error::SampleTooSmall { .. }
        | Error::LengthMismatch { .. }
        | Error::OrderMismatch { .. } => exit::DATA_MISMATCH,
        Error::AllCandidatesFailed => exit::NONCONVERGENCE,
        _ => exit::FAILURE,
    }
}

fn report_error(err: &Error) -> u8 {
    eprintln!("error: {err}");
    if let Error::InvalidParams(violations) = err {
        for v in violations {
            eprintln!("  violated: {v}");
        }
    }
    exit_code_for(err)
}

/// Thread count resolution: `--threads` first, then `ARMA_FPE_THREADS`,
/// otherwise automatic. Zero means automatic.
fn resolve_threads(flag: Option<usize>) -> Option<usize> {
    let k = flag.or_else(|| {
        std::env::var("ARMA_FPE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })?;
    (k > 0).then_some(k)
}

fn with_thread_pool<F: FnOnce() -> u8 + Send>(threads: Option<usize>, body: F) -> u8 {
    match resolve_threads(threads) {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("error: cannot build thread pool: {e}");
                exit::FAILURE
            }
        },
        None => body(),
    }
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Simulate(args) => with_thread_pool(args.threads, || cmd_simulate(&args)),
        Command::Fit(args) => with_thread_pool(args.threads, || cmd_fit(&args)),
        Command::Mc(args) => with_thread_pool(args.threads, || cmd_mc(&args)),
        Command::Select(args) => with_thread_pool(args.threads, || cmd_select(&args)),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> u8 {
    let config = match RawConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let setup = || -> crate::error::Result<(crate::model::Series, PathBuf)> {
        let params = config.model_params()?;
        let order = params.order();
        let space = config.space_for(order)?;
        let sim_section = config
            .sim
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing [sim] section".into()))?;
        let noise = config.noise()?;
        validate_params(&params, &space).into_result()?;
        let seed = args.seed.unwrap_or(sim_section.seed);
        let series = simulate(&params, &space, sim_section.n, &noise, seed)?;
        Ok((series, args.out.clone()))
    };
    match setup() {
        Ok((series, out)) => match write_series_csv(&out, &series) {
            Ok(()) => exit::OK,
            Err(e) => report_error(&e),
        },
        Err(e) => report_error(&e),
    }
}

fn cmd_fit(args: &DataArgs) -> u8 {
    let config = match RawConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let run = || -> crate::error::Result<(FitSummary, bool)> {
        let order = config.order()?;
        let series = read_series_csv(&args.data)?;
        if series.n() <= order.p_bar() {
            return Err(Error::SampleTooSmall {
                n: series.n(),
                p_bar: order.p_bar(),
            });
        }
        let space = config.space_for(order)?;
        let mut fit_cfg = config.fit_config_for(order, &space)?;
        if let Some(seed) = args.seed {
            fit_cfg.seed = seed;
            if config
                .fit
                .as_ref()
                .and_then(|f| f.starts.as_ref())
                .is_none()
            {
                fit_cfg.starts = crate::estimator::default_starts(order, &space, seed, 5)?;
            }
        }
        let report = fit(&series, order, &space, &fit_cfg)?;
        let criterion = fpe(report.objective, series.n(), order.p_bar())?;
        let converged = report.converged;
        Ok((
            FitSummary::new(order, series.n(), &report, criterion),
            converged,
        ))
    };
    match run() {
        Ok((summary, converged)) => {
            if let Err(e) = write_json(&args.out, &summary) {
                return report_error(&e);
            }
            if converged {
                exit::OK
            } else {
                eprintln!(
                    "fit did not converge; summary written to {}",
                    args.out.display()
                );
                exit::NONCONVERGENCE
            }
        }
        Err(e) => report_error(&e),
    }
}

fn run_mc_kind(
    kind: McKind,
    config: &RawConfig,
    seed_override: Option<u64>,
) -> crate::error::Result<McResult> {
    let mc = config.mc_config(seed_override)?;
    match kind {
        McKind::Moments => run_moment_experiment(&mc),
        McKind::Mspe => run_mspe_experiment(&mc),
        McKind::Eig => run_eig_experiment(&mc),
        McKind::Select => {
            let candidates = config.candidates()?;
            run_selection_experiment(&mc, &candidates)
        }
    }
}

fn cmd_mc(args: &McArgs) -> u8 {
    let config = match RawConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let started = Instant::now();
    let mc_config = match config.mc_config(args.seed) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let result = match run_mc_kind(args.kind, &config, args.seed) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return exit::FAILURE;
    }
    let replications_path = args.out.join("replications.csv");
    let aggregates_path = args.out.join("aggregates.csv");
    let manifest_path = args.out.join("manifest.json");
    let write = || -> crate::error::Result<()> {
        write_replications_csv(&replications_path, &result)?;
        write_aggregates_csv(&aggregates_path, &result)?;
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            command: format!("mc {}", result.kind),
            master_seed: mc_config.master_seed,
            config: &mc_config,
            starts: &result.starts,
            outputs: vec![
                "replications.csv".to_string(),
                "aggregates.csv".to_string(),
                "manifest.json".to_string(),
            ],
            nonconvergence: &result.nonconvergence,
            quality_ok: result.quality_ok,
        };
        write_json(&manifest_path, &manifest)
    };
    if let Err(e) = write() {
        return report_error(&e);
    }
    eprintln!(
        "mc {} finished in {:.2}s ({} records) -> {}",
        result.kind,
        started.elapsed().as_secs_f64(),
        result.records.len(),
        args.out.display()
    );
    if result.quality_ok {
        exit::OK
    } else {
        eprintln!("nonconvergence rate reached the quality gate; outputs flagged");
        exit::MC_QUALITY
    }
}

#[derive(Serialize)]
struct SelectionSummary {
    chosen: ModelOrder,
    table: Vec<SelectionEntry>,
    failed: Vec<(ModelOrder, String)>,
}

#[derive(Serialize)]
struct SelectionEntry {
    order: ModelOrder,
    fpe: f64,
    objective: f64,
    sigma2_hat: f64,
    converged: bool,
    estimate: crate::model::ArmaParams,
}

fn cmd_select(args: &DataArgs) -> u8 {
    let config = match RawConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let run = || -> crate::error::Result<(SelectionSummary, bool)> {
        let candidates = config.candidates()?;
        let series = read_series_csv(&args.data)?;
        let max_p = candidates.iter().map(ModelOrder::p_bar).max().unwrap_or(1);
        if series.n() <= max_p {
            return Err(Error::SampleTooSmall {
                n: series.n(),
                p_bar: max_p,
            });
        }
        let first_space = relaxed_space(&config, candidates[0]);
        let mut fit_cfg = config.fit_config_for(candidates[0], &first_space)?;
        if let Some(seed) = args.seed {
            fit_cfg.seed = seed;
        }
        let report = select_order(
            &series,
            &candidates,
            |o| relaxed_space(&config, o),
            &fit_cfg,
        )?;
        let chosen_converged = report
            .table
            .iter()
            .find(|c| c.order == report.chosen)
            .map(|c| c.report.converged)
            .unwrap_or(false);
        let summary = SelectionSummary {
            chosen: report.chosen,
            table: report
                .table
                .iter()
                .map(|c| SelectionEntry {
                    order: c.order,
                    fpe: c.fpe,
                    objective: c.report.objective,
                    sigma2_hat: c.report.sigma2_hat,
                    converged: c.report.converged,
                    estimate: c.report.estimate.clone(),
                })
                .collect(),
            failed: report.failed.clone(),
        };
        Ok((summary, chosen_converged))
    };
    match run() {
        Ok((summary, converged)) => {
            if let Err(e) = write_json(&args.out, &summary) {
                return report_error(&e);
            }
            if converged {
                exit::OK
            } else {
                exit::NONCONVERGENCE
            }
        }
        Err(e) => report_error(&e),
    }
}

/// Candidate space: configured margins with the box replicated to the
/// candidate's dimension (explicit bounds are used only when their length
/// matches).
fn relaxed_space(config: &RawConfig, order: ModelOrder) -> ParamSpace {
    if let Ok(space) = config.space_for(order) {
        if space.dim() == order.p_bar() {
            return space;
        }
    }
    let mut space = ParamSpace::defaults_for(order);
    if let Some(s) = &config.space {
        if let Some(v) = s.root_margin {
            space.root_margin = v;
        }
        if let Some(v) = s.common_root_tol {
            space.common_root_tol = v;
        }
        if let Some(v) = s.endpoint_tol {
            space.endpoint_tol = v;
        }
        if let (Some(lower), Some(upper)) = (&s.lower, &s.upper) {
            if !lower.is_empty() && lower.len() == upper.len() {
                space.lower = vec![lower[0]; order.p_bar()];
                space.upper = vec![upper[0]; order.p_bar()];
            }
        }
    }
    space
}
