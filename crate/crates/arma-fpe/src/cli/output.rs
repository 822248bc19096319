//! File formats: series CSV, replication/aggregate CSV, fit summaries, and
//! the run manifest. All numeric output uses 17 significant digits, enough to
//! round-trip every f64 exactly, so identical runs produce byte-identical
//! files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::FitReport;
use crate::mc::{Aggregates, McConfig, McResult, NonconvergenceRow};
use crate::model::{ArmaParams, ModelOrder, Series};

/// Full-precision decimal rendering (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Series CSV with header `t,y,eps` (the innovation column is present only
/// when the series carries innovations).
pub fn write_series_csv(path: &Path, series: &Series) -> Result<()> {
    let mut out = String::new();
    match series.innovations() {
        Some(eps) => {
            out.push_str("t,y,eps\n");
            for (i, (y, e)) in series.y().iter().zip(eps).enumerate() {
                out.push_str(&format!("{},{},{}\n", i + 1, fmt_f64(*y), fmt_f64(*e)));
            }
        }
        None => {
            out.push_str("t,y\n");
            for (i, y) in series.y().iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, fmt_f64(*y)));
            }
        }
    }
    write_file(path, &out)
}

/// Reads a series CSV: any file with a header naming a `y` column (extra
/// columns such as `t` and `eps` are ignored).
pub fn read_series_csv(path: &Path) -> Result<Series> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("data file is empty".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let y_idx = columns
        .iter()
        .position(|c| *c == "y")
        .ok_or_else(|| Error::InvalidConfig("data file has no `y` column".into()))?;
    let mut y = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let field = fields.get(y_idx).ok_or_else(|| {
            Error::InvalidConfig(format!("row {}: missing column {y_idx}", lineno + 2))
        })?;
        let value: f64 = field.trim().parse().map_err(|e| {
            Error::InvalidConfig(format!(
                "row {}: bad numeric value {field:?}: {e}",
                lineno + 2
            ))
        })?;
        y.push(value);
    }
    Ok(Series::new(y))
}

/// JSON summary written by the `fit` subcommand.
#[derive(Serialize)]
pub struct FitSummary {
    pub order: ModelOrder,
    pub n: usize,
    pub estimate: ArmaParams,
    pub objective: f64,
    pub sigma2_hat: f64,
    pub lambda_min: f64,
    pub iterations: usize,
    pub converged: bool,
    pub fpe: f64,
    pub start_index: usize,
    pub info_matrix: Vec<Vec<f64>>,
}

impl FitSummary {
    pub fn new(order: ModelOrder, n: usize, report: &FitReport, fpe: f64) -> Self {
        let p = order.p_bar();
        let info_matrix = (0..p)
            .map(|i| (0..p).map(|j| report.info_matrix[(i, j)]).collect())
            .collect();
        FitSummary {
            order,
            n,
            estimate: report.estimate.clone(),
            objective: report.objective,
            sigma2_hat: report.sigma2_hat,
            lambda_min: report.lambda_min,
            iterations: report.iterations,
            converged: report.converged,
            fpe,
            start_index: report.start_index,
            info_matrix,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(path, &text)
}

/// Per-replication CSV. Columns depend on the experiment kind; optional
/// values render as empty fields.
pub fn write_replications_csv(path: &Path, result: &McResult) -> Result<()> {
    let p_bar = result.true_params.p_bar();
    let mut header = vec![
        "n".to_string(),
        "rep".to_string(),
        "seed".to_string(),
        "converged".to_string(),
        "norm_stat".to_string(),
        "d".to_string(),
    ];
    for i in 1..=p_bar {
        header.push(format!("est_{i}"));
    }
    let qs: Vec<f64> = result
        .records
        .first()
        .map(|r| r.grid_sup.iter().map(|(q, _)| *q).collect())
        .unwrap_or_default();
    for q in &qs {
        header.push(format!("sup_q{q}"));
    }
    header.push("selected_p1".to_string());
    header.push("selected_p2".to_string());

    let mut out = header.join(",");
    out.push('\n');
    for r in &result.records {
        let mut fields = vec![
            r.n.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            r.converged.to_string(),
            r.norm_stat.map(fmt_f64).unwrap_or_default(),
            r.d.map(fmt_f64).unwrap_or_default(),
        ];
        match &r.estimate {
            Some(est) => fields.extend(est.to_vec().iter().map(|v| fmt_f64(*v))),
            None => fields.extend(std::iter::repeat_n(String::new(), p_bar)),
        }
        for (qi, _) in qs.iter().enumerate() {
            fields.push(
                r.grid_sup
                    .get(qi)
                    .map(|(_, v)| fmt_f64(*v))
                    .unwrap_or_default(),
            );
        }
        match r.selected {
            Some(order) => {
                fields.push(order.p1.to_string());
                fields.push(order.p2.to_string());
            }
            None => {
                fields.push(String::new());
                fields.push(String::new());
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Aggregates CSV, one schema per experiment kind.
pub fn write_aggregates_csv(path: &Path, result: &McResult) -> Result<()> {
    let mut out = String::new();
    match &result.aggregates {
        Aggregates::Moments(rows) => {
            out.push_str("n,q,estimate,std_err\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.n,
                    r.q,
                    fmt_f64(r.estimate),
                    fmt_f64(r.std_err)
                ));
            }
        }
        Aggregates::Mspe(rows) => {
            out.push_str("n,d_hat,std_err\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    r.n,
                    fmt_f64(r.d_hat),
                    fmt_f64(r.std_err)
                ));
            }
        }
        Aggregates::Eig(rows) => {
            out.push_str("n,q,estimate,std_err,infinite_count\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    r.q,
                    fmt_f64(r.estimate),
                    fmt_f64(r.std_err),
                    r.infinite_count
                ));
            }
        }
        Aggregates::Selection(rows) => {
            out.push_str("n,p1,p2,count,frequency\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    r.order.p1,
                    r.order.p2,
                    r.count,
                    fmt_f64(r.frequency)
                ));
            }
        }
    }
    write_file(path, &out)
}

/// Run manifest for `mc` invocations: tool version, the fully resolved
/// configuration, and the produced files. Everything here is deterministic
/// for a given config and seed; timing goes to the diagnostic stream instead.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub tool_version: &'static str,
    pub command: String,
    pub master_seed: u64,
    pub config: &'a McConfig,
    /// Start set used by fits inside the run.
    pub starts: &'a [ArmaParams],
    pub outputs: Vec<String>,
    pub nonconvergence: &'a [NonconvergenceRow],
    pub quality_ok: bool,
}
