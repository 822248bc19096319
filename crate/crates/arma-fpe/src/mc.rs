//! Deterministic Monte Carlo replication engine for the moment-boundedness,
//! prediction-error, inverse-eigenvalue, and order-selection experiments.
//!
//! Every replication draws from its own stream, seeded by a pure mixing
//! function of `(master_seed, n, replication)`, so results are bit-identical
//! whether replications run serially or in parallel and do not depend on the
//! total replication count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{compensated_sum, fit, predict_one_step, select_order, FitConfig};
use crate::fisher::{grid_sup_inverse_eig, GridSpec};
use crate::model::{validate_params, ArmaParams, ModelOrder, ParamSpace};
use crate::sim::{simulate, NoiseSpec};

/// Replication runs are flagged invalid when the nonconvergence rate at any
/// sample size reaches this fraction.
pub const NONCONVERGENCE_GATE: f64 = 0.02;

/// splitmix64 finalizer; the standard constants are part of the output
/// contract since reruns must reproduce streams exactly.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` at sample size `n`: three chained splitmix64
/// rounds over `(master_seed, n, rep)`. Independent of the number of
/// replications and of execution order.
pub fn replication_seed(master_seed: u64, n: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n) ^ rep)
}

/// Which experiment a configuration is driving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Moments,
    Mspe,
    Eig,
    Select,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::Moments => "moments",
            ExperimentKind::Mspe => "mspe",
            ExperimentKind::Eig => "eig",
            ExperimentKind::Select => "select",
        };
        f.write_str(s)
    }
}

/// Full experiment description. `fit_config.starts` is augmented with the
/// true parameter point when the engine fits, and the effective start set is
/// echoed in the result metadata.
#[derive(Clone, Debug, Serialize)]
pub struct McConfig {
    pub true_params: ArmaParams,
    pub order: ModelOrder,
    pub space: ParamSpace,
    pub noise: NoiseSpec,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub moment_orders: Vec<f64>,
    pub grid: Option<GridSpec>,
    pub fit_config: FitConfig,
}

impl McConfig {
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let p = self.order.p_bar();
        if self.true_params.order() != self.order {
            return Err(Error::InvalidConfig(
                "true_params orders do not match the configured order".into(),
            ));
        }
        if self.space.dim() != p {
            return Err(Error::InvalidConfig(
                "space dimension does not match the configured order".into(),
            ));
        }
        validate_params(&self.true_params, &self.space)
            .into_result()
            .map_err(|e| Error::InvalidConfig(format!("true_params invalid: {e}")))?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("sample_sizes must be nonempty".into()));
        }
        if self.sample_sizes.iter().any(|&n| n <= p) {
            return Err(Error::InvalidConfig(format!(
                "every sample size must exceed the parameter count {p}"
            )));
        }
        self.noise
            .validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if matches!(self.noise, NoiseSpec::Injected { .. }) {
            return Err(Error::InvalidConfig(
                "replication experiments need a generative noise spec, not injected innovations"
                    .into(),
            ));
        }
        match kind {
            ExperimentKind::Moments | ExperimentKind::Eig => {
                if self.moment_orders.is_empty() {
                    return Err(Error::InvalidConfig(
                        "moment_orders must be nonempty".into(),
                    ));
                }
                if self.moment_orders.iter().any(|&q| q.is_nan() || q < 1.0) {
                    return Err(Error::InvalidConfig("moment orders must be >= 1".into()));
                }
                let max_q = self.moment_orders.iter().copied().fold(1.0_f64, f64::max);
                // Estimator moments of order q lean on innovation moments of
                // order beyond 4q; the Gaussian family always qualifies.
                if self.noise.finite_moment_sup() <= 4.0 * max_q {
                    return Err(Error::InvalidConfig(format!(
                        "noise must have finite moments beyond order {}",
                        4.0 * max_q
                    )));
                }
                if kind == ExperimentKind::Eig && self.grid.is_none() {
                    return Err(Error::InvalidConfig(
                        "eig experiment requires a grid spec".into(),
                    ));
                }
            }
            ExperimentKind::Mspe => {
                if self.noise.finite_moment_sup() <= 18.0 {
                    return Err(Error::InvalidConfig(
                        "the prediction-error expansion needs innovation moments beyond order 18"
                            .into(),
                    ));
                }
            }
            ExperimentKind::Select => {}
        }
        self.fit_config.validate()?;
        for s in &self.fit_config.starts {
            if s.order() != self.order {
                return Err(Error::InvalidConfig(
                    "fit_config starts must match the configured order".into(),
                ));
            }
        }
        Ok(())
    }

    /// The start set actually used when fitting: the true point first, then
    /// the configured starts (exact duplicates of the true point dropped).
    pub fn effective_starts(&self) -> Vec<ArmaParams> {
        let mut starts = vec![self.true_params.clone()];
        for s in &self.fit_config.starts {
            if *s != self.true_params {
                starts.push(s.clone());
            }
        }
        starts
    }

    fn fit_config_with_effective_starts(&self) -> FitConfig {
        let mut cfg = self.fit_config.clone();
        cfg.starts = self.effective_starts();
        cfg
    }
}

/// Everything retained per replication; aggregates are recomputable from
/// these records alone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: usize,
    pub rep: u64,
    pub seed: u64,
    pub converged: bool,
    pub estimate: Option<ArmaParams>,
    /// `sqrt(n) * ||estimate - truth||`.
    pub norm_stat: Option<f64>,
    /// Predictor gap `g_{n+1}(truth) - g_{n+1}(estimate)`.
    pub d: Option<f64>,
    /// `(q, grid supremum of lambda_min^{-q})` pairs.
    pub grid_sup: Vec<(f64, f64)>,
    pub selected: Option<ModelOrder>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentRow {
    pub n: usize,
    pub q: f64,
    /// Monte Carlo mean of `norm_stat^q`.
    pub estimate: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MspeRow {
    pub n: usize,
    /// `n * mean(d^2)`, the direct estimate of `n (MSPE - sigma^2)`.
    pub d_hat: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigRow {
    pub n: usize,
    pub q: f64,
    pub estimate: f64,
    pub std_err: f64,
    pub infinite_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelectionRow {
    pub n: usize,
    pub order: ModelOrder,
    pub count: usize,
    /// Count over replications with a successful selection.
    pub frequency: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Aggregates {
    Moments(Vec<MomentRow>),
    Mspe(Vec<MspeRow>),
    Eig(Vec<EigRow>),
    Selection(Vec<SelectionRow>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonconvergenceRow {
    pub n: usize,
    pub count: usize,
    pub rate: f64,
}

/// Result of one experiment: per-replication records in `(n, rep)` order,
/// aggregates per sample size, and the convergence quality gate.
#[derive(Clone, Debug)]
pub struct McResult {
    pub kind: ExperimentKind,
    pub true_params: ArmaParams,
    /// Start set used by every fit, echoed for reproducibility.
    pub starts: Vec<ArmaParams>,
    pub records: Vec<RepRecord>,
    pub aggregates: Aggregates,
    pub nonconvergence: Vec<NonconvergenceRow>,
    /// True when the nonconvergence rate stays below the gate at every `n`.
    pub quality_ok: bool,
}

/// Monte Carlo mean and standard error of the mean, accumulated in record
/// order with compensated sums.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n < 2 || !mean.is_finite() {
        return (mean, f64::NAN);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn run_records<F>(config: &McConfig, per_rep: F) -> Vec<RepRecord>
where
    F: Fn(usize, u64, u64) -> RepRecord + Sync,
{
    let mut records = Vec::with_capacity(config.sample_sizes.len() * config.replications);
    for &n in &config.sample_sizes {
        let mut batch: Vec<RepRecord> = (0..config.replications as u64)
            .into_par_iter()
            .map(|rep| per_rep(n, rep, replication_seed(config.master_seed, n as u64, rep)))
            .collect();
        records.append(&mut batch);
    }
    records
}

fn nonconvergence_rows(config: &McConfig, records: &[RepRecord]) -> (Vec<NonconvergenceRow>, bool) {
    let mut rows = Vec::new();
    let mut ok = true;
    for &n in &config.sample_sizes {
        let count = records.iter().filter(|r| r.n == n && !r.converged).count();
        let rate = count as f64 / config.replications as f64;
        if rate >= NONCONVERGENCE_GATE {
            ok = false;
        }
        rows.push(NonconvergenceRow { n, count, rate });
    }
    (rows, ok)
}

/// Estimator moment-boundedness experiment: per replication, simulate at the
/// truth, fit, and record `sqrt(n)||estimate - truth||`; aggregates are the
/// Monte Carlo means of the `q`-th powers for each requested `q`.
/// Nonconverged fits are recorded and included — excluding them would bias
/// the moment — and gate the run's quality flag.
pub fn run_moment_experiment(config: &McConfig) -> Result<McResult> {
    config.validate(ExperimentKind::Moments)?;
    let fit_cfg = config.fit_config_with_effective_starts();
    let records = run_records(config, |n, rep, seed| {
        let y = simulate(&config.true_params, &config.space, n, &config.noise, seed)
            .expect("validated config simulates");
        match fit(&y, config.order, &config.space, &fit_cfg) {
            Ok(report) => {
                let norm = (n as f64).sqrt() * report.estimate.distance(&config.true_params);
                RepRecord {
                    n,
                    rep,
                    seed,
                    converged: report.converged,
                    estimate: Some(report.estimate),
                    norm_stat: Some(norm),
                    d: None,
                    grid_sup: Vec::new(),
                    selected: None,
                }
            }
            Err(_) => RepRecord {
                n,
                rep,
                seed,
                converged: false,
                estimate: None,
                norm_stat: None,
                d: None,
                grid_sup: Vec::new(),
                selected: None,
            },
        }
    });

    let mut rows = Vec::new();
    for &n in &config.sample_sizes {
        for &q in &config.moment_orders {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.norm_stat.map_or(f64::NAN, |s| s.powf(q)))
                .collect();
            let (estimate, std_err) = mean_and_se(&values);
            rows.push(MomentRow {
                n,
                q,
                estimate,
                std_err,
            });
        }
    }
    let (nonconvergence, quality_ok) = nonconvergence_rows(config, &records);
    Ok(McResult {
        kind: ExperimentKind::Moments,
        true_params: config.true_params.clone(),
        starts: fit_cfg.starts,
        records,
        aggregates: Aggregates::Moments(rows),
        nonconvergence,
        quality_ok,
    })
}

/// Mean-squared-prediction-error experiment with the variance-reduced
/// estimator: simulate `n + 1` observations, fit on the first `n`, and record
/// the predictor gap `d = g_{n+1}(truth) - g_{n+1}(estimate)` (the extra
/// observation itself never enters). Since the next innovation is independent
/// of the past, `MSPE = sigma^2 + E(d^2)` exactly, so `d_hat = n * mean(d^2)`
/// estimates `n (MSPE - sigma^2)` without the innovation-variance noise
/// floor.
pub fn run_mspe_experiment(config: &McConfig) -> Result<McResult> {
    config.validate(ExperimentKind::Mspe)?;
    let fit_cfg = config.fit_config_with_effective_starts();
    let records = run_records(config, |n, rep, seed| {
        let full = simulate(
            &config.true_params,
            &config.space,
            n + 1,
            &config.noise,
            seed,
        )
        .expect("validated config simulates");
        let head = full.head(n);
        match fit(&head, config.order, &config.space, &fit_cfg) {
            Ok(report) => {
                let g_true = predict_one_step(&config.true_params, &head);
                let g_hat = predict_one_step(&report.estimate, &head);
                let norm = (n as f64).sqrt() * report.estimate.distance(&config.true_params);
                RepRecord {
                    n,
                    rep,
                    seed,
                    converged: report.converged,
                    estimate: Some(report.estimate),
                    norm_stat: Some(norm),
                    d: Some(g_true - g_hat),
                    grid_sup: Vec::new(),
                    selected: None,
                }
            }
            Err(_) => RepRecord {
                n,
                rep,
                seed,
                converged: false,
                estimate: None,
                norm_stat: None,
                d: None,
                grid_sup: Vec::new(),
                selected: None,
            },
        }
    });

    let mut rows = Vec::new();
    for &n in &config.sample_sizes {
        let values: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n)
            .map(|r| {
                let d = r.d.unwrap_or(f64::NAN);
                n as f64 * d * d
            })
            .collect();
        let (d_hat, std_err) = mean_and_se(&values);
        rows.push(MspeRow { n, d_hat, std_err });
    }
    let (nonconvergence, quality_ok) = nonconvergence_rows(config, &records);
    Ok(McResult {
        kind: ExperimentKind::Mspe,
        true_params: config.true_params.clone(),
        starts: fit_cfg.starts,
        records,
        aggregates: Aggregates::Mspe(rows),
        nonconvergence,
        quality_ok,
    })
}

/// Uniform inverse-eigenvalue moment experiment: per replication, simulate at
/// the truth and evaluate the grid supremum of `lambda_min^{-q}` for each
/// requested `q`. No fitting is involved.
pub fn run_eig_experiment(config: &McConfig) -> Result<McResult> {
    config.validate(ExperimentKind::Eig)?;
    let grid = config.grid.clone().expect("validated config has grid");
    let records = run_records(config, |n, rep, seed| {
        let y = simulate(&config.true_params, &config.space, n, &config.noise, seed)
            .expect("validated config simulates");
        let grid_sup = config
            .moment_orders
            .iter()
            .map(|&q| {
                let stat = grid_sup_inverse_eig(&y, &grid, &config.space, q)
                    .expect("validated grid is nonempty");
                (q, stat.value)
            })
            .collect();
        RepRecord {
            n,
            rep,
            seed,
            converged: true,
            estimate: None,
            norm_stat: None,
            d: None,
            grid_sup,
            selected: None,
        }
    });

    let mut rows = Vec::new();
    for &n in &config.sample_sizes {
        for (qi, &q) in config.moment_orders.iter().enumerate() {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.grid_sup[qi].1)
                .collect();
            let infinite_count = values.iter().filter(|v| v.is_infinite()).count();
            let (estimate, std_err) = mean_and_se(&values);
            rows.push(EigRow {
                n,
                q,
                estimate,
                std_err,
                infinite_count,
            });
        }
    }
    let (nonconvergence, quality_ok) = nonconvergence_rows(config, &records);
    Ok(McResult {
        kind: ExperimentKind::Eig,
        true_params: config.true_params.clone(),
        starts: Vec::new(),
        records,
        aggregates: Aggregates::Eig(rows),
        nonconvergence,
        quality_ok,
    })
}

/// Selection-frequency experiment: per replication, simulate at the truth and
/// run FPE order selection over the candidates. Frequencies are relative to
/// the replications where selection succeeded; a replication counts as
/// nonconverged when selection fails outright or the chosen candidate's fit
/// did not converge.
///
/// Candidate spaces replicate the configured margins and the first box
/// coordinate's bounds across each candidate's dimension.
pub fn run_selection_experiment(config: &McConfig, candidates: &[ModelOrder]) -> Result<McResult> {
    config.validate(ExperimentKind::Select)?;
    if candidates.is_empty() {
        return Err(Error::InvalidConfig(
            "selection experiment needs at least one candidate order".into(),
        ));
    }
    let base_space = config.space.clone();
    let make_space = move |order: ModelOrder| -> ParamSpace {
        let p = order.p_bar();
        ParamSpace {
            lower: vec![base_space.lower[0]; p],
            upper: vec![base_space.upper[0]; p],
            root_margin: base_space.root_margin,
            common_root_tol: base_space.common_root_tol,
            endpoint_tol: base_space.endpoint_tol,
        }
    };
    let records = run_records(config, |n, rep, seed| {
        let y = simulate(&config.true_params, &config.space, n, &config.noise, seed)
            .expect("validated config simulates");
        match select_order(&y, candidates, make_space.clone(), &config.fit_config) {
            Ok(sel) => {
                let chosen_report = sel
                    .table
                    .iter()
                    .find(|c| c.order == sel.chosen)
                    .expect("chosen order is in the table");
                RepRecord {
                    n,
                    rep,
                    seed,
                    converged: chosen_report.report.converged,
                    estimate: None,
                    norm_stat: None,
                    d: None,
                    grid_sup: Vec::new(),
                    selected: Some(sel.chosen),
                }
            }
            Err(_) => RepRecord {
                n,
                rep,
                seed,
                converged: false,
                estimate: None,
                norm_stat: None,
                d: None,
                grid_sup: Vec::new(),
                selected: None,
            },
        }
    });

    let mut rows = Vec::new();
    for &n in &config.sample_sizes {
        let succeeded = records
            .iter()
            .filter(|r| r.n == n && r.selected.is_some())
            .count();
        for &order in candidates {
            let count = records
                .iter()
                .filter(|r| r.n == n && r.selected == Some(order))
                .count();
            let frequency = if succeeded > 0 {
                count as f64 / succeeded as f64
            } else {
                f64::NAN
            };
            rows.push(SelectionRow {
                n,
                order,
                count,
                frequency,
            });
        }
    }
    let (nonconvergence, quality_ok) = nonconvergence_rows(config, &records);
    Ok(McResult {
        kind: ExperimentKind::Select,
        true_params: config.true_params.clone(),
        starts: config.fit_config.starts.clone(),
        records,
        aggregates: Aggregates::Selection(rows),
        nonconvergence,
        quality_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base_config(p1: usize, p2: usize, ar: Vec<f64>, ma: Vec<f64>) -> McConfig {
        let order = ModelOrder { p1, p2 };
        let truth = ArmaParams::new(ar, ma).unwrap();
        let space = ParamSpace::defaults_for(order);
        let fit_config = FitConfig::default_for(order, &space, 1).unwrap();
        McConfig {
            true_params: truth,
            order,
            space,
            noise: NoiseSpec::Gaussian { sigma2: 1.0 },
            sample_sizes: vec![60],
            replications: 4,
            master_seed: 31,
            moment_orders: vec![2.0],
            grid: None,
            fit_config,
        }
    }

    #[test]
    fn seed_mixing_is_stable_and_spread() {
        let a = replication_seed(1, 100, 0);
        assert_eq!(a, replication_seed(1, 100, 0));
        assert_ne!(a, replication_seed(1, 100, 1));
        assert_ne!(a, replication_seed(1, 200, 0));
        assert_ne!(a, replication_seed(2, 100, 0));
    }

    #[test]
    fn single_replication_matches_direct_fit() {
        let mut cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        cfg.replications = 1;
        let result = run_moment_experiment(&cfg).unwrap();
        assert_eq!(result.records.len(), 1);

        let seed = replication_seed(cfg.master_seed, 60, 0);
        let y = simulate(&cfg.true_params, &cfg.space, 60, &cfg.noise, seed).unwrap();
        let fit_cfg = cfg.fit_config_with_effective_starts();
        let report = fit(&y, cfg.order, &cfg.space, &fit_cfg).unwrap();
        let want = (60.0_f64).sqrt() * report.estimate.distance(&cfg.true_params);
        assert_eq!(result.records[0].norm_stat, Some(want));
        match &result.aggregates {
            Aggregates::Moments(rows) => {
                assert_eq!(rows[0].estimate, want.powf(2.0));
                assert!(rows[0].std_err.is_nan());
            }
            _ => panic!("wrong aggregate kind"),
        }
    }

    #[test]
    fn rerun_is_bit_identical() {
        let cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        let a = run_moment_experiment(&cfg).unwrap();
        let b = run_moment_experiment(&cfg).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.norm_stat, rb.norm_stat);
            assert_eq!(ra.seed, rb.seed);
        }
    }

    #[test]
    fn moment_aggregate_recomputable_from_records() {
        let mut cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        cfg.replications = 8;
        cfg.moment_orders = vec![2.0, 4.0];
        let result = run_moment_experiment(&cfg).unwrap();
        let rows = match &result.aggregates {
            Aggregates::Moments(rows) => rows,
            _ => panic!(),
        };
        for row in rows {
            let values: Vec<f64> = result
                .records
                .iter()
                .filter(|r| r.n == row.n)
                .map(|r| r.norm_stat.unwrap().powf(row.q))
                .collect();
            let (mean, se) = mean_and_se(&values);
            assert_abs_diff_eq!(row.estimate, mean, epsilon = 1e-12);
            assert_abs_diff_eq!(row.std_err, se, epsilon = 1e-12);
        }
    }

    #[test]
    fn mspe_d_scales_with_sigma_for_pure_ar() {
        // The AR estimate is scale-invariant, so the predictor gap scales
        // linearly in sigma up to optimizer tolerance.
        let mut cfg = base_config(1, 0, vec![0.6], vec![]);
        cfg.sample_sizes = vec![80];
        cfg.replications = 3;
        cfg.fit_config.grad_tol = 1e-12;
        cfg.fit_config.step_tol = 1e-14;
        let base = run_mspe_experiment(&cfg).unwrap();
        let c = 3.0;
        cfg.noise = NoiseSpec::Gaussian { sigma2: c * c };
        let scaled = run_mspe_experiment(&cfg).unwrap();
        for (a, b) in base.records.iter().zip(&scaled.records) {
            let da = a.d.unwrap();
            let db = b.d.unwrap();
            assert!(
                (db - c * da).abs() <= 1e-5 * da.abs().max(1e-3),
                "d {da} scaled {db}"
            );
        }
    }

    #[test]
    fn eig_singleton_grid_matches_ar1_formula() {
        let mut cfg = base_config(1, 0, vec![0.6], vec![]);
        cfg.moment_orders = vec![1.0];
        cfg.grid = Some(GridSpec::new(cfg.true_params.clone(), 0.1, 1).unwrap());
        cfg.replications = 3;
        let result = run_eig_experiment(&cfg).unwrap();
        for record in &result.records {
            let y = simulate(
                &cfg.true_params,
                &cfg.space,
                record.n,
                &cfg.noise,
                record.seed,
            )
            .unwrap();
            let mean_sq: f64 = (1..record.n)
                .map(|t| y.y()[t - 1] * y.y()[t - 1])
                .sum::<f64>()
                / record.n as f64;
            assert_abs_diff_eq!(record.grid_sup[0].1, 1.0 / mean_sq, epsilon = 1e-10);
        }
    }

    #[test]
    fn eig_aggregates_recomputable() {
        let mut cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        cfg.moment_orders = vec![2.0];
        cfg.grid = Some(GridSpec::new(cfg.true_params.clone(), 0.05, 3).unwrap());
        cfg.replications = 5;
        let result = run_eig_experiment(&cfg).unwrap();
        let rows = match &result.aggregates {
            Aggregates::Eig(rows) => rows,
            _ => panic!(),
        };
        for row in rows {
            let values: Vec<f64> = result
                .records
                .iter()
                .filter(|r| r.n == row.n)
                .map(|r| r.grid_sup[0].1)
                .collect();
            let (mean, se) = mean_and_se(&values);
            assert_abs_diff_eq!(row.estimate, mean, epsilon = 1e-12);
            assert_abs_diff_eq!(row.std_err, se, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_candidate_always_selected() {
        let mut cfg = base_config(1, 0, vec![0.6], vec![]);
        cfg.replications = 3;
        cfg.sample_sizes = vec![40];
        let only = [ModelOrder { p1: 1, p2: 0 }];
        let result = run_selection_experiment(&cfg, &only).unwrap();
        let rows = match &result.aggregates {
            Aggregates::Selection(rows) => rows,
            _ => panic!(),
        };
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 3);
        assert_eq!(rows[0].frequency, 1.0);
    }

    #[test]
    fn selection_frequencies_sum_to_one() {
        let mut cfg = base_config(1, 0, vec![0.6], vec![]);
        cfg.replications = 6;
        cfg.sample_sizes = vec![80];
        let candidates = [ModelOrder { p1: 1, p2: 0 }, ModelOrder { p1: 2, p2: 0 }];
        let result = run_selection_experiment(&cfg, &candidates).unwrap();
        let rows = match &result.aggregates {
            Aggregates::Selection(rows) => rows,
            _ => panic!(),
        };
        let total: usize = rows.iter().map(|r| r.count).sum();
        let succeeded = result
            .records
            .iter()
            .filter(|r| r.selected.is_some())
            .count();
        assert_eq!(total, succeeded);
        let freq_sum: f64 = rows.iter().map(|r| r.frequency).sum();
        assert_abs_diff_eq!(freq_sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn student_t_with_low_df_rejected_for_moments() {
        let mut cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        cfg.moment_orders = vec![4.0];
        cfg.noise = NoiseSpec::StudentT {
            df: 10.0,
            sigma2: 1.0,
        };
        assert!(matches!(
            run_moment_experiment(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn injected_noise_rejected() {
        let mut cfg = base_config(1, 1, vec![0.5], vec![0.3]);
        cfg.noise = NoiseSpec::Injected { eps: vec![0.0; 60] };
        assert!(matches!(
            run_moment_experiment(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }
}
