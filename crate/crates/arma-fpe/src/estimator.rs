//! Conditional sum-of-squares estimation: the objective, a box- and
//! margin-constrained Levenberg-Marquardt minimizer with analytic Jacobian,
//! one-step prediction, the final-prediction-error criterion, and order
//! selection.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deriv::{derivative_path, residuals, DerivOrder};
use crate::error::{Error, Result};
use crate::model::{validate_params, ArmaParams, ModelOrder, ParamSpace, Series};

/// Damping retries per outer iteration before declaring a stall.
const MAX_DAMPING_ATTEMPTS: usize = 60;
/// Step halvings against the feasible set per trial direction.
const MAX_STEP_HALVINGS: usize = 30;
/// Floor applied to diagonal entries when damping, so degenerate columns
/// cannot freeze the damped system.
const DIAG_FLOOR: f64 = 1e-12;
/// Accepted steps whose actual reduction falls below this fraction of the
/// model-predicted reduction raise the damping instead of lowering it. This
/// keeps plain Gauss-Newton steps from ping-ponging across curved valleys,
/// where the ignored second-order residual term makes the full step
/// overshoot.
const GAIN_THRESHOLD: f64 = 0.25;
/// Damping ceiling; steps are far below `step_tol` long before this.
const LAMBDA_MAX: f64 = 1e100;

/// Sum with Neumaier compensation; the result is independent of input
/// permutation to well below 1e-10 relative error.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The conditional sum of squares `S_n(eta) = sum_t eps_t(eta)^2`.
pub fn sum_of_squares(params: &ArmaParams, y: &Series) -> f64 {
    compensated_sum(residuals(params, y).into_iter().map(|e| e * e))
}

/// Optimizer settings. `starts` are tried in order and the best final
/// objective wins; `seed` drives any generated starts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub initial_damping: f64,
    pub damping_up: f64,
    pub damping_down: f64,
    pub starts: Vec<ArmaParams>,
    pub seed: u64,
}

impl FitConfig {
    /// Settings with the default tolerances and an explicit start list.
    pub fn with_starts(starts: Vec<ArmaParams>, seed: u64) -> Self {
        FitConfig {
            max_iters: 200,
            grad_tol: 1e-8,
            step_tol: 1e-10,
            initial_damping: 1e-3,
            damping_up: 10.0,
            damping_down: 0.5,
            starts,
            seed,
        }
    }

    /// The default multi-start set: the box center plus four uniform draws
    /// from the admissible set (rejection-sampled). The center usually fails
    /// the endpoint-degeneracy margin in symmetric boxes; it is then replaced
    /// by a fifth draw.
    pub fn default_for(order: ModelOrder, space: &ParamSpace, seed: u64) -> Result<Self> {
        let starts = default_starts(order, space, seed, 5)?;
        Ok(FitConfig::with_starts(starts, seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.grad_tol) || !positive(self.step_tol) || !positive(self.initial_damping) {
            return Err(Error::InvalidArgument(
                "tolerances and damping must be positive".into(),
            ));
        }
        let up_ok = self.damping_up.is_finite() && self.damping_up > 1.0;
        let down_ok = self.damping_down > 0.0 && self.damping_down < 1.0;
        if !up_ok || !down_ok {
            return Err(Error::InvalidArgument(
                "damping_up must exceed 1 and damping_down lie in (0,1)".into(),
            ));
        }
        if self.starts.is_empty() {
            return Err(Error::InvalidArgument("at least one start required".into()));
        }
        Ok(())
    }
}

/// Generates `count` starting points: box center first (when admissible),
/// then seeded uniform draws from the admissible set.
pub fn default_starts(
    order: ModelOrder,
    space: &ParamSpace,
    seed: u64,
    count: usize,
) -> Result<Vec<ArmaParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(count);
    let center = space.center(order)?;
    if validate_params(&center, space).is_valid() {
        starts.push(center);
    }
    let mut attempts = 0usize;
    while starts.len() < count && attempts < 10_000 {
        attempts += 1;
        let v: Vec<f64> = space
            .lower
            .iter()
            .zip(&space.upper)
            .map(|(l, u)| rng.gen_range(*l..*u))
            .collect();
        let cand = ArmaParams::from_slice(order, &v)?;
        if validate_params(&cand, space).is_valid() {
            starts.push(cand);
        }
    }
    if starts.is_empty() {
        return Err(Error::NoFeasibleStart);
    }
    Ok(starts)
}

/// Outcome of a fit: the winning estimate with its objective, innovation
/// variance estimate, normalized information matrix, and convergence
/// metadata.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub estimate: ArmaParams,
    /// `S_n` at the estimate, recomputed by [`sum_of_squares`].
    pub objective: f64,
    /// `S_n(estimate) / n`.
    pub sigma2_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `n^{-1} sum_t grad eps_t grad eps_t^T` at the estimate.
    pub info_matrix: DMatrix<f64>,
    pub lambda_min: f64,
    /// Index into the start list of the winning start.
    pub start_index: usize,
}

#[allow(dead_code)] // accepted_steps and trace are exercised by tests only
pub(crate) struct LmOutcome {
    pub point: ArmaParams,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub accepted_steps: usize,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

fn eval_normal_equations(params: &ArmaParams, y: &Series) -> (f64, DMatrix<f64>, DVector<f64>) {
    let p = params.p_bar();
    let path = derivative_path(params, y, DerivOrder::Gradient);
    let mut jtj = DMatrix::zeros(p, p);
    let mut jtr = DVector::zeros(p);
    for t in 0..path.n() {
        let g = path.grad_row(t);
        let r = path.eps[t];
        for i in 0..p {
            jtr[i] += g[i] * r;
            for j in i..p {
                jtj[(i, j)] += g[i] * g[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            jtj[(i, j)] = jtj[(j, i)];
        }
    }
    let s = compensated_sum(path.eps.iter().map(|e| e * e));
    (s, jtj, jtr)
}

/// Levenberg-Marquardt from a single feasible start. Trial points must stay
/// in the box and pass validation; infeasible directions are step-halved and
/// only strictly improving steps are accepted, so accepted objectives are
/// nonincreasing and the final point is always admissible.
pub(crate) fn lm_minimize(
    y: &Series,
    order: ModelOrder,
    space: &ParamSpace,
    config: &FitConfig,
    start: &ArmaParams,
) -> LmOutcome {
    let p = order.p_bar();
    let mut eta = DVector::from_vec(start.to_vec());
    let (mut s, mut jtj, mut jtr) = eval_normal_equations(start, y);
    let mut lambda = config.initial_damping;
    let mut iterations = 0;
    let mut converged = false;
    let mut accepted_steps = 0;
    let mut trace = vec![s];

    'outer: while iterations < config.max_iters {
        iterations += 1;
        // grad S = 2 J^T r
        let grad_inf = jtr.iter().fold(0.0_f64, |m, v| m.max(2.0 * v.abs()));
        if grad_inf < config.grad_tol {
            converged = true;
            break;
        }

        let mut step_accepted = false;
        for _ in 0..MAX_DAMPING_ATTEMPTS {
            let mut damped = jtj.clone();
            for i in 0..p {
                damped[(i, i)] += lambda * jtj[(i, i)].max(DIAG_FLOOR);
            }
            let delta = match Cholesky::new(damped) {
                Some(chol) => chol.solve(&(-&jtr)),
                None => {
                    lambda = (lambda * config.damping_up).min(LAMBDA_MAX);
                    continue;
                }
            };
            if !delta.iter().all(|v| v.is_finite()) {
                lambda = (lambda * config.damping_up).min(LAMBDA_MAX);
                continue;
            }
            if delta.norm() < config.step_tol {
                // The damped system no longer proposes a meaningful move.
                converged = true;
                break 'outer;
            }

            // Halve the step until the trial point is admissible.
            let mut scale = 1.0;
            let mut feasible = None;
            for _ in 0..=MAX_STEP_HALVINGS {
                let cand_vec: Vec<f64> = (0..p).map(|i| eta[i] + scale * delta[i]).collect();
                if let Ok(cand) = ArmaParams::from_slice(order, &cand_vec) {
                    if validate_params(&cand, space).is_valid() {
                        feasible = Some((cand, scale));
                        break;
                    }
                }
                scale *= 0.5;
            }
            let Some((cand, scale)) = feasible else {
                lambda = (lambda * config.damping_up).min(LAMBDA_MAX);
                continue;
            };

            let s_new = sum_of_squares(&cand, y);
            if s_new.is_finite() && s_new < s {
                let step_norm = scale * delta.norm();
                // Gain ratio of actual to model-predicted reduction for the
                // (possibly halved) step.
                let sd = &delta * scale;
                let predicted = -2.0 * sd.dot(&jtr) - (&jtj * &sd).dot(&sd);
                let gain = (s - s_new) / predicted;
                eta = DVector::from_vec(cand.to_vec());
                let (s2, jtj2, jtr2) = eval_normal_equations(&cand, y);
                s = s2;
                jtj = jtj2;
                jtr = jtr2;
                if gain >= GAIN_THRESHOLD {
                    lambda *= config.damping_down;
                } else {
                    lambda = (lambda * config.damping_up).min(LAMBDA_MAX);
                }
                accepted_steps += 1;
                trace.push(s);
                step_accepted = true;
                if step_norm < config.step_tol {
                    converged = true;
                }
                break;
            }
            lambda = (lambda * config.damping_up).min(LAMBDA_MAX);
        }

        if !step_accepted || converged {
            break;
        }
    }

    let point = ArmaParams::from_slice(order, eta.as_slice()).expect("iterate dimensions fixed");
    LmOutcome {
        point,
        objective: s,
        iterations,
        converged,
        accepted_steps,
        trace,
    }
}

/// Minimizes the conditional sum of squares over the admissible set from
/// every start in the config, keeping the lowest final objective (ties broken
/// by the earlier start). The returned point is always admissible.
pub fn fit(
    y: &Series,
    order: ModelOrder,
    space: &ParamSpace,
    config: &FitConfig,
) -> Result<FitReport> {
    config.validate()?;
    let p = order.p_bar();
    if space.dim() != p {
        return Err(Error::InvalidArgument(format!(
            "space dimension {} does not match order {}",
            space.dim(),
            order
        )));
    }
    if y.n() <= p {
        return Err(Error::SampleTooSmall { n: y.n(), p_bar: p });
    }

    let mut best: Option<(usize, LmOutcome)> = None;
    let mut any_feasible = false;
    for (idx, start) in config.starts.iter().enumerate() {
        if start.order() != order {
            return Err(Error::OrderMismatch {
                p1: start.order().p1,
                p2: start.order().p2,
                want_p1: order.p1,
                want_p2: order.p2,
            });
        }
        if !validate_params(start, space).is_valid() {
            continue;
        }
        any_feasible = true;
        let outcome = lm_minimize(y, order, space, config, start);
        let better = match &best {
            None => true,
            Some((_, cur)) => outcome.objective < cur.objective,
        };
        if better {
            best = Some((idx, outcome));
        }
    }
    if !any_feasible {
        return Err(Error::NoFeasibleStart);
    }
    let (start_index, outcome) = best.expect("at least one feasible start ran");

    let estimate = outcome.point;
    let n = y.n();
    let objective = sum_of_squares(&estimate, y);
    let path = derivative_path(&estimate, y, DerivOrder::Gradient);
    let mut info = DMatrix::zeros(p, p);
    for t in 0..n {
        let g = path.grad_row(t);
        for i in 0..p {
            for j in 0..p {
                info[(i, j)] += g[i] * g[j];
            }
        }
    }
    info /= n as f64;
    let eig = SymmetricEigen::new(info.clone());
    let lambda_min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    Ok(FitReport {
        estimate,
        objective,
        sigma2_hat: objective / n as f64,
        iterations: outcome.iterations,
        converged: outcome.converged,
        info_matrix: info,
        lambda_min,
        start_index,
    })
}

/// One-step least-squares predictor `g_{n+1}(eta) = sum_i alpha_i y_{n+1-i} -
/// sum_j beta_j eps_{n+1-j}(eta)`, with residuals from the exact recursion.
pub fn predict_one_step(params: &ArmaParams, y: &Series) -> f64 {
    let eps = residuals(params, y);
    let obs = y.y();
    let n = y.n();
    let mut g = 0.0;
    for (i, &a) in params.ar.iter().enumerate() {
        let lag = i + 1;
        if n >= lag {
            g += a * obs[n - lag];
        }
    }
    for (j, &b) in params.ma.iter().enumerate() {
        let lag = j + 1;
        if n >= lag {
            g -= b * eps[n - lag];
        }
    }
    g
}

/// Final prediction error criterion `((n + p_bar) / ((n - p_bar) n)) * S_n`.
pub fn fpe(objective: f64, n: usize, p_bar: usize) -> Result<f64> {
    if n <= p_bar {
        return Err(Error::SampleTooSmall { n, p_bar });
    }
    Ok((n + p_bar) as f64 / ((n - p_bar) as f64 * n as f64) * objective)
}

/// One fitted candidate in a selection run.
#[derive(Clone, Debug)]
pub struct CandidateFit {
    pub order: ModelOrder,
    pub fpe: f64,
    pub report: FitReport,
}

/// Outcome of [`select_order`]: the chosen order, the per-candidate FPE
/// table, and any candidates that failed to fit (excluded from the
/// comparison).
#[derive(Clone, Debug)]
pub struct SelectionReport {
    pub chosen: ModelOrder,
    pub table: Vec<CandidateFit>,
    pub failed: Vec<(ModelOrder, String)>,
}

/// Fits every candidate order and returns the FPE minimizer. Exact ties are
/// broken by the smaller parameter count, then by candidate list order.
///
/// Starts from `config` are reused when their dimension matches a candidate;
/// otherwise the default multi-start set for that candidate's space is
/// generated from `config.seed`.
pub fn select_order<F>(
    y: &Series,
    candidates: &[ModelOrder],
    mut make_space: F,
    config: &FitConfig,
) -> Result<SelectionReport>
where
    F: FnMut(ModelOrder) -> ParamSpace,
{
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate orders given".into()));
    }
    let mut table = Vec::new();
    let mut failed = Vec::new();
    for &order in candidates {
        let space = make_space(order);
        let starts_match = config.starts.iter().all(|s| s.order() == order);
        let cfg = if starts_match {
            config.clone()
        } else {
            let mut cfg = config.clone();
            cfg.starts = match default_starts(order, &space, config.seed, 5) {
                Ok(s) => s,
                Err(e) => {
                    failed.push((order, e.to_string()));
                    continue;
                }
            };
            cfg
        };
        match fit(y, order, &space, &cfg) {
            Ok(report) => {
                let value = fpe(report.objective, y.n(), order.p_bar())?;
                table.push(CandidateFit {
                    order,
                    fpe: value,
                    report,
                });
            }
            Err(e) => failed.push((order, e.to_string())),
        }
    }
    if table.is_empty() {
        return Err(Error::AllCandidatesFailed);
    }
    let mut chosen = &table[0];
    for cand in &table[1..] {
        if cand.fpe < chosen.fpe
            || (cand.fpe == chosen.fpe && cand.order.p_bar() < chosen.order.p_bar())
        {
            chosen = cand;
        }
    }
    Ok(SelectionReport {
        chosen: chosen.order,
        table,
        failed,
    })
}
