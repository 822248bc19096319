//! Conditional-least-squares machinery for ARMA(p1, p2) models: exact
//! residual/gradient/Hessian recursions, a constrained Levenberg-Marquardt
//! estimator, Fisher-information eigenvalue diagnostics, final-prediction-
//! error order selection, and a deterministic Monte Carlo harness for the
//! moment-boundedness and prediction-error experiments built on top of them.
//!
//! Start with the runnable examples (`cargo run --example fit_css`, etc.);
//! the `cli` module backs the `arma-fpe` binary for batch use.

pub mod cli;
pub mod deriv;
pub mod error;
pub mod estimator;
pub mod filter;
pub mod fisher;
pub mod mc;
pub mod model;
pub mod poly;
pub mod sim;

pub use error::{Error, Result};
pub use model::{validate_params, ArmaParams, ModelOrder, ParamSpace, Series, Validity, Violation};
pub use sim::{arma_recursion, simulate, NoiseSpec};

pub use deriv::{derivative_path, residuals, DerivOrder, DerivativePath};
pub use filter::{decay_fit, filter_bank, DecayFit, FilterBank};
pub use poly::{expand_rational, Poly};

pub use estimator::{
    compensated_sum, fit, fpe, predict_one_step, select_order, sum_of_squares, CandidateFit,
    FitConfig, FitReport, SelectionReport,
};
pub use fisher::{
    fisher_matrix, grid_points, grid_sup_inverse_eig, min_eig_subadditivity_check, FisherSummary,
    GridSpec, GridSupStat, SubadditivityCheck,
};
pub use mc::{
    replication_seed, run_eig_experiment, run_moment_experiment, run_mspe_experiment,
    run_selection_experiment, Aggregates, ExperimentKind, McConfig, McResult, RepRecord,
};
