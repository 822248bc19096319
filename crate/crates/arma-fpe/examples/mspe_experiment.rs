//! Monte Carlo check of the mean-squared-prediction-error expansion: the
//! rescaled excess n * (MSPE - sigma^2) approaches p_bar * sigma^2 as n
//! grows. Uses the variance-reduced predictor-gap estimator, which targets
//! the O(1/n) term directly instead of fighting the sigma^2 noise floor.
//!
//! A small run; the full-size configuration lives in the acceptance suite.
//!
//! ```bash
//! cargo run --example mspe_experiment
//! ```

use arma_fpe::estimator::FitConfig;
use arma_fpe::mc::{run_mspe_experiment, Aggregates, McConfig};
use arma_fpe::{ArmaParams, NoiseSpec, ParamSpace};

fn main() {
    let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
    let order = truth.order();
    let space = ParamSpace::defaults_for(order);
    let config = McConfig {
        true_params: truth,
        order,
        space: space.clone(),
        noise: NoiseSpec::Gaussian { sigma2: 1.0 },
        sample_sizes: vec![100, 200, 400],
        replications: 500,
        master_seed: 20260810,
        moment_orders: vec![],
        grid: None,
        fit_config: FitConfig::default_for(order, &space, 7).unwrap(),
    };

    let result = run_mspe_experiment(&config).unwrap();
    println!("limit p_bar * sigma^2 = 2");
    if let Aggregates::Mspe(rows) = &result.aggregates {
        for row in rows {
            println!(
                "n={:<4} d_hat = {:.3} +/- {:.3}",
                row.n, row.d_hat, row.std_err
            );
        }
    }
    for nc in &result.nonconvergence {
        println!("n={:<4} nonconvergence rate {:.3}", nc.n, nc.rate);
    }
}
