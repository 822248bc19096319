//! Monte Carlo check that the moments of the normalized estimation error
//! sqrt(n) * (estimate - truth) stay bounded as n grows.
//!
//! A small run; the full-size configuration lives in the acceptance suite.
//!
//! ```bash
//! cargo run --example moment_bounds
//! ```

use arma_fpe::estimator::FitConfig;
use arma_fpe::mc::{run_moment_experiment, Aggregates, McConfig};
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
        replications: 300,
        master_seed: 1,
        moment_orders: vec![2.0, 4.0],
        grid: None,
        fit_config: FitConfig::default_for(order, &space, 7).unwrap(),
    };

    let result = run_moment_experiment(&config).unwrap();
    if let Aggregates::Moments(rows) = &result.aggregates {
        for q in [2.0, 4.0] {
            println!("E || sqrt(n)(estimate - truth) ||^{q}:");
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.q == q)
                .map(|r| {
                    println!("  n={:<4} {:.2} +/- {:.2}", r.n, r.estimate, r.std_err);
                    r.estimate
                })
                .collect();
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            let min = values.iter().copied().fold(f64::MAX, f64::min);
            println!("  max/min across n: {:.3}", max / min);
        }
    }
    for nc in &result.nonconvergence {
        println!("n={:<4} nonconvergence rate {:.3}", nc.n, nc.rate);
    }
}
