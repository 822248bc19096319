//! Final-prediction-error order selection: a single selection run over AR
//! candidates, then a small selection-frequency Monte Carlo.
//!
//! ```bash
//! cargo run --example order_selection
//! ```

use arma_fpe::estimator::FitConfig;
use arma_fpe::mc::{run_selection_experiment, Aggregates, McConfig};
use arma_fpe::{select_order, simulate, ArmaParams, ModelOrder, NoiseSpec, ParamSpace};

fn main() {
    let truth = ArmaParams::new(vec![0.6], vec![]).unwrap();
    let order = truth.order();
    let space = ParamSpace::defaults_for(order);
    let candidates = [
        ModelOrder { p1: 1, p2: 0 },
        ModelOrder { p1: 2, p2: 0 },
        ModelOrder { p1: 3, p2: 0 },
    ];

    // One selection run.
    let y = simulate(&truth, &space, 400, &NoiseSpec::Gaussian { sigma2: 1.0 }, 9).unwrap();
    let config = FitConfig::default_for(order, &space, 7).unwrap();
    let report = select_order(&y, &candidates, ParamSpace::defaults_for, &config).unwrap();
    println!("single run on data from AR(1) alpha=0.6, n=400:");
    for cand in &report.table {
        println!(
            "  {} fpe={:.6} objective={:.3}",
            cand.order, cand.fpe, cand.report.objective
        );
    }
    println!("  chosen: {}", report.chosen);

    // Selection frequencies over replications.
    let mc = McConfig {
        true_params: truth,
        order,
        space: space.clone(),
        noise: NoiseSpec::Gaussian { sigma2: 1.0 },
        sample_sizes: vec![400],
        replications: 200,
        master_seed: 20260810,
        moment_orders: vec![],
        grid: None,
        fit_config: config,
    };
    let result = run_selection_experiment(&mc, &candidates).unwrap();
    println!(
        "selection frequencies over {} replications:",
        mc.replications
    );
    if let Aggregates::Selection(rows) = &result.aggregates {
        for row in rows {
            println!(
                "  {} chosen {:>3} times ({:.1}%)",
                row.order,
                row.count,
                100.0 * row.frequency
            );
        }
    }
}
