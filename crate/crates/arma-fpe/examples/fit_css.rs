//! Fit an ARMA(1,1) model by minimizing the conditional sum of squares with
//! the multi-start constrained Levenberg-Marquardt optimizer.
//!
//! ```bash
//! cargo run --example fit_css
//! ```

use arma_fpe::{fit, fpe, simulate, sum_of_squares, ArmaParams, FitConfig, NoiseSpec, ParamSpace};

fn main() {
    let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
    let order = truth.order();
    let space = ParamSpace::defaults_for(order);
    let n = 2000;
    let y = simulate(
        &truth,
        &space,
        n,
        &NoiseSpec::Gaussian { sigma2: 1.0 },
        2025,
    )
    .unwrap();

    let config = FitConfig::default_for(order, &space, 7).unwrap();
    println!("starts:");
    for (i, s) in config.starts.iter().enumerate() {
        println!("  {i}: ar={:?} ma={:?}", s.ar, s.ma);
    }

    let report = fit(&y, order, &space, &config).unwrap();
    println!(
        "estimate:    ar={:?} ma={:?}",
        report.estimate.ar, report.estimate.ma
    );
    println!("truth:       ar=[0.5] ma=[0.3]");
    println!("distance:    {:.4}", report.estimate.distance(&truth));
    println!("objective:   {:.6}", report.objective);
    println!("sigma2_hat:  {:.6}", report.sigma2_hat);
    println!("lambda_min:  {:.6}", report.lambda_min);
    println!(
        "converged:   {} in {} iterations (start {})",
        report.converged, report.iterations, report.start_index
    );
    println!(
        "fpe:         {:.6}",
        fpe(report.objective, n, order.p_bar()).unwrap()
    );

    // The reported objective is exactly the recomputed sum of squares.
    let recomputed = sum_of_squares(&report.estimate, &y);
    println!(
        "objective recomputation gap: {:.1e}",
        (report.objective - recomputed).abs()
    );
}
