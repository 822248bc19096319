//! The two-route identities: the gradient path and the residual-difference
//! path computed by the exact recursions coincide with their moving-average
//! filter representations driven by the true innovations. Also fits the
//! exponential decay envelope of the filter coefficients.
//!
//! ```bash
//! cargo run --example filter_identities
//! ```

use arma_fpe::{
    decay_fit, derivative_path, filter_bank, residuals, simulate, ArmaParams, DecayFit, DerivOrder,
    NoiseSpec, ParamSpace,
};

fn main() {
    let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
    let point = ArmaParams::new(vec![0.4], vec![0.2]).unwrap();
    let space = ParamSpace::defaults_for(truth.order());
    let n = 400;
    let y = simulate(&truth, &space, n, &NoiseSpec::Gaussian { sigma2: 1.0 }, 11).unwrap();
    let eps = y.innovations().unwrap();

    let bank = filter_bank(&point, &truth, &space, n).unwrap();

    // Gradient route comparison.
    let path = derivative_path(&point, &y, DerivOrder::Gradient);
    let filtered = bank.gradient_rows(eps);
    let mut max_grad = 0.0_f64;
    for t in 0..n {
        for l in 0..2 {
            max_grad = max_grad.max((filtered[t][l] - path.grad_row(t)[l]).abs());
        }
    }
    println!("gradient identity:   max abs diff {max_grad:.3e}");

    // Residual-difference route comparison.
    let diffs = bank.residual_diffs(eps);
    let e_point = residuals(&point, &y);
    let e_truth = residuals(&truth, &y);
    let mut max_diff = 0.0_f64;
    for t in 0..n {
        max_diff = max_diff.max((diffs[t] - (e_point[t] - e_truth[t])).abs());
    }
    println!("difference identity: max abs diff {max_diff:.3e}");

    // Decay envelopes of the filter coefficients.
    for l in 0..bank.p_bar() {
        if let DecayFit::Fit { k, c, slope } = decay_fit(bank.row(l)) {
            println!("row {l}: slope {slope:+.4}  envelope {k:.3} * exp(-{c:.4} j)");
        }
    }
    match decay_fit(bank.diff_coeffs()) {
        DecayFit::Fit { slope, .. } => println!("difference coefficients: slope {slope:+.4}"),
        DecayFit::IdenticallyZero => println!("difference coefficients identically zero"),
    }

    // At the true point the difference coefficients vanish identically.
    let at_truth = filter_bank(&truth, &truth, &space, n).unwrap();
    match decay_fit(at_truth.diff_coeffs()) {
        DecayFit::IdenticallyZero => println!("at the truth: identically zero, as expected"),
        DecayFit::Fit { .. } => println!("at the truth: unexpected nonzero coefficients"),
    }
}
