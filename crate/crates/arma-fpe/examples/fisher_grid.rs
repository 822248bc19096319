//! Fisher-information diagnostics: the normalized information matrix, the
//! minimum-eigenvalue superadditivity fact behind the uniform bound, and the
//! grid-supremum estimator of the inverse minimum-eigenvalue moment.
//!
//! ```bash
//! cargo run --example fisher_grid
//! ```

use arma_fpe::{
    fisher_matrix, grid_points, grid_sup_inverse_eig, min_eig_subadditivity_check, simulate,
    ArmaParams, GridSpec, NoiseSpec, ParamSpace,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
    let space = ParamSpace::defaults_for(truth.order());

    // Information matrix at the truth for one sample.
    let y = simulate(&truth, &space, 400, &NoiseSpec::Gaussian { sigma2: 1.0 }, 3).unwrap();
    let summary = fisher_matrix(&truth, &y);
    println!("normalized information matrix at the truth:");
    for i in 0..2 {
        println!(
            "  [{:+.4} {:+.4}]",
            summary.matrix[(i, 0)],
            summary.matrix[(i, 1)]
        );
    }
    println!(
        "lambda_min = {:.5}, lambda_max = {:.5}",
        summary.lambda_min, summary.lambda_max
    );

    // Superadditivity of the minimum eigenvalue under matrix addition.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min_slack = f64::INFINITY;
    for _ in 0..200 {
        let raw_a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let raw_b = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let a = (&raw_a + raw_a.transpose()) * 0.5;
        let b = (&raw_b + raw_b.transpose()) * 0.5;
        let check = min_eig_subadditivity_check(&a, &b).unwrap();
        min_slack = min_slack.min(check.slack);
    }
    println!("min slack of lambda_min(A+B) - lambda_min(A) - lambda_min(B) over 200 pairs: {min_slack:.3e}");

    // Grid supremum of lambda_min^{-q} over a ball around the truth. The
    // supremum is driven by grid points near the AR/MA cancellation ridge,
    // where the information matrix degenerates.
    let grid = GridSpec::new(truth.clone(), 0.1, 5).unwrap();
    println!(
        "grid has {} admissible points of {}",
        grid_points(&grid, &space).len(),
        5 * 5
    );
    for n in [100, 200, 400] {
        let y = simulate(&truth, &space, n, &NoiseSpec::Gaussian { sigma2: 1.0 }, 17).unwrap();
        let stat = grid_sup_inverse_eig(&y, &grid, &space, 2.0).unwrap();
        println!(
            "n={n:<4} sup lambda_min^-2 = {:.4e} at ar={:?} ma={:?} (lambda_min there {:.5})",
            stat.value, stat.argmax.ar, stat.argmax.ma, stat.lambda_min_at_argmax
        );
    }
}
