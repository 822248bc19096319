//! Check the analytic gradient and Hessian recursions of the residual path
//! against central finite differences.
//!
//! ```bash
//! cargo run --example gradient_check
//! ```

use arma_fpe::{
    derivative_path, residuals, simulate, ArmaParams, DerivOrder, NoiseSpec, ParamSpace,
};

fn main() {
    let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
    let space = ParamSpace::defaults_for(truth.order());
    let y = simulate(&truth, &space, 300, &NoiseSpec::Gaussian { sigma2: 1.0 }, 7).unwrap();

    let point = ArmaParams::new(vec![0.45], vec![0.35]).unwrap();
    let path = derivative_path(&point, &y, DerivOrder::Hessian);
    let h = 1e-6;

    let mut worst_grad = 0.0_f64;
    let mut worst_hess = 0.0_f64;
    for coord in 0..2 {
        let mut up = point.to_vec();
        let mut dn = up.clone();
        up[coord] += h;
        dn[coord] -= h;
        let pu = ArmaParams::from_slice(point.order(), &up).unwrap();
        let pd = ArmaParams::from_slice(point.order(), &dn).unwrap();
        let eu = residuals(&pu, &y);
        let ed = residuals(&pd, &y);
        let gu = derivative_path(&pu, &y, DerivOrder::Gradient);
        let gd = derivative_path(&pd, &y, DerivOrder::Gradient);
        for t in 0..y.n() {
            let fd = (eu[t] - ed[t]) / (2.0 * h);
            let an = path.grad_row(t)[coord];
            worst_grad = worst_grad.max((an - fd).abs() / fd.abs().max(1.0));
            for i in 0..2 {
                let fd2 = (gu.grad_row(t)[i] - gd.grad_row(t)[i]) / (2.0 * h);
                let an2 = path.hess_at(t, i, coord);
                worst_hess = worst_hess.max((an2 - fd2).abs() / fd2.abs().max(1.0));
            }
        }
    }

    println!("gradient  vs central differences: worst rel err {worst_grad:.3e}");
    println!("hessian   vs central differences: worst rel err {worst_hess:.3e}");
    println!(
        "pure-AR hessian block is exactly zero: {}",
        path.hess_at(10, 0, 0)
    );
}
