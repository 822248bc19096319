//! Residual, gradient, and Hessian recursions for the conditional
//! sum-of-squares objective, all under zero initial conditions.

use crate::model::{ArmaParams, Series};

/// How much of the derivative path to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DerivOrder {
    Residuals,
    Gradient,
    Hessian,
}

/// Per-time-step residuals `eps_t(eta)` and, when requested, their gradients
/// and Hessians with respect to the parameter vector.
///
/// Time index `t` is 0-based here (`t = 0` holds time 1). Gradients are laid
/// out as an `n x p_bar` row-major matrix, Hessians as `n` symmetric
/// `p_bar x p_bar` blocks. The pure-AR second-derivative block is identically
/// zero: residuals are affine in the AR coefficients for fixed MA
/// coefficients.
#[derive(Clone, Debug)]
pub struct DerivativePath {
    n: usize,
    p_bar: usize,
    pub eps: Vec<f64>,
    grad: Option<Vec<f64>>,
    hess: Option<Vec<f64>>,
}

impl DerivativePath {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_bar(&self) -> usize {
        self.p_bar
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hess.is_some()
    }

    /// Gradient of `eps_{t+1}(eta)` as a `p_bar`-slice.
    pub fn grad_row(&self, t: usize) -> &[f64] {
        let g = self.grad.as_ref().expect("gradient not computed");
        &g[t * self.p_bar..(t + 1) * self.p_bar]
    }

    /// Hessian entry `(i, j)` of `eps_{t+1}(eta)`.
    pub fn hess_at(&self, t: usize, i: usize, j: usize) -> f64 {
        let h = self.hess.as_ref().expect("hessian not computed");
        h[t * self.p_bar * self.p_bar + i * self.p_bar + j]
    }
}

/// Residuals `eps_t(eta) = y_t - sum_i alpha_i y_{t-i} + sum_j beta_j
/// eps_{t-j}(eta)`, `eps_t(eta) = 0` for `t <= 0`. Exact recursion, no
/// truncation.
pub fn residuals(params: &ArmaParams, y: &Series) -> Vec<f64> {
    derivative_path(params, y, DerivOrder::Residuals).eps
}

/// Runs the residual recursion and, when requested, the differentiated
/// recursions for the gradient and Hessian paths.
///
/// Gradient components follow from differentiating the residual recursion:
/// AR entries obey `g_i(t) = -y_{t-i} + sum_s beta_s g_i(t-s)` and MA entries
/// `g_{p1+j}(t) = eps_{t-j} + sum_s beta_s g_{p1+j}(t-s)`. Differentiating
/// once more: the AR/AR block vanishes identically, the AR/MA block obeys
/// `h_{i,p1+l}(t) = g_i(t-l) + sum_s beta_s h_{i,p1+l}(t-s)` and the MA/MA
/// block `h_{p1+j,p1+l}(t) = g_{p1+j}(t-l) + g_{p1+l}(t-j) + sum_s beta_s
/// h_{p1+j,p1+l}(t-s)`. All paths are zero for `t <= 0`.
pub fn derivative_path(params: &ArmaParams, y: &Series, order: DerivOrder) -> DerivativePath {
    let n = y.n();
    let obs = y.y();
    let p1 = params.ar.len();
    let p2 = params.ma.len();
    let p = p1 + p2;
    let want_grad = order >= DerivOrder::Gradient;
    let want_hess = order >= DerivOrder::Hessian;

    let mut eps = vec![0.0; n];
    let mut grad = if want_grad {
        vec![0.0; n * p]
    } else {
        Vec::new()
    };
    let mut hess = if want_hess {
        vec![0.0; n * p * p]
    } else {
        Vec::new()
    };
    let pp = p * p;

    for t in 0..n {
        let mut e = obs[t];
        for (i, &a) in params.ar.iter().enumerate() {
            if t > i {
                e -= a * obs[t - i - 1];
            }
        }
        for (s, &b) in params.ma.iter().enumerate() {
            if t > s {
                e += b * eps[t - s - 1];
            }
        }
        eps[t] = e;

        if want_grad {
            for i in 0..p1 {
                let mut g = if t > i { -obs[t - i - 1] } else { 0.0 };
                for (s, &b) in params.ma.iter().enumerate() {
                    if t > s {
                        g += b * grad[(t - s - 1) * p + i];
                    }
                }
                grad[t * p + i] = g;
            }
            for j in 0..p2 {
                let mut g = if t > j { eps[t - j - 1] } else { 0.0 };
                for (s, &b) in params.ma.iter().enumerate() {
                    if t > s {
                        g += b * grad[(t - s - 1) * p + p1 + j];
                    }
                }
                grad[t * p + p1 + j] = g;
            }
        }

        if want_hess {
            for i in 0..p1 {
                for l in 0..p2 {
                    let mut h = if t > l {
                        grad[(t - l - 1) * p + i]
                    } else {
                        0.0
                    };
                    for (s, &b) in params.ma.iter().enumerate() {
                        if t > s {
                            h += b * hess[(t - s - 1) * pp + i * p + p1 + l];
                        }
                    }
                    hess[t * pp + i * p + p1 + l] = h;
                    hess[t * pp + (p1 + l) * p + i] = h;
                }
            }
            for j in 0..p2 {
                for l in j..p2 {
                    let mut h = if t > l {
                        grad[(t - l - 1) * p + p1 + j]
                    } else {
                        0.0
                    };
                    if t > j {
                        h += grad[(t - j - 1) * p + p1 + l];
                    }
                    for (s, &b) in params.ma.iter().enumerate() {
                        if t > s {
                            h += b * hess[(t - s - 1) * pp + (p1 + j) * p + p1 + l];
                        }
                    }
                    hess[t * pp + (p1 + j) * p + p1 + l] = h;
                    hess[t * pp + (p1 + l) * p + p1 + j] = h;
                }
            }
        }
    }

    DerivativePath {
        n,
        p_bar: p,
        eps,
        grad: want_grad.then_some(grad),
        hess: want_hess.then_some(hess),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParamSpace;
    use crate::sim::{simulate, NoiseSpec};
    use approx::assert_abs_diff_eq;

    fn sim(params: &ArmaParams, n: usize, seed: u64) -> Series {
        let space = ParamSpace::defaults_for(params.order());
        simulate(
            params,
            &space,
            n,
            &NoiseSpec::Gaussian { sigma2: 1.0 },
            seed,
        )
        .unwrap()
    }

    /// Central finite differences of the residual path, the independent check
    /// for both derivative recursions.
    fn fd_grad(params: &ArmaParams, y: &Series, t: usize, coord: usize, h: f64) -> f64 {
        let order = params.order();
        let mut up = params.to_vec();
        let mut dn = up.clone();
        up[coord] += h;
        dn[coord] -= h;
        let eu = residuals(&ArmaParams::from_slice(order, &up).unwrap(), y);
        let ed = residuals(&ArmaParams::from_slice(order, &dn).unwrap(), y);
        (eu[t] - ed[t]) / (2.0 * h)
    }

    fn fd_hess(params: &ArmaParams, y: &Series, t: usize, i: usize, j: usize, h: f64) -> f64 {
        let order = params.order();
        let mut up = params.to_vec();
        let mut dn = up.clone();
        up[j] += h;
        dn[j] -= h;
        let pu = derivative_path(
            &ArmaParams::from_slice(order, &up).unwrap(),
            y,
            DerivOrder::Gradient,
        );
        let pd = derivative_path(
            &ArmaParams::from_slice(order, &dn).unwrap(),
            y,
            DerivOrder::Gradient,
        );
        (pu.grad_row(t)[i] - pd.grad_row(t)[i]) / (2.0 * h)
    }

    #[test]
    fn residuals_at_truth_recover_innovations() {
        let p = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let y = sim(&p, 300, 11);
        let eps = residuals(&p, &y);
        let truth = y.innovations().unwrap();
        let max = eps
            .iter()
            .zip(truth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(max < 1e-10, "max abs deviation {max:e}");
    }

    #[test]
    fn ar1_residual_formula() {
        let p = ArmaParams::new(vec![0.4], vec![]).unwrap();
        let y = Series::new(vec![2.0, 1.0, -1.0]);
        let eps = residuals(&p, &y);
        assert_abs_diff_eq!(eps[0], 2.0);
        assert_abs_diff_eq!(eps[1], 1.0 - 0.4 * 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eps[2], -1.0 - 0.4 * 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ma1_residual_hand_unrolled() {
        let b = 0.25;
        let p = ArmaParams::new(vec![], vec![b]).unwrap();
        let y = Series::new(vec![2.0, 1.0]);
        let eps = residuals(&p, &y);
        assert_abs_diff_eq!(eps[0], 2.0);
        assert_abs_diff_eq!(eps[1], 1.0 + b * 2.0, epsilon = 1e-15);
    }

    #[test]
    fn ar1_gradient_is_lagged_observation() {
        let p = ArmaParams::new(vec![0.5], vec![]).unwrap();
        let y = sim(&p, 50, 3);
        let path = derivative_path(&p, &y, DerivOrder::Hessian);
        for t in 0..50 {
            let want = if t >= 1 { -y.y()[t - 1] } else { 0.0 };
            assert_abs_diff_eq!(path.grad_row(t)[0], want);
            assert_eq!(path.hess_at(t, 0, 0), 0.0);
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let y = sim(&truth, 200, 17);
        let point = ArmaParams::new(vec![0.45], vec![0.35]).unwrap();
        let path = derivative_path(&point, &y, DerivOrder::Hessian);
        let h = 1e-6;
        for t in [0, 1, 5, 50, 199] {
            for i in 0..2 {
                let fd = fd_grad(&point, &y, t, i, h);
                let an = path.grad_row(t)[i];
                let denom = fd.abs().max(1.0);
                assert!(
                    (an - fd).abs() / denom < 1e-5,
                    "grad t={t} i={i}: {an} vs {fd}"
                );
                for j in 0..2 {
                    let fd2 = fd_hess(&point, &y, t, i, j, h);
                    let an2 = path.hess_at(t, i, j);
                    let denom = fd2.abs().max(1.0);
                    assert!(
                        (an2 - fd2).abs() / denom < 1e-5,
                        "hess t={t} ({i},{j}): {an2} vs {fd2}"
                    );
                }
            }
        }
    }

    #[test]
    fn ma1_second_derivative_at_zero_beta() {
        // At beta = 0 the recursion collapses to 2 * eps_{t-2}.
        let p = ArmaParams::new(vec![], vec![0.0]).unwrap();
        let y = Series::new(vec![1.0, -2.0, 3.0, 0.5, -1.5]);
        let path = derivative_path(&p, &y, DerivOrder::Hessian);
        for t in 0..5 {
            let want = if t >= 2 { 2.0 * path.eps[t - 2] } else { 0.0 };
            assert_abs_diff_eq!(path.hess_at(t, 0, 0), want, epsilon = 1e-15);
        }
    }

    #[test]
    fn hessian_blocks_symmetric() {
        let p = ArmaParams::new(vec![0.4, 0.1], vec![0.3, -0.2]).unwrap();
        let y = sim(&p, 120, 23);
        let path = derivative_path(&p, &y, DerivOrder::Hessian);
        for t in 0..120 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(path.hess_at(t, i, j), path.hess_at(t, j, i));
                }
            }
        }
    }

    #[test]
    fn pure_ar_residuals_affine_in_params() {
        // Superposition: eps(lambda a + (1-lambda) b) = lambda eps(a) +
        // (1-lambda) eps(b) on fixed data.
        let a = ArmaParams::new(vec![0.5, -0.2], vec![]).unwrap();
        let b = ArmaParams::new(vec![0.1, 0.3], vec![]).unwrap();
        let y = sim(&a, 80, 31);
        let lambda = 0.37;
        let mix_vec: Vec<f64> = a
            .to_vec()
            .iter()
            .zip(b.to_vec())
            .map(|(x, z)| lambda * x + (1.0 - lambda) * z)
            .collect();
        let mix = ArmaParams::from_slice(a.order(), &mix_vec).unwrap();
        let ea = residuals(&a, &y);
        let eb = residuals(&b, &y);
        let em = residuals(&mix, &y);
        for t in 0..80 {
            assert_abs_diff_eq!(
                em[t],
                lambda * ea[t] + (1.0 - lambda) * eb[t],
                epsilon = 1e-12
            );
        }
        let path = derivative_path(&a, &y, DerivOrder::Hessian);
        for t in 0..80 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(path.hess_at(t, i, j), 0.0);
                }
            }
        }
    }
}
