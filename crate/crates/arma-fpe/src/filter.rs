//! Moving-average filter representations of the residual gradient and of the
//! residual difference between a trial point and the truth, plus exponential
//! decay diagnostics for the filter coefficients.

use crate::error::Result;
use crate::model::{validate_params, ArmaParams, ParamSpace};
use crate::poly::{expand_rational, Poly};

/// Filter coefficients tied to a (trial point, true point) pair.
///
/// Row `l` of `coeffs` holds `b_j^{(l)}` for `j = 1..=len`: convolving these
/// with the true innovations reproduces the `l`-th gradient component of the
/// residual path. `diff_coeffs` holds `b_j` with `eps_t(eta) - eps_t(eta_0) =
/// sum_{i=1}^{t-1} b_i eps_{t-i}`.
#[derive(Clone, Debug)]
pub struct FilterBank {
    coeffs: Vec<Vec<f64>>,
    diff_coeffs: Vec<f64>,
}

impl FilterBank {
    pub fn p_bar(&self) -> usize {
        self.coeffs.len()
    }

    /// Truncation length L (coefficients are stored for `j = 1..=len`).
    pub fn len(&self) -> usize {
        self.diff_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diff_coeffs.is_empty()
    }

    /// `b_j^{(l)}` for `l` in `0..p_bar`, `j = 1..=len`.
    pub fn row(&self, l: usize) -> &[f64] {
        &self.coeffs[l]
    }

    pub fn diff_coeffs(&self) -> &[f64] {
        &self.diff_coeffs
    }

    /// Gradient path via the filter route: row `t` (0-based) is
    /// `sum_{j=1}^{t} b_j^{(l)} eps_{t+1-j}` for each component `l`, the
    /// moving-average form of the gradient recursion. Exact when
    /// `len >= n - 1`.
    pub fn gradient_rows(&self, eps: &[f64]) -> Vec<Vec<f64>> {
        let n = eps.len();
        let p = self.p_bar();
        let mut out = vec![vec![0.0; p]; n];
        for (t, row) in out.iter_mut().enumerate() {
            let jmax = t.min(self.len());
            for (l, dst) in row.iter_mut().enumerate() {
                let b = &self.coeffs[l];
                let mut acc = 0.0;
                for j in 1..=jmax {
                    acc += b[j - 1] * eps[t - j];
                }
                *dst = acc;
            }
        }
        out
    }

    /// Residual-difference path via the filter route: entry `t` is
    /// `sum_{i=1}^{t} b_i eps_{t+1-i}`, equal to `eps_{t+1}(eta) -
    /// eps_{t+1}(eta_0)` when `len >= n - 1`.
    pub fn residual_diffs(&self, eps: &[f64]) -> Vec<f64> {
        let n = eps.len();
        let mut out = vec![0.0; n];
        for (t, dst) in out.iter_mut().enumerate() {
            let imax = t.min(self.len());
            let mut acc = 0.0;
            for i in 1..=imax {
                acc += self.diff_coeffs[i - 1] * eps[t - i];
            }
            *dst = acc;
        }
        out
    }
}

/// Builds the filter bank for a trial point against the true point.
///
/// The AR-gradient series expands `-A2(eta_0) / (A2(eta) A1(eta_0))`, the
/// MA-gradient series `A1(eta) A2(eta_0) / (A2(eta)^2 A1(eta_0))`; component
/// `l` shifts the corresponding series by `l` lags. The difference series
/// expands `A1(eta) A2(eta_0) / (A2(eta) A1(eta_0)) - 1`.
pub fn filter_bank(
    params: &ArmaParams,
    true_params: &ArmaParams,
    space: &ParamSpace,
    len: usize,
) -> Result<FilterBank> {
    validate_params(params, space).into_result()?;
    validate_params(true_params, space).into_result()?;

    let a1 = params.ar_poly();
    let a2 = params.ma_poly();
    let a1_0 = true_params.ar_poly();
    let a2_0 = true_params.ma_poly();

    let denom_grad_ar = a2.mul(&a1_0);
    let denom_grad_ma = a2.mul(&a2).mul(&a1_0);
    let numer_ma = a1.mul(&a2_0);

    let neg_a2_0 = Poly::new(a2_0.coeffs().iter().map(|c| -c).collect());
    let c1 = expand_rational(&neg_a2_0, &denom_grad_ar, len)?;
    let c2 = expand_rational(&numer_ma, &denom_grad_ma, len)?;
    let d = expand_rational(&numer_ma, &denom_grad_ar, len)?;

    let p1 = params.ar.len();
    let p2 = params.ma.len();
    let mut coeffs = Vec::with_capacity(p1 + p2);
    // b_j^{(l)} = c^{(1)}_{j-l}; entries with j < l are zero.
    for l in 1..=p1 {
        let mut row = vec![0.0; len];
        row[l - 1..].copy_from_slice(&c1[..=len - l]);
        coeffs.push(row);
    }
    for l in 1..=p2 {
        let mut row = vec![0.0; len];
        row[l - 1..].copy_from_slice(&c2[..=len - l]);
        coeffs.push(row);
    }

    // d_0 = 1 by construction; b_j = d_j for j >= 1.
    let diff_coeffs = d[1..].to_vec();

    Ok(FilterBank {
        coeffs,
        diff_coeffs,
    })
}

/// Result of fitting an exponential envelope `|coeffs_j| <= k exp(-c j)` to a
/// coefficient sequence. Diagnostic only; never gates computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayFit {
    /// Every entry is exactly zero — trivially decaying.
    IdenticallyZero,
    Fit {
        k: f64,
        c: f64,
        /// Least-squares slope of `log |coeffs_j|` over `j` (zero entries
        /// excluded from the fit).
        slope: f64,
    },
}

impl DecayFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            DecayFit::IdenticallyZero => None,
            DecayFit::Fit { slope, .. } => Some(*slope),
        }
    }
}

/// Fits the decay envelope over positions `j = 1..=len`. The envelope
/// constants are chosen so the bound holds over the whole computed range by
/// construction: `c = -slope` and `k = max_j |coeffs_j| exp(c j)`.
pub fn decay_fit(coeffs: &[f64]) -> DecayFit {
    assert!(!coeffs.is_empty(), "decay_fit requires a nonempty vector");
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| ((i + 1) as f64, c.abs().ln()))
        .collect();
    if pts.is_empty() {
        return DecayFit::IdenticallyZero;
    }
    let slope = if pts.len() == 1 {
        0.0
    } else {
        let n = pts.len() as f64;
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
        sxy / sxx
    };
    let c = -slope;
    let k = coeffs
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| v.abs() * (c * (i + 1) as f64).exp())
        .fold(0.0_f64, f64::max);
    DecayFit::Fit { k, c, slope }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::{derivative_path, residuals, DerivOrder};
    use crate::model::{ModelOrder, ParamSpace};
    use crate::sim::{simulate, NoiseSpec};
    use approx::assert_abs_diff_eq;

    fn space(p1: usize, p2: usize) -> ParamSpace {
        ParamSpace::defaults_for(ModelOrder { p1, p2 })
    }

    #[test]
    fn gradient_filter_route_matches_recursion() {
        let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let point = ArmaParams::new(vec![0.4], vec![0.2]).unwrap();
        let sp = space(1, 1);
        let n = 200;
        let y = simulate(&truth, &sp, n, &NoiseSpec::Gaussian { sigma2: 1.0 }, 5).unwrap();
        let bank = filter_bank(&point, &truth, &sp, n).unwrap();
        let via_filter = bank.gradient_rows(y.innovations().unwrap());
        let path = derivative_path(&point, &y, DerivOrder::Gradient);
        let mut max = 0.0_f64;
        for t in 0..n {
            for l in 0..2 {
                max = max.max((via_filter[t][l] - path.grad_row(t)[l]).abs());
            }
        }
        assert!(max < 1e-8, "max abs diff {max:e}");
    }

    #[test]
    fn residual_difference_filter_route_matches_recursion() {
        let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let point = ArmaParams::new(vec![0.6], vec![0.1]).unwrap();
        let sp = space(1, 1);
        let n = 200;
        let y = simulate(&truth, &sp, n, &NoiseSpec::Gaussian { sigma2: 1.0 }, 6).unwrap();
        let bank = filter_bank(&point, &truth, &sp, n).unwrap();
        let via_filter = bank.residual_diffs(y.innovations().unwrap());
        let e_point = residuals(&point, &y);
        let e_truth = residuals(&truth, &y);
        let mut max = 0.0_f64;
        for t in 0..n {
            max = max.max((via_filter[t] - (e_point[t] - e_truth[t])).abs());
        }
        assert!(max < 1e-8, "max abs diff {max:e}");
    }

    #[test]
    fn diff_coeffs_vanish_at_truth() {
        let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let bank = filter_bank(&truth, &truth, &space(1, 1), 100).unwrap();
        for &b in bank.diff_coeffs() {
            assert_abs_diff_eq!(b, 0.0, epsilon = 1e-14);
        }
        assert_eq!(decay_fit(bank.diff_coeffs()), DecayFit::IdenticallyZero);
    }

    #[test]
    fn geometric_sequence_slope() {
        let coeffs: Vec<f64> = (1..=20).map(|j| 0.5_f64.powi(j)).collect();
        match decay_fit(&coeffs) {
            DecayFit::Fit { slope, k, c } => {
                assert_abs_diff_eq!(slope, -(2.0_f64.ln()), epsilon = 1e-9);
                // Envelope holds over the range by construction.
                for (i, v) in coeffs.iter().enumerate() {
                    assert!(v.abs() <= k * (-c * (i + 1) as f64).exp() * (1.0 + 1e-12));
                }
            }
            DecayFit::IdenticallyZero => panic!("unexpected zero fit"),
        }
    }

    #[test]
    fn gradient_filter_slope_is_negative() {
        let truth = ArmaParams::new(vec![0.5], vec![0.3]).unwrap();
        let point = ArmaParams::new(vec![0.4], vec![0.2]).unwrap();
        let bank = filter_bank(&point, &truth, &space(1, 1), 200).unwrap();
        for l in 0..2 {
            let slope = decay_fit(bank.row(l)).slope().unwrap();
            assert!(slope < 0.0, "row {l} slope {slope}");
        }
    }
}
