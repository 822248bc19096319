//! Normalized Fisher-information matrix of the residual gradients, minimum
//! eigenvalue statistics, and grid-supremum estimators of the inverse
//! minimum-eigenvalue moments.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::deriv::{derivative_path, DerivOrder};
use crate::error::{Error, Result};
use crate::model::{validate_params, ArmaParams, ParamSpace, Series};

/// Normalized information matrix at one parameter point, with its extreme
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct FisherSummary {
    pub matrix: DMatrix<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub at_params: ArmaParams,
}

/// `n^{-1} sum_t grad eps_t(eta) grad eps_t(eta)^T` with gradients from the
/// exact recursion; eigenvalues via a dense symmetric solver.
pub fn fisher_matrix(params: &ArmaParams, y: &Series) -> FisherSummary {
    let n = y.n();
    assert!(n >= 1, "fisher_matrix requires at least one observation");
    let p = params.p_bar();
    let path = derivative_path(params, y, DerivOrder::Gradient);
    let mut m = DMatrix::zeros(p, p);
    for t in 0..n {
        let g = path.grad_row(t);
        for i in 0..p {
            for j in i..p {
                m[(i, j)] += g[i] * g[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m /= n as f64;
    let eig = SymmetricEigen::new(m.clone());
    let lambda_min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let lambda_max = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    FisherSummary {
        matrix: m,
        lambda_min,
        lambda_max,
        at_params: params.clone(),
    }
}

/// Result of checking `lambda_min(a + b) >= lambda_min(a) + lambda_min(b)`.
#[derive(Clone, Copy, Debug)]
pub struct SubadditivityCheck {
    pub holds: bool,
    /// `lambda_min(a+b) - lambda_min(a) - lambda_min(b)`; nonnegative in
    /// exact arithmetic.
    pub slack: f64,
}

fn assert_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let mut max_asym = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
            scale = scale.max(m[(i, j)].abs());
        }
    }
    if max_asym > 1e-10 * scale.max(1.0) {
        return Err(Error::Asymmetric(max_asym));
    }
    Ok(())
}

fn lambda_min_of(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Verifies minimum-eigenvalue superadditivity for symmetric matrices of
/// equal dimension and reports the slack.
pub fn min_eig_subadditivity_check(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> Result<SubadditivityCheck> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() || a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(
            "matrices must be square and of equal dimension".into(),
        ));
    }
    assert_symmetric(a)?;
    assert_symmetric(b)?;
    let slack = lambda_min_of(&(a + b)) - lambda_min_of(a) - lambda_min_of(b);
    Ok(SubadditivityCheck {
        holds: slack >= 0.0,
        slack,
    })
}

/// Tensor grid over the coordinate cube of radius `radius` around `center`,
/// with an odd number of equispaced points per axis. Points failing
/// validation are dropped when the grid is enumerated, so refining the point
/// count yields supersets (odd counts share the center and endpoints).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: ArmaParams,
    pub radius: f64,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(center: ArmaParams, radius: f64, points_per_axis: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(
                "grid radius must be positive".into(),
            ));
        }
        if points_per_axis == 0 || points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "points_per_axis must be odd and positive".into(),
            ));
        }
        Ok(GridSpec {
            center,
            radius,
            points_per_axis,
        })
    }
}

/// Enumerates the surviving grid points in lexicographic axis order.
pub fn grid_points(grid: &GridSpec, space: &ParamSpace) -> Vec<ArmaParams> {
    let p = grid.center.p_bar();
    assert_eq!(p, space.dim(), "grid center must match space dimension");
    let m = grid.points_per_axis;
    let center = grid.center.to_vec();
    let axis_value = |c: f64, k: usize| -> f64 {
        if m == 1 {
            c
        } else {
            c - grid.radius + 2.0 * grid.radius * k as f64 / (m - 1) as f64
        }
    };
    let total = m.pow(p as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut v = vec![0.0; p];
        // Last axis varies fastest.
        for coord in (0..p).rev() {
            v[coord] = axis_value(center[coord], rem % m);
            rem /= m;
        }
        if let Ok(cand) = ArmaParams::from_slice(grid.center.order(), &v) {
            if validate_params(&cand, space).is_valid() {
                out.push(cand);
            }
        }
    }
    out
}

/// Grid supremum of the inverse minimum-eigenvalue power, a finite-grid
/// lower bound for the supremum over the ball.
#[derive(Clone, Debug)]
pub struct GridSupStat {
    /// `max_eta lambda_min^{-q}`; `+inf` when a degenerate point was hit.
    pub value: f64,
    pub argmax: ArmaParams,
    pub lambda_min_at_argmax: f64,
    /// First grid point (in enumeration order) with `lambda_min <= 0`, if any.
    pub degenerate: Option<ArmaParams>,
    /// Number of grid points that survived the validity filter.
    pub points: usize,
}

/// Maximizes `lambda_min^{-q}` of the normalized information matrix over the
/// surviving grid points. A point with `lambda_min <= 0` short-circuits to a
/// `+inf` sentinel, signalling a degenerate sample.
pub fn grid_sup_inverse_eig(
    y: &Series,
    grid: &GridSpec,
    space: &ParamSpace,
    q: f64,
) -> Result<GridSupStat> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidArgument("moment order q must be >= 1".into()));
    }
    let points = grid_points(grid, space);
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let total = points.len();
    let mut best: Option<(f64, ArmaParams, f64)> = None;
    for point in points {
        let summary = fisher_matrix(&point, y);
        if summary.lambda_min <= 0.0 {
            return Ok(GridSupStat {
                value: f64::INFINITY,
                argmax: point.clone(),
                lambda_min_at_argmax: summary.lambda_min,
                degenerate: Some(point),
                points: total,
            });
        }
        let stat = summary.lambda_min.powf(-q);
        let replace = best.as_ref().is_none_or(|(v, _, _)| stat > *v);
        if replace {
            best = Some((stat, point, summary.lambda_min));
        }
    }
    let (value, argmax, lambda_min_at_argmax) = best.expect("nonempty grid");
    Ok(GridSupStat {
        value,
        argmax,
        lambda_min_at_argmax,
        degenerate: None,
        points: total,
    })
}
