//! ARMA model representation: orders, parameter points, the admissible
//! parameter set, and observed series.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// AR and MA orders of an ARMA(p1, p2) model. At least one must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelOrder {
    pub p1: usize,
    pub p2: usize,
}

impl ModelOrder {
    pub fn new(p1: usize, p2: usize) -> Result<Self> {
        if p1 + p2 == 0 {
            return Err(Error::InvalidArgument(
                "model must have at least one parameter".into(),
            ));
        }
        Ok(ModelOrder { p1, p2 })
    }

    /// Total parameter count `p1 + p2`.
    pub fn p_bar(&self) -> usize {
        self.p1 + self.p2
    }
}

impl fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARMA({},{})", self.p1, self.p2)
    }
}

/// A point in parameter space: AR coefficients followed by MA coefficients.
///
/// Construction only requires finite entries; stationarity, invertibility,
/// coprimality and minimality are checked separately by [`validate_params`],
/// so optimizers can hold trial points near (or outside) the admissible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl ArmaParams {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>) -> Result<Self> {
        if ar.iter().chain(ma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "parameter entries must be finite".into(),
            ));
        }
        if ar.is_empty() && ma.is_empty() {
            return Err(Error::InvalidArgument(
                "model must have at least one parameter".into(),
            ));
        }
        Ok(ArmaParams { ar, ma })
    }

    pub fn order(&self) -> ModelOrder {
        ModelOrder {
            p1: self.ar.len(),
            p2: self.ma.len(),
        }
    }

    pub fn p_bar(&self) -> usize {
        self.ar.len() + self.ma.len()
    }

    /// Concatenated coefficient vector `(alpha_1..alpha_p1, beta_1..beta_p2)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.ar.iter().chain(self.ma.iter()).copied().collect()
    }

    /// Inverse of [`ArmaParams::to_vec`] for a given order.
    pub fn from_slice(order: ModelOrder, v: &[f64]) -> Result<Self> {
        if v.len() != order.p_bar() {
            return Err(Error::LengthMismatch {
                expected: order.p_bar(),
                got: v.len(),
            });
        }
        ArmaParams::new(v[..order.p1].to_vec(), v[order.p1..].to_vec())
    }

    /// AR lag polynomial `1 - alpha_1 z - ... - alpha_p1 z^p1`.
    pub fn ar_poly(&self) -> Poly {
        let mut c = Vec::with_capacity(self.ar.len() + 1);
        c.push(1.0);
        c.extend(self.ar.iter().map(|a| -a));
        Poly::new(c)
    }

    /// MA lag polynomial `1 - beta_1 z - ... - beta_p2 z^p2`.
    pub fn ma_poly(&self) -> Poly {
        let mut c = Vec::with_capacity(self.ma.len() + 1);
        c.push(1.0);
        c.extend(self.ma.iter().map(|b| -b));
        Poly::new(c)
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn distance(&self, other: &ArmaParams) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// The compact admissible set: a coordinate box intersected with explicit
/// margins on root moduli, root separation between the AR and MA polynomials,
/// and the magnitude of the highest-order coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// All roots of both lag polynomials must have modulus >= 1 + root_margin.
    pub root_margin: f64,
    /// Minimum distance between any AR root and any MA root.
    pub common_root_tol: f64,
    /// Minimum value of |alpha_p1| + |beta_p2|.
    pub endpoint_tol: f64,
}

impl ParamSpace {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        root_margin: f64,
        common_root_tol: f64,
        endpoint_tol: f64,
    ) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument(
                "box bounds must be nonempty and of equal length".into(),
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::InvalidArgument(
                "box bounds must satisfy lower < upper coordinatewise".into(),
            ));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(root_margin) || !positive(common_root_tol) || !positive(endpoint_tol) {
            return Err(Error::InvalidArgument(
                "root_margin, common_root_tol and endpoint_tol must be positive".into(),
            ));
        }
        Ok(ParamSpace {
            lower,
            upper,
            root_margin,
            common_root_tol,
            endpoint_tol,
        })
    }

    /// Default space for an order: box [-0.98, 0.98] per coordinate with
    /// margins 0.01 / 0.01 / 1e-6.
    pub fn defaults_for(order: ModelOrder) -> Self {
        let p = order.p_bar();
        ParamSpace {
            lower: vec![-0.98; p],
            upper: vec![0.98; p],
            root_margin: 0.01,
            common_root_tol: 0.01,
            endpoint_tol: 1e-6,
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Closed-box membership of the concatenated coefficient vector.
    pub fn contains_box(&self, params: &ArmaParams) -> bool {
        let v = params.to_vec();
        v.len() == self.dim()
            && v.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    /// Box midpoint.
    pub fn center(&self, order: ModelOrder) -> Result<ArmaParams> {
        let v: Vec<f64> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        ArmaParams::from_slice(order, &v)
    }
}

/// A single reason a parameter point is outside the admissible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    NonFinite {
        index: usize,
    },
    /// An AR root lies inside the stationarity margin.
    Nonstationary {
        min_root_modulus: f64,
        required: f64,
    },
    /// An MA root lies inside the invertibility margin.
    Noninvertible {
        min_root_modulus: f64,
        required: f64,
    },
    /// AR and MA root sets come closer than the separation tolerance.
    CommonRoot {
        min_distance: f64,
        required: f64,
    },
    /// |alpha_p1| + |beta_p2| below the minimality tolerance.
    DegenerateEndpoint {
        magnitude: f64,
        required: f64,
    },
    OutsideBox {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { index } => {
                write!(f, "finiteness: coordinate {index} is not finite")
            }
            Violation::Nonstationary {
                min_root_modulus,
                required,
            } => write!(
                f,
                "stationarity: an AR root has modulus {min_root_modulus:.6}, below the required {required:.6}"
            ),
            Violation::Noninvertible {
                min_root_modulus,
                required,
            } => write!(
                f,
                "invertibility: an MA root has modulus {min_root_modulus:.6}, below the required {required:.6}"
            ),
            Violation::CommonRoot {
                min_distance,
                required,
            } => write!(
                f,
                "common root: AR and MA root sets are {min_distance:.6} apart, below the required {required:.6}"
            ),
            Violation::DegenerateEndpoint { magnitude, required } => write!(
                f,
                "endpoint: |alpha_p1| + |beta_p2| = {magnitude:.3e}, below the required {required:.3e}"
            ),
            Violation::OutsideBox {
                index,
                value,
                lower,
                upper,
            } => write!(
                f,
                "box: coordinate {index} = {value:.6} outside [{lower:.6}, {upper:.6}]"
            ),
        }
    }
}

/// Verdict of [`validate_params`]: either valid or the full violation list.
#[derive(Clone, Debug, PartialEq)]
pub enum Validity {
    Valid,
    Invalid(Vec<Violation>),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Validity::Valid => &[],
            Validity::Invalid(v) => v,
        }
    }

    /// Maps an invalid verdict to [`Error::InvalidParams`].
    pub fn into_result(self) -> Result<()> {
        match self {
            Validity::Valid => Ok(()),
            Validity::Invalid(v) => Err(Error::InvalidParams(v)),
        }
    }
}

/// Checks whether a parameter point belongs to the admissible set: box
/// membership, root moduli of both lag polynomials at least `1 + root_margin`
/// (a degree-0 polynomial has no roots and passes trivially), no near-common
/// roots, and non-degenerate highest-order coefficients.
///
/// Always returns a verdict; every failed condition is listed.
///
/// Panics if the point's dimension does not match the space.
pub fn validate_params(params: &ArmaParams, space: &ParamSpace) -> Validity {
    assert_eq!(
        params.p_bar(),
        space.dim(),
        "parameter dimension {} does not match space dimension {}",
        params.p_bar(),
        space.dim()
    );
    let mut violations = Vec::new();

    let v = params.to_vec();
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            violations.push(Violation::NonFinite { index: i });
        }
    }
    if !violations.is_empty() {
        // Root finding on non-finite coefficients is meaningless.
        return Validity::Invalid(violations);
    }

    for (i, x) in v.iter().enumerate() {
        if *x < space.lower[i] || *x > space.upper[i] {
            violations.push(Violation::OutsideBox {
                index: i,
                value: *x,
                lower: space.lower[i],
                upper: space.upper[i],
            });
        }
    }

    let required = 1.0 + space.root_margin;
    let ar_roots = params.ar_poly().roots();
    let ma_roots = params.ma_poly().roots();

    if let Some(m) = ar_roots.iter().map(|z| z.norm()).min_by(f64::total_cmp) {
        if m < required {
            violations.push(Violation::Nonstationary {
                min_root_modulus: m,
                required,
            });
        }
    }
    if let Some(m) = ma_roots.iter().map(|z| z.norm()).min_by(f64::total_cmp) {
        if m < required {
            violations.push(Violation::Noninvertible {
                min_root_modulus: m,
                required,
            });
        }
    }

    if !ar_roots.is_empty() && !ma_roots.is_empty() {
        let mut min_dist = f64::INFINITY;
        for a in &ar_roots {
            for b in &ma_roots {
                min_dist = min_dist.min((a - b).norm());
            }
        }
        if min_dist < space.common_root_tol {
            violations.push(Violation::CommonRoot {
                min_distance: min_dist,
                required: space.common_root_tol,
            });
        }
    }

    let endpoint =
        params.ar.last().map_or(0.0, |a| a.abs()) + params.ma.last().map_or(0.0, |b| b.abs());
    if endpoint < space.endpoint_tol {
        violations.push(Violation::DegenerateEndpoint {
            magnitude: endpoint,
            required: space.endpoint_tol,
        });
    }

    if violations.is_empty() {
        Validity::Valid
    } else {
        Validity::Invalid(violations)
    }
}

/// Observed series `y_1..y_n`, optionally carrying the true innovations when
/// it was simulated. Position `t-1` holds `y_t`; values for `t <= 0` are zero
/// by convention and never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    y: Vec<f64>,
    eps: Option<Vec<f64>>,
}

impl Series {
    pub fn new(y: Vec<f64>) -> Self {
        Series { y, eps: None }
    }

    pub fn with_innovations(y: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        if y.len() != eps.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                got: eps.len(),
            });
        }
        Ok(Series { y, eps: Some(eps) })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn innovations(&self) -> Option<&[f64]> {
        self.eps.as_deref()
    }

    /// The first `n` observations (innovations carried along when present).
    pub fn head(&self, n: usize) -> Series {
        Series {
            y: self.y[..n].to_vec(),
            eps: self.eps.as_ref().map(|e| e[..n].to_vec()),
        }
    }
}
