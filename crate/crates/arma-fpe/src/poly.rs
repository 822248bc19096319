//! Dense real polynomials: products, companion-matrix roots, and power-series
//! expansion of rational functions.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Coefficients below this (relative to the unit constant term of the lag
/// polynomials) are treated as absent when trimming for root finding.
const TRIM_EPS: f64 = 1e-12;

/// Real polynomial with ascending coefficients: `coeffs[j]` multiplies `z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            Poly { coeffs: vec![0.0] }
        } else {
            Poly { coeffs }
        }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree after trimming trailing near-zero coefficients.
    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && self.coeffs[d].abs() <= TRIM_EPS {
            d -= 1;
        }
        d
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + Complex::new(c, 0.0);
        }
        acc
    }

    /// All complex roots, via eigenvalues of the companion matrix of the
    /// trimmed monic polynomial. A (trimmed) degree-0 polynomial has no roots.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let c = &self.coeffs;
        let lead = c[d];
        let companion = DMatrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -c[i] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion.complex_eigenvalues().iter().copied().collect()
    }
}

/// Power-series coefficients `c_0..c_l` of `numer(z)/denom(z)`, computed by
/// the convolution recursion `c_j = p_j - sum_{k=1}^{min(j, deg denom)} q_k c_{j-k}`.
///
/// The denominator must have constant term 1 and (for the series to mean
/// anything) all roots outside the closed unit disk; the latter is the
/// caller's responsibility.
pub fn expand_rational(numer: &Poly, denom: &Poly, l: usize) -> Result<Vec<f64>> {
    let q = denom.coeffs();
    if (q[0] - 1.0).abs() > TRIM_EPS {
        return Err(Error::NonUnitConstantTerm(q[0]));
    }
    let p = numer.coeffs();
    let mut c = vec![0.0; l + 1];
    for j in 0..=l {
        let mut v = if j < p.len() { p[j] } else { 0.0 };
        for k in 1..q.len().min(j + 1) {
            v -= q[k] * c[j - k];
        }
        c[j] = v;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_root() {
        // 1 - 0.5 z has the single root z = 2
        let p = Poly::new(vec![1.0, -0.5]);
        let roots = p.roots();
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(roots[0].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_complex_pair() {
        // 1 + z^2 has roots +/- i
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let mut mods: Vec<f64> = p.roots().iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert_eq!(mods.len(), 2);
        assert_abs_diff_eq!(mods[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mods[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trailing_zero_trimmed() {
        // 1 - 0.5 z + 0 z^2 behaves as degree 1
        let p = Poly::new(vec![1.0, -0.5, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.roots().len(), 1);
    }

    #[test]
    fn degree_zero_has_no_roots() {
        assert!(Poly::one().roots().is_empty());
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - b z) = sum b^j z^j
        let b = 0.3;
        let c = expand_rational(&Poly::one(), &Poly::new(vec![1.0, -b]), 10).unwrap();
        for (j, &cj) in c.iter().enumerate() {
            assert_abs_diff_eq!(cj, b.powi(j as i32), epsilon = 1e-14);
        }
    }

    #[test]
    fn equal_numerator_denominator_is_one() {
        let q = Poly::new(vec![1.0, -0.4, 0.12]);
        let c = expand_rational(&q, &q, 8).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
        for &cj in &c[1..] {
            assert_abs_diff_eq!(cj, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn convolution_inverts_expansion() {
        // Multiplying the series back by the denominator must reproduce the
        // numerator, up to the truncation index.
        let p = Poly::new(vec![0.5, -1.2, 0.3]);
        let q = Poly::new(vec![1.0, -0.7, 0.1]);
        let l = 40;
        let c = expand_rational(&p, &q, l).unwrap();
        let series = Poly::new(c);
        let back = series.mul(&q);
        for j in 0..=l {
            let want = if j < p.coeffs().len() {
                p.coeffs()[j]
            } else {
                0.0
            };
            assert_abs_diff_eq!(back.coeffs()[j], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_unit_constant_term_rejected() {
        let err = expand_rational(&Poly::one(), &Poly::new(vec![0.9, 0.1]), 4);
        assert!(matches!(err, Err(Error::NonUnitConstantTerm(_))));
    }
}
