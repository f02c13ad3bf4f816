use std::ops::{Add, Mul, Neg, Sub};

use crate::tolerance::TAU_TRIM;
use crate::Complex;

use super::ProjPoint;

/// Dense univariate complex polynomial, lowest degree first.
///
/// Trailing coefficients below `TAU_TRIM` times the largest coefficient are
/// trimmed on construction, so the leading coefficient is always significant.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        Self::with_trim(coeffs, TAU_TRIM)
    }

    pub fn with_trim(mut coeffs: Vec<Complex>, trim: f64) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while let Some(last) = coeffs.last() {
            if last.norm() <= trim * max || last.norm() == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Self { coeffs }
    }

    /// Keeps every coefficient as given, including a vanishing leading one.
    pub(crate) fn untrimmed(coeffs: Vec<Complex>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Complex>, lead: Complex) -> Self {
        let mut p = vec![lead];
        for r in roots {
            p = mul_linear(&p, *r);
        }
        Self::untrimmed(p)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs.iter().rev().fold(Complex::default(), |acc, c| acc * z + c)
    }

    /// Evaluates the degree-`d` homogenisation `sum c_l u1^l u0^{d-l}`.
    pub fn eval_homogeneous(&self, d: usize, z: &ProjPoint) -> Complex {
        let m = z.monomials(d);
        self.coeffs.iter().zip(&m).map(|(c, x)| c * x).sum()
    }

    pub fn derivative(&self) -> Self {
        Self::untrimmed(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::untrimmed(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(1.0 / l),
            None => Self::zero(),
        }
    }

    pub fn mul_linear(&self, root: Complex) -> Self {
        Self::untrimmed(mul_linear(&self.coeffs, root))
    }

    /// Largest coefficient difference between two polynomials.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

fn mul_linear(p: &[Complex], root: Complex) -> Vec<Complex> {
    let mut out = vec![Complex::default(); p.len() + 1];
    for (k, c) in p.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c * root;
    }
    out
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::untrimmed((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::untrimmed((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Complex::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::untrimmed(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn trims_negligible_leading_terms() {
        let p = UniPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-15, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert!(UniPoly::new(vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn from_roots_expands_product() {
        let p = UniPoly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)], c(1.0, 0.0));
        assert_eq!(p.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn homogeneous_matches_affine() {
        let p = UniPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)]);
        let z = c(0.7, 0.2);
        let h = p.eval_homogeneous(2, &ProjPoint::affine(z));
        assert!((h - p.eval(z)).norm() < 1e-14);
        // at infinity only the top coefficient survives
        assert_eq!(p.eval_homogeneous(2, &ProjPoint::infinity()), c(3.0, -1.0));
    }

    #[test]
    fn arithmetic() {
        let a = UniPoly::new(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let b = UniPoly::new(vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!((&a * &b).coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!((&a - &b).coeffs(), &[c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(a.derivative().coeffs(), &[c(1.0, 0.0)]);
    }
}
