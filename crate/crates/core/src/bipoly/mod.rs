//! Bidegree-(N, N) polynomials on the product of two projective lines.
//!
//! A [`BiPoly`] stores `c[k][l]`, the coefficient of `eta^k zeta^l`. Points of
//! `P^1` are [`ProjPoint`]s, so evaluation at `0` and `infinity` needs no
//! special cases: the homogeneous form
//! `sum c[k][l] a1^k a0^(N-k) b1^l b0^(N-l)` is used throughout.

mod proj;
mod roots;
mod unipoly;

pub use proj::{fibonacci_sphere, ProjPoint};
pub use roots::roots;
pub use unipoly::UniPoly;

use crate::error::{JnrError, Result};
use crate::Complex;

#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    n: usize,
    /// Row-major `(n+1) x (n+1)`; row index is the power of `eta`.
    c: Vec<Complex>,
    normalized: bool,
}

impl BiPoly {
    pub fn zeros(n: usize) -> Self {
        Self { n, c: vec![Complex::default(); (n + 1) * (n + 1)], normalized: false }
    }

    /// Builds from rows `c[k]`, each of length `n + 1`.
    pub fn from_rows(n: usize, rows: &[Vec<Complex>]) -> Result<Self> {
        let expected = n + 1;
        if rows.len() != expected || rows.iter().any(|r| r.len() != expected) {
            return Err(JnrError::Shape { expected, rows: rows.len() });
        }
        if rows.iter().flatten().any(|z| !z.is_finite()) {
            return Err(JnrError::InvalidData("non-finite coefficient".into()));
        }
        Ok(Self { n, c: rows.iter().flatten().copied().collect(), normalized: false })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut p = Self::zeros(n);
        for k in 0..=n {
            for l in 0..=n {
                p.c[k * (n + 1) + l] = f(k, l);
            }
        }
        p
    }

    /// `sum_t eta_poly_t(eta) * zeta_poly_t(zeta)`, the sum of separable products.
    pub fn from_separable<'a>(
        n: usize,
        terms: impl IntoIterator<Item = (Complex, &'a UniPoly, &'a UniPoly)>,
    ) -> Self {
        let mut p = Self::zeros(n);
        for (w, eta_part, zeta_part) in terms {
            for (k, a) in eta_part.coeffs().iter().enumerate().take(n + 1) {
                for (l, b) in zeta_part.coeffs().iter().enumerate().take(n + 1) {
                    p.c[k * (n + 1) + l] += w * a * b;
                }
            }
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: usize, l: usize) -> Complex {
        self.c[k * (self.n + 1) + l]
    }

    pub fn rows(&self) -> Vec<Vec<Complex>> {
        self.c.chunks(self.n + 1).map(|r| r.to_vec()).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub(crate) fn mark_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self { n: self.n, c: self.c.iter().map(|z| z * s).collect(), normalized: false }
    }

    /// Largest coefficient difference, relative to the larger of the two maxima.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "bidegree mismatch");
        let scale = self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE);
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Horner evaluation in both variables.
    pub fn eval_affine(&self, eta: Complex, zeta: Complex) -> Complex {
        self.c
            .chunks(self.n + 1)
            .rev()
            .fold(Complex::default(), |acc, row| {
                let inner = row.iter().rev().fold(Complex::default(), |s, c| s * zeta + c);
                acc * eta + inner
            })
    }

    pub fn eval_homogeneous(&self, a: &ProjPoint, b: &ProjPoint) -> Complex {
        let ma = a.monomials(self.n);
        let mb = b.monomials(self.n);
        self.bilinear(&ma, &mb)
    }

    fn bilinear(&self, ma: &[Complex], mb: &[Complex]) -> Complex {
        let n1 = self.n + 1;
        let mut acc = Complex::default();
        for k in 0..n1 {
            let row: Complex = (0..n1).map(|l| self.c[k * n1 + l] * mb[l]).sum();
            acc += ma[k] * row;
        }
        acc
    }

    /// Partial derivatives of the homogeneous form along `a + s*da` and `b + t*db`.
    pub fn directional_derivatives(
        &self,
        a: &ProjPoint,
        b: &ProjPoint,
        da: &ProjPoint,
        db: &ProjPoint,
    ) -> (Complex, Complex) {
        let ma = a.monomials(self.n);
        let mb = b.monomials(self.n);
        let dma = a.monomial_derivatives(da, self.n);
        let dmb = b.monomial_derivatives(db, self.n);
        (self.bilinear(&dma, &mb), self.bilinear(&ma, &dmb))
    }

    /// The reality involution `(-1)^N eta^N zeta^N conj(p(-1/conj(zeta), -1/conj(eta)))`.
    ///
    /// Coefficientwise, `p*[a][b] = (-1)^(N+a+b) conj(c[N-b][N-a])`.
    pub fn reality_transform(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |a, b| {
            let z = self.coeff(n - b, n - a).conj();
            if (n + a + b).is_multiple_of(2) {
                z
            } else {
                -z
            }
        })
    }

    /// `max |p - p*| / max |p|`; zero for real curves in the normalised gauge.
    pub fn reality_defect(&self) -> f64 {
        self.relative_distance(&self.reality_transform())
    }

    /// The value `conj(zeta)^N p(-1/conj(zeta), zeta)` at unit-norm `zeta`.
    pub fn antidiagonal_value(&self, zeta: &ProjPoint) -> Complex {
        let z = zeta.normalized();
        self.eval_homogeneous(&z.antipode(), &z)
    }

    /// Real part of the anti-diagonal restriction at `samples` spiral points plus `0` and `infinity`.
    ///
    /// The trailing two entries are `zeta = 0` and `zeta = infinity`. Any sample
    /// whose imaginary part exceeds `tol_id * max|c|` is an error: the curve is
    /// not real in the normalised gauge.
    pub fn antidiagonal_profile(&self, samples: usize, tol_id: f64) -> Result<Vec<f64>> {
        let scale = self.max_abs();
        let mut pts = fibonacci_sphere(samples);
        pts.push(ProjPoint::affine(Complex::default()));
        pts.push(ProjPoint::infinity());
        pts.iter()
            .enumerate()
            .map(|(i, z)| {
                let v = self.antidiagonal_value(z);
                if v.im.abs() >= tol_id * scale {
                    Err(JnrError::ImaginaryResidue { sample: i, residue: v.im.abs() / scale })
                } else {
                    Ok(v.re)
                }
            })
            .collect()
    }

    /// The fibre polynomial `zeta -> p(eta, zeta)` for a fixed representative of `eta`.
    pub fn slice_eta(&self, eta: &ProjPoint) -> UniPoly {
        let ma = eta.monomials(self.n);
        let n1 = self.n + 1;
        UniPoly::new(
            (0..n1)
                .map(|l| (0..n1).map(|k| ma[k] * self.c[k * n1 + l]).sum())
                .collect(),
        )
    }

    /// The fibre polynomial `eta -> p(eta, zeta)`.
    pub fn slice_zeta(&self, zeta: &ProjPoint) -> UniPoly {
        let mb = zeta.monomials(self.n);
        let n1 = self.n + 1;
        UniPoly::new(
            (0..n1)
                .map(|k| (0..n1).map(|l| mb[l] * self.c[k * n1 + l]).sum())
                .collect(),
        )
    }

    /// Brings a real curve into the normalised gauge: `p = p*` and a positive
    /// anti-diagonal profile.
    ///
    /// For a real curve `p = rho p*` with `|rho| = 1`; multiplying by
    /// `exp(-i arg(rho)/2)` removes `rho`, and an overall sign fixes positivity.
    pub fn normalize(&self) -> Result<Self> {
        if self.max_abs() == 0.0 {
            return Err(JnrError::ZeroPolynomial);
        }
        let star = self.reality_transform();
        let num: Complex = star.c.iter().zip(&self.c).map(|(s, p)| s.conj() * p).sum();
        let den: f64 = star.c.iter().map(|s| s.norm_sqr()).sum();
        let rho = num / den;
        let mu = Complex::from_polar(1.0, -0.5 * rho.arg());
        let mut q = self.scale(mu);
        let zero = q.antidiagonal_value(&ProjPoint::affine(Complex::default()));
        let inf = q.antidiagonal_value(&ProjPoint::infinity());
        let probe = if zero.norm() >= inf.norm() { zero } else { inf };
        if probe.re < 0.0 {
            q = q.scale(Complex::new(-1.0, 0.0));
        }
        Ok(q.mark_normalized())
    }
}
