//! The based rational map of a JNR monopole, built two independent ways.
//!
//! [`closed_form_map`] expands the explicit double sum over pole pairs;
//! [`scattering_map`] follows the scattering recipe `P = s(0, z) + (a z + b) Q`
//! with `Q(z) = p(0, z)`. Evaluated literally the two numerators differ by an
//! overall sign, which is a U(1) framing change; [`compare_up_to_phase`]
//! reports that constant.

use crate::bipoly::{roots, ProjPoint, UniPoly};
use crate::error::{JnrError, Result};
use crate::jnr::{spectral_curve, JnrData};
use crate::tolerance::{TAU_CLUSTER, TAU_ID};
use crate::Complex;

/// `num / den` with `deg num < deg den`, stored with a monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    num: UniPoly,
    den: UniPoly,
}

impl RationalMap {
    /// Scales so the denominator is monic.
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        let lead = den.leading().ok_or(JnrError::ZeroPolynomial)?;
        let den = den.scale(1.0 / lead);
        let num = UniPoly::new(num.scale(1.0 / lead).into_coeffs());
        if num.degree().unwrap_or(0) >= den.degree().unwrap_or(0) && !num.is_zero() {
            return Err(JnrError::IncompatibleDegrees);
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Value at `infinity`: zero for every based map.
    pub fn value_at_infinity(&self) -> Complex {
        match (self.num.degree(), self.den.degree()) {
            (Some(a), Some(b)) if a == b => self.num.leading().unwrap() / self.den.leading().unwrap(),
            _ => Complex::default(),
        }
    }

    pub fn is_based(&self) -> bool {
        self.num.degree().is_none_or(|d| Some(d) < self.den.degree())
    }

    /// No root of the numerator within `TAU_CLUSTER` of a root of the denominator.
    pub fn is_coprime(&self) -> bool {
        if self.num.degree().unwrap_or(0) == 0 {
            return !self.num.is_zero();
        }
        let (Ok(a), Ok(b)) = (roots(&self.num), roots(&self.den)) else {
            return false;
        };
        a.iter().all(|x| b.iter().all(|y| (x - y).norm() > TAU_CLUSTER))
    }
}

/// Closed form: `sum_{i<j} l_i^2 l_j^2 (g_i - g_j)^2 prod_{k != i,j} (z - g_k)` over
/// `(sum l^2) * sum_j l_j^2 prod_{k != j} (z - g_k)`.
pub fn closed_form_map(d: &JnrData) -> RationalMap {
    let w = d.canonical_weights_squared();
    let g = d.poles();
    let n1 = g.len();
    let mut num = UniPoly::zero();
    for i in 0..n1 {
        for j in i + 1..n1 {
            let diff = g[i] - g[j];
            let term = d.pole_product(&[i, j]).scale(diff * diff * w[i] * w[j]);
            num = &num + &term;
        }
    }
    let total: f64 = w.iter().sum();
    let mut den = UniPoly::zero();
    for j in 0..n1 {
        den = &den + &d.pole_product(&[j]).scale(Complex::new(w[j] * total, 0.0));
    }
    RationalMap::new(num, den).expect("closed form is based")
}

/// Scattering: with canonical weights, `Q(z) = p(0, z)` and
/// `P(z) = prod (z - g_i) + (-z + sum l_i^2 g_i) Q(z)`.
///
/// The `z^{N+1}` and `z^N` terms cancel identically; a surviving residue above
/// `TAU_ID` relative to the largest coefficient is reported as an error.
pub fn scattering_map(d: &JnrData) -> Result<RationalMap> {
    let n = d.charge();
    let total: f64 = d.weights_squared().iter().sum();
    let q = spectral_curve(d)
        .slice_eta(&ProjPoint::affine(Complex::default()))
        .scale(Complex::new(1.0 / total, 0.0));
    let b: Complex = d.canonical_weights_squared().iter().zip(d.poles()).map(|(w, g)| g * *w).sum();
    let section_at_zero = d.pole_product(&[]);
    let shift = UniPoly::untrimmed(vec![b, Complex::new(-1.0, 0.0)]);
    let full = &section_at_zero + &(&shift * &q);
    let scale = full.max_abs().max(section_at_zero.max_abs());
    let residue = full.coeff(n + 1).norm().max(full.coeff(n).norm()) / scale;
    if residue >= TAU_ID {
        return Err(JnrError::DegreeCancellationFailure { residue });
    }
    let num = UniPoly::new(full.coeffs()[..n].to_vec());
    RationalMap::new(num, q)
}

/// Result of [`compare_up_to_phase`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseComparison {
    /// The constant `c` minimising `|num1 - c num2|` once denominators are matched.
    pub constant: Complex,
    /// Relative residual of the numerators plus the relative denominator mismatch.
    pub defect: f64,
}

/// Finds `c` with `m1 ~ c m2`.
pub fn compare_up_to_phase(m1: &RationalMap, m2: &RationalMap) -> Result<PhaseComparison> {
    if m1.den.degree() != m2.den.degree() || m1.num.degree() != m2.num.degree() {
        return Err(JnrError::IncompatibleDegrees);
    }
    let den_defect = m1.den.max_abs_diff(&m2.den) / m1.den.max_abs();
    let n = m1.num.coeffs().len();
    let mut cross = Complex::default();
    let mut norm2 = 0.0;
    for k in 0..n {
        cross += m2.num.coeff(k).conj() * m1.num.coeff(k);
        norm2 += m2.num.coeff(k).norm_sqr();
    }
    if norm2 == 0.0 {
        return Err(JnrError::ZeroPolynomial);
    }
    let constant = cross / norm2;
    let resid = m1.num.max_abs_diff(&m2.num.scale(constant)) / m1.num.max_abs();
    Ok(PhaseComparison { constant, defect: resid + den_defect })
}

/// Coefficients of the projection form of the rational map.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionCoeffs {
    /// `a_i = sum_j l_i l_j^2 (g_i - g_j)` for canonical weights.
    pub a: Vec<Complex>,
    /// Weighted mean pole `sum l_j^2 g_j / sum l_j^2`.
    pub gamma_mean: Complex,
    data: JnrData,
}

pub fn projection_coefficients(d: &JnrData) -> ProjectionCoeffs {
    let data = d.canonical();
    let l = data.weights();
    let w = data.weights_squared();
    let g = data.poles();
    let a = (0..g.len())
        .map(|i| (0..g.len()).map(|j| (g[i] - g[j]) * l[i] * w[j]).sum())
        .collect();
    let total: f64 = w.iter().sum();
    let gamma_mean = w.iter().zip(g).map(|(w, g)| g * *w).sum::<Complex>() / total;
    ProjectionCoeffs { a, gamma_mean, data }
}

impl ProjectionCoeffs {
    /// `sum a_i l_i`, which vanishes so that the map is based.
    pub fn weighted_sum(&self) -> Complex {
        self.a.iter().zip(self.data.weights()).map(|(a, l)| a * *l).sum()
    }

    /// `(sum a_i l_i / (z - g_i)) / (sum l_i^2 / (z - g_i))`.
    pub fn eval(&self, z: Complex) -> Complex {
        let mut num = Complex::default();
        let mut den = Complex::default();
        for ((a, l), g) in self.a.iter().zip(self.data.weights()).zip(self.data.poles()) {
            let inv = 1.0 / (z - g);
            num += a * *l * inv;
            den += inv * (l * l);
        }
        num / den
    }

    /// `(sum g_i l_i^2 / (z - g_i)) / (sum l_i^2 / (z - g_i)) - <g>`.
    pub fn eval_mean_shift(&self, z: Complex) -> Complex {
        let mut num = Complex::default();
        let mut den = Complex::default();
        for (l, g) in self.data.weights().iter().zip(self.data.poles()) {
            let inv = 1.0 / (z - g);
            num += g * inv * (l * l);
            den += inv * (l * l);
        }
        num / den - self.gamma_mean
    }
}
