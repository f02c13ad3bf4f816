//! JNR data and the objects built directly from it: the spectral curve, the
//! section of `O(N+1, -N-1)`, grids and the degeneration limits.

mod grid;

pub use grid::{
    detect_grid, make_grid, recover_weights, verify_grid_on_curve, Grid, GridReport, GridSearch,
};

use crate::bipoly::{BiPoly, ProjPoint, UniPoly};
use crate::error::{JnrError, Result};
use crate::tolerance::{Tolerances, TAU_SEP};
use crate::Complex;

/// Positive weights and distinct finite poles, one of each per index `0..=N`.
///
/// Weights are kept as supplied; [`JnrData::canonical`] rescales them so that
/// the squares sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct JnrData {
    weights: Vec<f64>,
    poles: Vec<Complex>,
}

/// How close a data set sits to the degenerate regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conditioning {
    pub min_separation: f64,
    pub weight_ratio: f64,
}

impl JnrData {
    pub fn new(weights: Vec<f64>, poles: Vec<Complex>) -> Result<Self> {
        Self::with_separation(weights, poles, TAU_SEP)
    }

    pub fn with_separation(weights: Vec<f64>, poles: Vec<Complex>, sep: f64) -> Result<Self> {
        if weights.len() != poles.len() {
            return Err(JnrError::InvalidData(format!(
                "{} weights but {} poles",
                weights.len(),
                poles.len()
            )));
        }
        if weights.len() < 2 {
            return Err(JnrError::InvalidData("need at least two poles (charge N >= 1)".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(JnrError::InvalidData(format!("weight {i} must be positive and finite")));
        }
        if let Some(i) = poles.iter().position(|p| !p.is_finite()) {
            return Err(JnrError::InvalidData(format!("pole {i} is not finite")));
        }
        check_distinct(&poles, sep)?;
        Ok(Self { weights, poles })
    }

    /// The charge `N`: one less than the number of poles.
    pub fn charge(&self) -> usize {
        self.poles.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    pub fn weights_squared(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w * w).collect()
    }

    /// `lambda_i^2 / sum lambda^2`, without rounding through the square root.
    pub fn canonical_weights_squared(&self) -> Vec<f64> {
        let w = self.weights_squared();
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    }

    /// Same poles, weights rescaled to `sum lambda^2 = 1`.
    pub fn canonical(&self) -> Self {
        let s = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        Self {
            weights: self.weights.iter().map(|w| w / s).collect(),
            poles: self.poles.clone(),
        }
    }

    /// Same poles, every weight multiplied by `t > 0`.
    pub fn rescaled(&self, t: f64) -> Self {
        Self { weights: self.weights.iter().map(|w| w * t).collect(), poles: self.poles.clone() }
    }

    pub fn conditioning(&self) -> Conditioning {
        let mut min_separation = f64::INFINITY;
        for i in 0..self.poles.len() {
            for j in i + 1..self.poles.len() {
                min_separation = min_separation.min((self.poles[i] - self.poles[j]).norm());
            }
        }
        let max = self.weights.iter().copied().fold(0.0, f64::max);
        let min = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
        Conditioning { min_separation, weight_ratio: max / min }
    }

    /// `prod_{j != skip} (z - gamma_j)` as a polynomial in `z`.
    pub(crate) fn pole_product(&self, skip: &[usize]) -> UniPoly {
        let roots: Vec<Complex> = self
            .poles
            .iter()
            .enumerate()
            .filter(|(j, _)| !skip.contains(j))
            .map(|(_, g)| *g)
            .collect();
        UniPoly::from_roots(&roots, Complex::new(1.0, 0.0))
    }

    /// `prod_{j != skip} (1 + eta conj(gamma_j))` as a polynomial in `eta`.
    fn antipode_product(&self, skip: usize) -> UniPoly {
        let mut p = UniPoly::constant(Complex::new(1.0, 0.0));
        for (j, g) in self.poles.iter().enumerate() {
            if j != skip {
                p = &p * &UniPoly::new(vec![Complex::new(1.0, 0.0), g.conj()]);
            }
        }
        p
    }
}

pub(crate) fn check_distinct(poles: &[Complex], sep: f64) -> Result<()> {
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            if (poles[i] - poles[j]).norm() <= sep {
                return Err(JnrError::DuplicatePoles(i, j));
            }
        }
    }
    Ok(())
}

/// `p(eta, zeta) = sum_i lambda_i^2 prod_{j != i} (zeta - gamma_j)(1 + eta conj(gamma_j))`.
///
/// Uses the weights as stored, so rescaling the weights by `t` rescales the
/// polynomial by `t^2` and leaves the curve unchanged.
pub fn spectral_curve(d: &JnrData) -> BiPoly {
    let n = d.charge();
    let parts: Vec<(Complex, UniPoly, UniPoly)> = (0..=n)
        .map(|i| {
            (
                Complex::new(d.weights[i] * d.weights[i], 0.0),
                d.antipode_product(i),
                d.pole_product(&[i]),
            )
        })
        .collect();
    BiPoly::from_separable(n, parts.iter().map(|(w, a, b)| (*w, a, b))).mark_normalized()
}

/// The limit curve `prod_{j != k} (zeta - gamma_j)(1 + eta conj(gamma_j))` reached as
/// `lambda_k -> 1` and every other weight goes to zero.
pub fn degenerate_limit_curve(d: &JnrData, k: usize) -> BiPoly {
    assert!(k <= d.charge(), "pole index {k} out of range");
    let a = d.antipode_product(k);
    let b = d.pole_product(&[k]);
    BiPoly::from_separable(d.charge(), [(Complex::new(1.0, 0.0), &a, &b)])
}

/// JNR data with `lambda_k^2 = 1 - N eps` and every other `lambda_j^2 = eps`.
pub fn degenerate_weights(d: &JnrData, k: usize, eps: f64) -> Result<JnrData> {
    let n = d.charge() as f64;
    let weights = (0..=d.charge())
        .map(|j| if j == k { (1.0 - n * eps).sqrt() } else { eps.sqrt() })
        .collect();
    JnrData::new(weights, d.poles.clone())
}

/// A value of `s(eta, zeta) = prod (zeta - gamma_i) / prod (1 + eta conj(gamma_i))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionValue {
    pub value: Complex,
    /// Set when the point was within `tau_near` of a grid point and the value
    /// was taken as the limit along the spectral curve.
    pub regular: bool,
}

/// Affine-chart representative `[1 : z]`, or `[0 : 1]` at infinity.
fn chart_rep(p: &ProjPoint) -> ProjPoint {
    match p.to_affine() {
        Some(z) => ProjPoint::affine(z),
        None => ProjPoint::infinity(),
    }
}

fn zeta_factor(w: &ProjPoint, g: Complex) -> Complex {
    w.u1 - g * w.u0
}

fn eta_factor(v: &ProjPoint, g: Complex) -> Complex {
    v.u0 + v.u1 * g.conj()
}

/// The section of `L^{N+1}` evaluated in the affine charts of `eta` and `zeta`.
///
/// Near a grid point `(-1/conj(gamma_j), gamma_i)`, `i != j`, numerator and
/// denominator both vanish; there the value is the limit along the curve,
/// `sigma * (zeta - gamma_i) / (1 + eta conj(gamma_j))`, with the ratio of the
/// two vanishing factors fixed by the implicit-function relation `p = 0`.
pub fn section_value(
    d: &JnrData,
    eta: &ProjPoint,
    zeta: &ProjPoint,
    tol: &Tolerances,
) -> Result<SectionValue> {
    let n1 = d.poles.len();
    let mut nearest = (f64::INFINITY, 0, 0);
    for i in 0..n1 {
        let dz = zeta.chordal_distance(&ProjPoint::affine(d.poles[i]));
        for j in 0..n1 {
            let de = eta.chordal_distance(&ProjPoint::affine(d.poles[j]).antipode());
            let dist = dz.max(de);
            if dist < nearest.0 {
                nearest = (dist, i, j);
            }
        }
    }
    let (dist, i, j) = nearest;
    if dist <= tol.near {
        if i == j {
            return Err(JnrError::PoleOffCurve);
        }
        return Ok(SectionValue { value: regularized_section(d, i, j), regular: true });
    }

    let v = chart_rep(eta);
    let w = chart_rep(zeta);
    for g in &d.poles {
        if eta.chordal_distance(&ProjPoint::affine(*g).antipode()) <= tol.near {
            return Err(JnrError::PoleOffCurve);
        }
    }
    let num: Complex = d.poles.iter().map(|g| zeta_factor(&w, *g)).product();
    let den: Complex = d.poles.iter().map(|g| eta_factor(&v, *g)).product();
    if den.norm() == 0.0 {
        return Err(JnrError::PoleOffCurve);
    }
    Ok(SectionValue { value: num / den, regular: false })
}

fn regularized_section(d: &JnrData, i: usize, j: usize) -> Complex {
    let p = spectral_curve(d);
    let v0 = chart_rep(&ProjPoint::affine(d.poles[j]).antipode());
    let w0 = chart_rep(&ProjPoint::affine(d.poles[i]));
    // directions transverse to each vanishing factor
    let e = ProjPoint::affine(d.poles[j]);
    let f = ProjPoint::affine(d.poles[i]).antipode();
    let (p_eta, p_zeta) = p.directional_derivatives(&v0, &w0, &e, &f);
    // p(v0 + t e, w0 + s f) = 0  =>  s / t -> -p_eta / p_zeta
    let ratio = -p_eta / p_zeta * zeta_factor(&f, d.poles[i]) / eta_factor(&e, d.poles[j]);
    let sigma_num: Complex = d
        .poles
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .map(|(_, g)| zeta_factor(&w0, *g))
        .product();
    let sigma_den: Complex = d
        .poles
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, g)| eta_factor(&v0, *g))
        .product();
    sigma_num / sigma_den * ratio
}
