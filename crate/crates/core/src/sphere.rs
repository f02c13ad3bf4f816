//! The holomorphic sphere `q(z) = [l_0/(z - g_0) : ... : l_N/(z - g_N)]` and the
//! rotation action on JNR data.
//!
//! Values are computed with the polynomial lift `q_i(z) = l_i prod_{j != i} (z - g_j)`,
//! which is finite and nonzero everywhere on `P^1`. The pairing identity
//! `psi(eta, zeta) = <q(-1/conj(eta)), q(zeta)>` holds for this lift on the nose,
//! not only projectively.

use nalgebra::DMatrix;
use rand::Rng;

use crate::bipoly::ProjPoint;
use crate::error::{JnrError, Result};
use crate::jnr::{spectral_curve, JnrData};
use crate::tolerance::TAU_SEP;
use crate::Complex;

#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicSphere {
    weights: Vec<f64>,
    poles: Vec<Complex>,
}

pub fn sphere_from_jnr(d: &JnrData) -> HolomorphicSphere {
    let d = d.canonical();
    HolomorphicSphere { weights: d.weights().to_vec(), poles: d.poles().to_vec() }
}

impl HolomorphicSphere {
    pub fn charge(&self) -> usize {
        self.poles.len() - 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, Complex)> + '_ {
        self.weights.iter().copied().zip(self.poles.iter().copied())
    }

    /// Polynomial lift `l_i prod_{j != i} (u1 - g_j u0)` at a homogeneous point.
    pub fn evaluate(&self, z: &ProjPoint) -> Vec<Complex> {
        let factors: Vec<Complex> = self.poles.iter().map(|g| z.u1 - g * z.u0).collect();
        (0..self.poles.len())
            .map(|i| {
                let prod: Complex = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, f)| *f)
                    .product();
                prod * self.weights[i]
            })
            .collect()
    }

    /// Polynomial lift and its `z`-derivative at an affine point.
    pub fn evaluate_with_derivative(&self, z: Complex) -> (Vec<Complex>, Vec<Complex>) {
        let f: Vec<Complex> = self.poles.iter().map(|g| z - g).collect();
        let n1 = f.len();
        let mut value = Vec::with_capacity(n1);
        let mut slope = Vec::with_capacity(n1);
        for i in 0..n1 {
            let mut v = Complex::new(1.0, 0.0);
            let mut dv = Complex::default();
            for (j, fj) in f.iter().enumerate() {
                if j != i {
                    dv = dv * fj + v;
                    v *= fj;
                }
            }
            value.push(v * self.weights[i]);
            slope.push(dv * self.weights[i]);
        }
        (value, slope)
    }

    /// Rational lift and its `z`-derivative.
    pub fn evaluate_rational_with_derivative(&self, z: Complex) -> (Vec<Complex>, Vec<Complex>) {
        self.terms()
            .map(|(l, g)| {
                let r = 1.0 / (z - g);
                (r * l, -r * r * l)
            })
            .unzip()
    }

    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Rational lift `l_i / (z - g_i)`; singular at the poles.
    pub fn evaluate_rational(&self, z: Complex) -> Vec<Complex> {
        self.terms().map(|(l, g)| l / (z - g)).collect()
    }

    /// Value at infinity: `[l_0 : ... : l_N]`.
    pub fn at_infinity(&self) -> Vec<Complex> {
        self.evaluate(&ProjPoint::infinity())
    }

    /// Condition number of the evaluation matrix at `N + 1` spread-out points.
    ///
    /// Finite exactly when the image spans `P^N`.
    pub fn fullness_condition(&self) -> f64 {
        let n1 = self.poles.len();
        let radius = 1.0 + self.poles.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let m = DMatrix::from_fn(n1, n1, |row, col| {
            let z = Complex::from_polar(radius * (0.5 + row as f64 / n1 as f64), golden * row as f64);
            let v = self.evaluate(&ProjPoint::affine(z));
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v[col] / norm
        });
        let sv = m.singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Hermitian pairing, conjugate-linear in the first slot.
pub fn hermitian(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `psi(eta, zeta) = (-1)^N p(eta, zeta) / eta^N` for the curve of `d` as given.
pub fn psi_value(d: &JnrData, eta: Complex, zeta: Complex) -> Complex {
    let n = d.charge() as i32;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    spectral_curve(d).eval_affine(eta, zeta) * sign / eta.powi(n)
}

/// `<q(antipode(v)), q(w)>` with antipode representative `[conj(v1) : -conj(v0)]`.
///
/// Equals `(-1)^N p(v, w)` in homogeneous coordinates, which also covers `eta = 0`.
pub fn pairing_homogeneous(q: &HolomorphicSphere, v: &ProjPoint, w: &ProjPoint) -> Complex {
    hermitian(&q.evaluate(&v.antipode()), &q.evaluate(w))
}

fn random_point<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let polar = rng.random::<f64>().mul_add(-2.0, 1.0).acos();
    let azimuth = rng.random::<f64>() * std::f64::consts::TAU;
    Complex::from_polar((0.5 * polar).tan(), azimuth)
}

/// Largest relative gap between `psi` and the pairing over random `(eta, zeta)`.
///
/// The comparison uses canonical weights on both sides; each gap is divided by
/// `sum_i |q_i(-1/conj(eta))| |q_i(zeta)|`.
pub fn pairing_check<R: Rng + ?Sized>(d: &JnrData, samples: usize, rng: &mut R) -> f64 {
    let d = d.canonical();
    let q = sphere_from_jnr(&d);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let eta = loop {
            let z = random_point(rng);
            if z.norm() > 1e-3 {
                break z;
            }
        };
        let zeta = random_point(rng);
        worst = worst.max(pairing_defect(&d, &q, eta, zeta));
    }
    worst
}

pub(crate) fn pairing_defect(d: &JnrData, q: &HolomorphicSphere, eta: Complex, zeta: Complex) -> f64 {
    let a = q.evaluate(&ProjPoint::affine(-1.0 / eta.conj()));
    let b = q.evaluate(&ProjPoint::affine(zeta));
    let scale: f64 = a.iter().zip(&b).map(|(x, y)| x.norm() * y.norm()).sum();
    (psi_value(d, eta, zeta) - hermitian(&a, &b)).norm() / scale
}

/// Relative size of the pairing at `(eta, zeta)`; zero on the spectral curve.
pub fn relative_pairing(q: &HolomorphicSphere, eta: Complex, zeta: Complex) -> f64 {
    let a = q.evaluate(&ProjPoint::affine(-1.0 / eta.conj()));
    let b = q.evaluate(&ProjPoint::affine(zeta));
    let scale: f64 = a.iter().zip(&b).map(|(x, y)| x.norm() * y.norm()).sum();
    hermitian(&a, &b).norm() / scale
}

/// An element of `SU(2)/{+-1}`, acting by `z -> (a z + b) / (-conj(b) z + conj(a))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    a: Complex,
    b: Complex,
}

impl Rotation {
    /// Requires `|a|^2 + |b|^2 = 1` within `tol`.
    pub fn new(a: Complex, b: Complex, tol: f64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > tol || !a.is_finite() || !b.is_finite() {
            return Err(JnrError::NonUnitRotation(n));
        }
        Ok(Self { a, b })
    }

    /// Normalises an arbitrary nonzero quaternion `w + x i + y j + z k`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self { a: Complex::new(w / n, z / n), b: Complex::new(y / n, x / n) }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
            let n2: f64 = q.iter().map(|x| x * x).sum();
            if n2 > 1e-4 && n2 <= 1.0 {
                return Self::from_quaternion(q[0], q[1], q[2], q[3]);
            }
        }
    }

    pub fn identity() -> Self {
        Self { a: Complex::new(1.0, 0.0), b: Complex::default() }
    }

    pub fn a(&self) -> Complex {
        self.a
    }

    pub fn b(&self) -> Complex {
        self.b
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        Self {
            a: self.a * other.a - self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), b: -self.b }
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint {
            u0: -self.b.conj() * p.u1 + self.a.conj() * p.u0,
            u1: self.a * p.u1 + self.b * p.u0,
        }
    }

    /// `g . z`.
    pub fn act(&self, z: Complex) -> Complex {
        (self.a * z + self.b) / (self.a.conj() - self.b.conj() * z)
    }

    /// `g^{-1} . z = (conj(a) z - b) / (conj(b) z + a)`.
    pub fn act_inverse(&self, z: Complex) -> Complex {
        (self.a.conj() * z - self.b) / (self.b.conj() * z + self.a)
    }

    /// `d(g^{-1} . z)/dz = 1 / (conj(b) z + a)^2`.
    pub fn inverse_derivative(&self, z: Complex) -> Complex {
        let d = self.b.conj() * z + self.a;
        1.0 / (d * d)
    }
}

/// `{l_j, g_j} -> {l_j / |conj(a) - conj(b) g_j|, (a g_j + b) / (conj(a) - conj(b) g_j)}`.
///
/// The weights are transformed literally, without renormalisation.
pub fn rotate(d: &JnrData, g: &Rotation) -> Result<JnrData> {
    let mut weights = Vec::with_capacity(d.poles().len());
    let mut poles = Vec::with_capacity(d.poles().len());
    for (j, (l, p)) in d.weights().iter().zip(d.poles()).enumerate() {
        let den = g.a.conj() - g.b.conj() * p;
        if den.norm() <= TAU_SEP {
            return Err(JnrError::PoleAtInfinity(j));
        }
        weights.push(l / den.norm());
        poles.push((g.a * p + g.b) / den);
    }
    JnrData::new(weights, poles)
}

/// `l_i^2 l_j^2 / |1 + conj(g_i) g_j|^2` for `i <= j`, row-major.
///
/// Evaluated on the weights as given: these are invariants of the literal
/// action in [`rotate`].
pub fn invariant_functions(d: &JnrData) -> Result<Vec<((usize, usize), f64)>> {
    let w = d.weights_squared();
    let g = d.poles();
    let mut out = Vec::with_capacity(g.len() * (g.len() + 1) / 2);
    for i in 0..g.len() {
        for j in i..g.len() {
            let den = (1.0 + g[i].conj() * g[j]).norm_sqr();
            if den.sqrt() <= TAU_SEP {
                return Err(JnrError::AntipodalDegeneracy(i, j));
            }
            out.push(((i, j), w[i] * w[j] / den));
        }
    }
    Ok(out)
}
