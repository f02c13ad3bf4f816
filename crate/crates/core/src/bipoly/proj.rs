use crate::Complex;

/// A point `[u0 : u1]` of the projective line; the affine coordinate is `u1 / u0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint {
    pub u0: Complex,
    pub u1: Complex,
}

impl ProjPoint {
    /// Returns `None` for `(0, 0)` or non-finite input.
    pub fn new(u0: Complex, u1: Complex) -> Option<Self> {
        let finite = u0.is_finite() && u1.is_finite();
        if !finite || (u0.norm_sqr() == 0.0 && u1.norm_sqr() == 0.0) {
            None
        } else {
            Some(Self { u0, u1 })
        }
    }

    pub fn affine(z: Complex) -> Self {
        Self { u0: Complex::new(1.0, 0.0), u1: z }
    }

    pub fn infinity() -> Self {
        Self { u0: Complex::new(0.0, 0.0), u1: Complex::new(1.0, 0.0) }
    }

    pub fn is_infinity(&self) -> bool {
        self.u0.norm() <= f64::EPSILON * self.u1.norm()
    }

    /// Affine coordinate, or `None` at infinity.
    pub fn to_affine(&self) -> Option<Complex> {
        if self.is_infinity() {
            None
        } else {
            Some(self.u1 / self.u0)
        }
    }

    /// The antipodal point `-1/conj(z)`, written `[conj(u1) : -conj(u0)]`.
    pub fn antipode(&self) -> Self {
        Self { u0: self.u1.conj(), u1: -self.u0.conj() }
    }

    /// Representative with `|u0|^2 + |u1|^2 = 1`.
    pub fn normalized(&self) -> Self {
        let r = (self.u0.norm_sqr() + self.u1.norm_sqr()).sqrt();
        Self { u0: self.u0 / r, u1: self.u1 / r }
    }

    /// Chordal distance, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let cross = self.u0 * other.u1 - self.u1 * other.u0;
        let na = (self.u0.norm_sqr() + self.u1.norm_sqr()).sqrt();
        let nb = (other.u0.norm_sqr() + other.u1.norm_sqr()).sqrt();
        cross.norm() / (na * nb)
    }

    /// Spinor `[cos(t/2) : sin(t/2) e^{i phi}]` for polar angle `t` measured from `z = 0`.
    pub fn from_sphere_angles(polar: f64, azimuth: f64) -> Self {
        let (s, c) = (0.5 * polar).sin_cos();
        Self {
            u0: Complex::new(c, 0.0),
            u1: Complex::from_polar(s, azimuth),
        }
    }

    /// `[u0^d, u0^{d-1} u1, ..., u1^d]`: the degree-`d` monomials `u1^k u0^{d-k}`.
    pub(crate) fn monomials(&self, d: usize) -> Vec<Complex> {
        let mut p0 = vec![Complex::new(1.0, 0.0); d + 1];
        let mut p1 = vec![Complex::new(1.0, 0.0); d + 1];
        for k in 1..=d {
            p0[k] = p0[k - 1] * self.u0;
            p1[k] = p1[k - 1] * self.u1;
        }
        (0..=d).map(|k| p1[k] * p0[d - k]).collect()
    }

    /// Derivatives of [`Self::monomials`] along `self + t * dir` at `t = 0`.
    pub(crate) fn monomial_derivatives(&self, dir: &Self, d: usize) -> Vec<Complex> {
        let zero = Complex::new(0.0, 0.0);
        let pow = |x: Complex, e: usize| -> Complex {
            let mut r = Complex::new(1.0, 0.0);
            for _ in 0..e {
                r *= x;
            }
            r
        };
        (0..=d)
            .map(|k| {
                let a = if k > 0 {
                    Complex::new(k as f64, 0.0) * pow(self.u1, k - 1) * dir.u1 * pow(self.u0, d - k)
                } else {
                    zero
                };
                let b = if k < d {
                    Complex::new((d - k) as f64, 0.0) * pow(self.u1, k) * pow(self.u0, d - k - 1) * dir.u0
                } else {
                    zero
                };
                a + b
            })
            .collect()
    }
}

/// `n` deterministic, near-uniform points of the Riemann sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<ProjPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            ProjPoint::from_sphere_angles(z.clamp(-1.0, 1.0).acos(), golden * i as f64)
        })
        .collect()
}
