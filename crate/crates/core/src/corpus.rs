//! Random test instances: conditioned JNR data and real curves that are not JNR.

use rand::Rng;

use crate::bipoly::BiPoly;
use crate::jnr::JnrData;
use crate::Complex;

/// Limits for random JNR data.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditioned {
    pub min_charge: usize,
    pub max_charge: usize,
    /// Poles are drawn uniformly from the disk of this radius.
    pub radius: f64,
    pub min_separation: f64,
    /// Largest allowed `max(lambda) / min(lambda)`.
    pub weight_ratio: f64,
}

impl Default for Conditioned {
    fn default() -> Self {
        Self { min_charge: 1, max_charge: 8, radius: 2.0, min_separation: 0.1, weight_ratio: 100.0 }
    }
}

impl Conditioned {
    pub fn with_charges(min_charge: usize, max_charge: usize) -> Self {
        Self { min_charge, max_charge, ..Self::default() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> JnrData {
        let n = rng.random_range(self.min_charge..=self.max_charge);
        self.sample_charge(n, rng)
    }

    pub fn sample_charge<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> JnrData {
        let mut poles: Vec<Complex> = Vec::with_capacity(n + 1);
        while poles.len() <= n {
            let z = Complex::from_polar(
                self.radius * rng.random::<f64>().sqrt(),
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            if poles.iter().all(|p| (p - z).norm() >= self.min_separation) {
                poles.push(z);
            }
        }
        // log-uniform on [1, ratio]; the extremes never exceed the ratio
        let weights = (0..=n).map(|_| self.weight_ratio.powf(rng.random::<f64>())).collect();
        JnrData::new(weights, poles).expect("sampled data satisfies the invariants")
    }
}

/// `(p + p*) / 2` for a bidegree-`(n, n)` polynomial with Gaussian-like coefficients.
///
/// The result is real; for `n >= 4` it is almost surely not a JNR curve.
pub fn random_real_curve<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BiPoly {
    let p = BiPoly::from_fn(n, |_, _| {
        Complex::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    let t = p.reality_transform();
    BiPoly::from_fn(n, |k, l| (p.coeff(k, l) + t.coeff(k, l)) * 0.5)
}
