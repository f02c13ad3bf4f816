//! Boundary energy density `E(q) = |q ^ dq|^2 / |q|^4` in the flat `z`-chart,
//! rasters of it, and the total energy integral.
//!
//! The total is `N pi` with the Fubini–Study form normalised so that a
//! degree-one map has energy `pi`.

use rayon::prelude::*;

use crate::error::{JnrError, Result};
use crate::jnr::{degenerate_weights, JnrData};
use crate::sphere::{hermitian, sphere_from_jnr, HolomorphicSphere};
use crate::tolerance::TAU_NEAR;
use crate::Complex;

/// Largest accepted raster side.
pub const MAX_RESOLUTION: usize = 8192;

fn wedge_energy(q: &[Complex], dq: &[Complex]) -> f64 {
    let mut wedge = 0.0;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            wedge += (q[i] * dq[j] - q[j] * dq[i]).norm_sqr();
        }
    }
    let norm: f64 = q.iter().map(|x| x.norm_sqr()).sum();
    wedge / (norm * norm)
}

/// `E(q)(z)` from the wedge components.
///
/// Uses the rational lift, except within [`TAU_NEAR`] of a pole where the
/// polynomial lift is used instead.
pub fn energy_density(q: &HolomorphicSphere, z: Complex) -> f64 {
    if q.poles().iter().any(|g| (z - g).norm() <= TAU_NEAR) {
        return energy_density_polynomial(q, z);
    }
    let (v, dv) = q.evaluate_rational_with_derivative(z);
    wedge_energy(&v, &dv)
}

/// `E(q)(z)` from the polynomial lift; finite at every affine point.
pub fn energy_density_polynomial(q: &HolomorphicSphere, z: Complex) -> f64 {
    let (v, dv) = q.evaluate_with_derivative(z);
    wedge_energy(&v, &dv)
}

/// `(|q|^2 |dq|^2 - |<q, dq>|^2) / |q|^4` with the rational lift.
pub fn energy_density_lagrange(q: &HolomorphicSphere, z: Complex) -> f64 {
    let (v, dv) = q.evaluate_rational_with_derivative(z);
    let nq = hermitian(&v, &v).re;
    let nd = hermitian(&dv, &dv).re;
    (nq * nd - hermitian(&v, &dv).norm_sqr()) / (nq * nq)
}

/// `sum_{j != k} (l_j / l_k)^2 / |g_k - g_j|^2`.
pub fn energy_at_pole(d: &JnrData, k: usize) -> f64 {
    let w = d.weights();
    let g = d.poles();
    (0..g.len())
        .filter(|&j| j != k)
        .map(|j| (w[j] / w[k]).powi(2) / (g[k] - g[j]).norm_sqr())
        .sum()
}

/// Mean of `energy_density` on `directions` equally spaced points at `radius` around `z`.
pub fn ring_average(q: &HolomorphicSphere, z: Complex, radius: f64, directions: usize) -> f64 {
    let total: f64 = (0..directions)
        .map(|m| {
            let t = std::f64::consts::TAU * m as f64 / directions as f64;
            energy_density(q, z + Complex::from_polar(radius, t))
        })
        .sum();
    total / directions as f64
}

/// Limit of `energy_density` at `z` from eight directions.
///
/// Ring means at radii `1e-4` and `5e-5` are combined to cancel the `r^2` term.
pub fn pole_limit(q: &HolomorphicSphere, z: Complex) -> f64 {
    let a = ring_average(q, z, 1e-4, 8);
    let b = ring_average(q, z, 5e-5, 8);
    (4.0 * b - a) / 3.0
}

/// FNV-1a over the bit patterns of the weights and poles, as 16 hex digits.
pub fn data_fingerprint(d: &JnrData) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: f64| {
        for b in x.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for w in d.weights() {
        eat(*w);
    }
    for g in d.poles() {
        eat(g.re);
        eat(g.im);
    }
    format!("{h:016x}")
}

/// Square raster of `E` in the `z`-chart.
///
/// Cell `(i, j)` is centred at `x_i = re(center) - h + (i + 0.5) 2h / nx` and the
/// analogous `y_j`; its value is `values[j * nx + i]`, so rows run upward in `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGrid {
    pub center: Complex,
    pub half_width: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub source: String,
    pub chart: String,
}

impl EnergyGrid {
    pub fn x(&self, i: usize) -> f64 {
        self.center.re - self.half_width + (i as f64 + 0.5) * 2.0 * self.half_width / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.center.im - self.half_width + (j as f64 + 0.5) * 2.0 * self.half_width / self.ny as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    }

    /// Interior cells no smaller than any of their eight neighbours and larger than one.
    pub fn local_maxima(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 1..self.ny.saturating_sub(1) {
            for i in 1..self.nx.saturating_sub(1) {
                let v = self.get(i, j);
                let mut strict = false;
                let mut ok = true;
                for dj in [-1isize, 0, 1] {
                    for di in [-1isize, 0, 1] {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let w = self.get((i as isize + di) as usize, (j as isize + dj) as usize);
                        ok &= v >= w;
                        strict |= v > w;
                    }
                }
                if ok && strict {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Cell containing `z`, if inside the region.
    pub fn cell_of(&self, z: Complex) -> Option<(usize, usize)> {
        let fx = (z.re - self.center.re + self.half_width) / (2.0 * self.half_width) * self.nx as f64;
        let fy = (z.im - self.center.im + self.half_width) / (2.0 * self.half_width) * self.ny as f64;
        (fx >= 0.0 && fy >= 0.0 && fx < self.nx as f64 && fy < self.ny as f64)
            .then_some((fx as usize, fy as usize))
    }
}

pub fn sample_grid(d: &JnrData, center: Complex, half_width: f64, nx: usize, ny: usize) -> Result<EnergyGrid> {
    if nx == 0 || ny == 0 || nx > MAX_RESOLUTION || ny > MAX_RESOLUTION {
        return Err(JnrError::ResourceLimit { nx, ny });
    }
    if !(half_width.is_finite() && half_width > 0.0) || !center.is_finite() {
        return Err(JnrError::InvalidData("region needs a finite center and positive half-width".into()));
    }
    let q = sphere_from_jnr(d);
    let mut grid = EnergyGrid {
        center,
        half_width,
        nx,
        ny,
        values: vec![0.0; nx * ny],
        source: data_fingerprint(d),
        chart: "z".into(),
    };
    let xs: Vec<f64> = (0..nx).map(|i| grid.x(i)).collect();
    let ys: Vec<f64> = (0..ny).map(|j| grid.y(j)).collect();
    grid.values.par_chunks_mut(nx).zip(ys.par_iter()).for_each(|(row, y)| {
        for (cell, x) in row.iter_mut().zip(&xs) {
            *cell = energy_density(&q, Complex::new(*x, *y));
        }
    });
    Ok(grid)
}

/// Midpoint resolutions for the polar rules, coarse to fine.
///
/// Each level runs the two chart disks at `n` by `n` cells and every pole patch
/// at `n / patch_divisor` by `n / patch_divisor`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub resolutions: Vec<usize>,
    pub patch_divisor: usize,
    pub tolerance: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { resolutions: vec![256, 512, 1024], patch_divisor: 4, tolerance: 5e-3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TotalEnergy {
    pub value: f64,
    /// Unextrapolated totals, one per resolution.
    pub raw: Vec<f64>,
    /// Richardson combinations of successive raw totals.
    pub extrapolated: Vec<f64>,
    pub relative_change: f64,
}

/// Smooth step: 1 on `[0, 1/2]`, 0 from 1 on.
fn cutoff(s: f64) -> f64 {
    if s <= 0.5 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let g = |x: f64| (-1.0 / x).exp();
    let u = 2.0 * s - 1.0;
    g(1.0 - u) / (g(1.0 - u) + g(u))
}

/// A disk around one pole, in the `z` chart or the `w = 1/z` chart.
#[derive(Clone, Copy, Debug)]
struct Patch {
    outer: bool,
    center: Complex,
    radius: f64,
}

impl Patch {
    fn weight(&self, z: Complex) -> f64 {
        let x = if self.outer { 1.0 / z } else { z };
        cutoff((x - self.center).norm() / self.radius)
    }
}

fn patches(poles: &[Complex]) -> Vec<Patch> {
    poles
        .iter()
        .map(|g| {
            let outer = g.norm() > 1.0;
            let chart = |z: Complex| if outer { 1.0 / z } else { z };
            let center = chart(*g);
            let gap = poles
                .iter()
                .filter(|h| *h != g)
                .map(|h| (chart(*h) - center).norm())
                .fold(f64::INFINITY, f64::min);
            Patch { outer, center, radius: (0.5 * gap).min(0.25) }
        })
        .collect()
}

/// Polar midpoint sum over `|x - center| < radius` with `r = radius t^3`.
fn disk_sum<F: Fn(Complex) -> f64 + Sync>(f: F, center: Complex, radius: f64, n: usize, graded: bool) -> f64 {
    let dt = 1.0 / n as f64;
    let da = std::f64::consts::TAU / n as f64;
    let rings: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = (k as f64 + 0.5) * dt;
            let (r, jac) = if graded { (radius * t * t * t, 3.0 * radius * t * t) } else { (radius * t, radius) };
            let mut s = 0.0;
            for m in 0..n {
                s += f(center + Complex::from_polar(r, (m as f64 + 0.5) * da));
            }
            s * r * jac
        })
        .collect();
    rings.iter().sum::<f64>() * dt * da
}

fn chart_density(q: &HolomorphicSphere, x: Complex, outer: bool) -> f64 {
    if outer {
        energy_density(q, 1.0 / x) / x.norm_sqr().powi(2)
    } else {
        energy_density(q, x)
    }
}

fn level_sum(q: &HolomorphicSphere, cover: &[Patch], n: usize, m: usize) -> f64 {
    let rest = |z: Complex| 1.0 - cover.iter().map(|p| p.weight(z)).sum::<f64>();
    let zero = Complex::default();
    let inner = disk_sum(|z| rest(z) * chart_density(q, z, false), zero, 1.0, n, false);
    let outer = disk_sum(|w| rest(1.0 / w) * chart_density(q, w, true), zero, 1.0, n, false);
    let local: f64 = cover
        .iter()
        .map(|p| {
            let f = |x: Complex| {
                let z = if p.outer { 1.0 / x } else { x };
                p.weight(z) * chart_density(q, x, p.outer)
            };
            disk_sum(f, p.center, p.radius, m, true)
        })
        .sum();
    inner + outer + local
}

/// `int_C E dA` over both chart disks.
///
/// Each pole gets a cutoff patch with radially graded nodes, which resolves the
/// narrow peaks of small weights; the remainder is smooth and uses the plain
/// polar rule. Successive levels are Richardson-combined.
pub fn total_energy(d: &JnrData, quad: &Quadrature) -> Result<TotalEnergy> {
    let q = sphere_from_jnr(d);
    let cover = patches(d.poles());
    let raw: Vec<f64> = quad
        .resolutions
        .iter()
        .map(|&n| level_sum(&q, &cover, n, (n / quad.patch_divisor.max(1)).max(4)))
        .collect();
    let extrapolated: Vec<f64> = raw.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let (coarse, fine) = match extrapolated.as_slice() {
        [.., a, b] => (*a, *b),
        [a] => (raw[0], *a),
        [] => (raw[0], raw[0]),
    };
    let relative = (fine - coarse).abs() / fine.abs();
    if !(relative <= quad.tolerance) {
        return Err(JnrError::QuadratureNonconvergence { coarse, fine, relative });
    }
    Ok(TotalEnergy { value: fine, raw, extrapolated, relative_change: relative })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationProfile {
    pub k: usize,
    pub epsilons: Vec<f64>,
    /// `E` at every pole for each epsilon: `energies[e][j]`.
    pub energies: Vec<Vec<f64>>,
    /// Log-log slope of `E(g_j)` against epsilon, per pole.
    pub slopes: Vec<f64>,
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Pole energies as `l_k^2 = 1 - N eps` and the other squares equal `eps`.
pub fn degeneration_profile(d: &JnrData, k: usize, epsilons: &[f64]) -> Result<DegenerationProfile> {
    if k >= d.poles().len() {
        return Err(JnrError::InvalidData(format!("pole index {k} out of range")));
    }
    if epsilons.len() < 2 {
        return Err(JnrError::InvalidData("need at least two epsilons".into()));
    }
    let energies = epsilons
        .iter()
        .map(|&e| {
            let de = degenerate_weights(d, k, e)?;
            Ok((0..de.poles().len()).map(|j| energy_at_pole(&de, j)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let slopes = (0..d.poles().len())
        .map(|j| {
            let y: Vec<f64> = energies.iter().map(|row| row[j]).collect();
            log_log_slope(epsilons, &y)
        })
        .collect();
    Ok(DegenerationProfile { k, epsilons: epsilons.to_vec(), energies, slopes })
}
