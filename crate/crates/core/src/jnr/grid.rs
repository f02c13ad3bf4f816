//! Grids `{(-1/conj(gamma_i), gamma_j) : i != j}` and the JNR criterion built on them.

use rayon::prelude::*;

use super::{check_distinct, JnrData};
use crate::bipoly::{roots, BiPoly, ProjPoint, UniPoly};
use crate::error::{JnrError, Result};
use crate::tolerance::Tolerances;
use crate::Complex;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    poles: Vec<Complex>,
}

impl Grid {
    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    /// The `N(N+1)` points `(antipode(gamma_i), gamma_j)`, `i != j`, row-major in `(i, j)`.
    pub fn points(&self) -> Vec<(ProjPoint, ProjPoint)> {
        self.pairs(false)
    }

    /// All `(N+1)^2` points, including the anti-diagonal ones with `i = j`.
    pub fn closure(&self) -> Vec<(ProjPoint, ProjPoint)> {
        self.pairs(true)
    }

    fn pairs(&self, diagonal: bool) -> Vec<(ProjPoint, ProjPoint)> {
        let mut out = Vec::new();
        for (i, gi) in self.poles.iter().enumerate() {
            for (j, gj) in self.poles.iter().enumerate() {
                if diagonal || i != j {
                    out.push((ProjPoint::affine(*gi).antipode(), ProjPoint::affine(*gj)));
                }
            }
        }
        out
    }

    /// Whether the reality involution `(eta, zeta) -> (antipode(zeta), antipode(eta))`
    /// permutes the grid.
    pub fn is_real(&self, tol: f64) -> bool {
        let pts = self.points();
        pts.iter().all(|(eta, zeta)| {
            let (te, tz) = (zeta.antipode(), eta.antipode());
            pts.iter()
                .any(|(e, z)| e.chordal_distance(&te) < tol && z.chordal_distance(&tz) < tol)
        })
    }

    /// Smallest chordal distance from a grid point to the anti-diagonal.
    pub fn antidiagonal_clearance(&self) -> f64 {
        self.points()
            .iter()
            .map(|(eta, zeta)| zeta.chordal_distance(&eta.antipode()))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn make_grid(poles: &[Complex]) -> Result<Grid> {
    check_distinct(poles, crate::tolerance::TAU_SEP)?;
    Ok(Grid { poles: poles.to_vec() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridReport {
    /// `max |p(grid point)|` over unit-norm representatives, relative to `max |c|`.
    pub defect: f64,
    pub pass: bool,
}

pub fn verify_grid_on_curve(p: &BiPoly, poles: &[Complex], tol: &Tolerances) -> GridReport {
    if poles.len() != p.n() + 1 {
        return GridReport { defect: f64::INFINITY, pass: false };
    }
    let defect = grid_defect(p, poles);
    GridReport { defect, pass: defect < tol.id }
}

fn grid_defect(p: &BiPoly, poles: &[Complex]) -> f64 {
    let scale = p.max_abs();
    let pts: Vec<ProjPoint> = poles.iter().map(|g| ProjPoint::affine(*g).normalized()).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        let eta = a.antipode();
        for (j, b) in pts.iter().enumerate() {
            if i != j {
                worst = worst.max(p.eval_homogeneous(&eta, b).norm() / scale);
            }
        }
    }
    worst
}

/// Recovers the JNR weights of a curve containing the grid of `poles`.
///
/// After putting `p` into the normalised gauge,
/// `lambda_i^2 = conj(gamma_i)^N p(-1/conj(gamma_i), gamma_i) / prod_{j != i} |gamma_i - gamma_j|^2`.
/// The slice of `p` at `[conj(gamma_i) : -1]` is `mu prod_{j != i} (zeta - gamma_j)`, so the
/// value at `zeta = gamma_i` is taken as `mu prod (gamma_i - gamma_j)` with `mu` fitted over
/// the whole slice; a single evaluation at `gamma_i` loses digits when poles cluster.
/// The result is canonical.
pub fn recover_weights(p: &BiPoly, poles: &[Complex], tol: &Tolerances) -> Result<JnrData> {
    let report = verify_grid_on_curve(p, poles, tol);
    if !report.pass {
        return Err(JnrError::GridMismatch { defect: report.defect });
    }
    let q = p.normalize()?;
    let mut weights = Vec::with_capacity(poles.len());
    for (i, g) in poles.iter().enumerate() {
        let slice = q.slice_eta(&ProjPoint::affine(*g).antipode());
        let others: Vec<&Complex> =
            poles.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h).collect();
        let factor = UniPoly::from_roots(others.iter().copied(), Complex::new(1.0, 0.0));
        let mut cross = Complex::default();
        let mut norm = 0.0;
        for k in 0..=factor.degree().unwrap_or(0) {
            cross += factor.coeff(k).conj() * slice.coeff(k);
            norm += factor.coeff(k).norm_sqr();
        }
        let mu = cross / norm;
        let value: Complex = others.iter().map(|h| g - *h).product::<Complex>() * mu;
        let sep: f64 = others.iter().map(|h| (g - *h).norm_sqr()).product();
        let lambda_sq = value.re / sep;
        if !(lambda_sq > 0.0) {
            return Err(JnrError::NegativeWeight { index: i, value: lambda_sq });
        }
        weights.push(lambda_sq.sqrt());
    }
    Ok(JnrData::with_separation(weights, poles.to_vec(), tol.sep)?.canonical())
}

/// Parameters of the seed sweep used by [`detect_grid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSearch {
    /// Seeds form a `lattice x lattice` grid on `[-radius, radius]^2`, clipped to the disk.
    pub lattice: usize,
    pub radius: f64,
    /// Levenberg-Marquardt iterations per seed.
    pub max_refinements: usize,
    /// Seeds processed between convergence checks; fixed so results do not depend on thread count.
    pub chunk: usize,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self { lattice: 32, radius: 3.0, max_refinements: 40, chunk: 64 }
    }
}

impl GridSearch {
    pub fn seeds(&self) -> Vec<Complex> {
        let step = 2.0 * self.radius / self.lattice as f64;
        let mut out = Vec::new();
        for a in 0..self.lattice {
            for b in 0..self.lattice {
                let z = Complex::new(
                    -self.radius + (b as f64 + 0.5) * step,
                    -self.radius + (a as f64 + 0.5) * step,
                );
                if z.norm() <= self.radius {
                    out.push(z);
                }
            }
        }
        out
    }
}

/// Searches for a grid on a real curve, starting from `seed` and then sweeping
/// the seed lattice.
///
/// Each seed `s` proposes the poles `{s} + roots of p(antipode(s), .)`; the
/// grid points through `s` then lie on the curve by construction, and the
/// remaining ones define a residual minimised over `s` by Levenberg-Marquardt.
/// Failure is not a proof that no grid exists.
pub fn detect_grid(p: &BiPoly, seed: Complex, search: &GridSearch, tol: &Tolerances) -> Result<Grid> {
    let first = refine_seed(p, seed, search.max_refinements, tol);
    if let Some(g) = accept(p, &first, tol) {
        return Ok(g);
    }
    let seeds = search.seeds();
    let mut best_defect = first.defect;
    let mut tried = 1;
    for (c, chunk) in seeds.chunks(search.chunk.max(1)).enumerate() {
        let results: Vec<Candidate> = chunk
            .par_iter()
            .map(|s| refine_seed(p, *s, search.max_refinements, tol))
            .collect();
        tried += chunk.len();
        let mut winner: Option<(f64, usize, Grid)> = None;
        for (k, cand) in results.iter().enumerate() {
            best_defect = best_defect.min(cand.defect);
            if let Some(g) = accept(p, cand, tol) {
                let idx = c * search.chunk + k;
                if winner.as_ref().is_none_or(|(d, _, _)| cand.defect < *d) {
                    winner = Some((cand.defect, idx, g));
                }
            }
        }
        if let Some((_, _, g)) = winner {
            return Ok(g);
        }
    }
    Err(JnrError::NoGridFound { seeds_tried: tried, best_defect })
}

#[derive(Clone, Debug)]
struct Candidate {
    poles: Option<Vec<Complex>>,
    defect: f64,
}

fn accept(p: &BiPoly, cand: &Candidate, tol: &Tolerances) -> Option<Grid> {
    let poles = cand.poles.as_ref()?;
    if cand.defect >= tol.id || check_distinct(poles, tol.sep).is_err() {
        return None;
    }
    verify_grid_on_curve(p, poles, tol).pass.then(|| Grid { poles: poles.clone() })
}

/// Poles proposed by a seed: the seed itself followed by the roots of the fibre over its antipode.
fn propose(p: &BiPoly, s: Complex) -> Option<Vec<Complex>> {
    let slice = p.slice_eta(&ProjPoint::affine(s).antipode());
    if slice.degree() != Some(p.n()) {
        return None;
    }
    let rs = roots(&slice).ok()?;
    Some(std::iter::once(s).chain(rs).collect())
}

/// Residuals `p(antipode(r_i), r_j)` over co-poles `i != j`, as interleaved real and imaginary parts.
fn residual(p: &BiPoly, poles: &[Complex]) -> Vec<f64> {
    let scale = p.max_abs();
    let pts: Vec<ProjPoint> = poles.iter().map(|g| ProjPoint::affine(*g).normalized()).collect();
    let mut r = Vec::new();
    for i in 1..pts.len() {
        let eta = pts[i].antipode();
        for j in 1..pts.len() {
            if i != j {
                let v = p.eval_homogeneous(&eta, &pts[j]) / scale;
                r.push(v.re);
                r.push(v.im);
            }
        }
    }
    r
}

/// Reorders `moved[1..]` to follow `base[1..]` by greedy nearest matching.
fn match_roots(base: &[Complex], moved: &[Complex]) -> Vec<Complex> {
    let mut rest: Vec<Complex> = moved[1..].to_vec();
    let mut out = vec![moved[0]];
    for b in &base[1..] {
        let (k, _) = rest
            .iter()
            .enumerate()
            .map(|(k, r)| (k, (r - b).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("same length");
        out.push(rest.swap_remove(k));
    }
    out
}

fn norm_inf(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn refine_seed(p: &BiPoly, seed: Complex, iterations: usize, tol: &Tolerances) -> Candidate {
    let Some(mut poles) = propose(p, seed) else {
        return Candidate { poles: None, defect: f64::INFINITY };
    };
    let mut r = residual(p, &poles);
    let mut mu = 1e-3;
    let mut stalled = 0;
    for _ in 0..iterations {
        if norm_inf(&r) < 1e-2 * tol.id {
            break;
        }
        let s = poles[0];
        let h = 1e-7 * (1.0 + s.norm());
        let mut jac = [Vec::new(), Vec::new()];
        let mut ok = true;
        for (axis, dir) in [Complex::new(h, 0.0), Complex::new(0.0, h)].into_iter().enumerate() {
            match (propose(p, s + dir), propose(p, s - dir)) {
                (Some(a), Some(b)) => {
                    let ra = residual(p, &match_roots(&poles, &a));
                    let rb = residual(p, &match_roots(&poles, &b));
                    jac[axis] = ra.iter().zip(&rb).map(|(x, y)| (x - y) / (2.0 * h)).collect();
                }
                _ => ok = false,
            }
        }
        if !ok {
            break;
        }
        // 2x2 normal equations
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (a11, a12, a22) = (dot(&jac[0], &jac[0]), dot(&jac[0], &jac[1]), dot(&jac[1], &jac[1]));
        let (g1, g2) = (dot(&jac[0], &r), dot(&jac[1], &r));
        let mut improved = false;
        for _ in 0..8 {
            let (b11, b22) = (a11 * (1.0 + mu), a22 * (1.0 + mu));
            let det = b11 * b22 - a12 * a12;
            if det.abs() < f64::MIN_POSITIVE {
                mu *= 10.0;
                continue;
            }
            let dx = -(b22 * g1 - a12 * g2) / det;
            let dy = -(b11 * g2 - a12 * g1) / det;
            let trial = s + Complex::new(dx, dy);
            if let Some(cand) = propose(p, trial) {
                let rt = residual(p, &cand);
                let (new, old) = (dot(&rt, &rt), dot(&r, &r));
                if new < old {
                    stalled = if new > 0.9 * old { stalled + 1 } else { 0 };
                    poles = cand;
                    r = rt;
                    mu = (mu / 4.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 8.0;
        }
        if !improved || stalled >= 3 {
            break;
        }
    }
    let defect = grid_defect(p, &poles);
    Candidate { poles: Some(poles), defect }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jnr::spectral_curve;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn example_three() -> JnrData {
        JnrData::new(vec![1.0; 4], vec![c(0.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0)]).unwrap()
    }

    fn five() -> JnrData {
        JnrData::new(
            vec![1.0, 0.7, 1.3, 0.9, 1.1],
            vec![c(0.2, 0.1), c(-1.0, 0.8), c(1.1, -0.4), c(0.3, -1.5), c(-0.9, -0.7)],
        )
        .unwrap()
    }

    fn set_distance(a: &[Complex], b: &[Complex]) -> f64 {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    #[test]
    fn grid_counts() {
        let g = make_grid(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(g.points().len(), 2);
        assert_eq!(g.closure().len(), 4);
        let g = make_grid(example_three().poles()).unwrap();
        assert_eq!(g.points().len(), 12);
        assert_eq!(g.closure().len(), 16);
    }

    #[test]
    fn grid_is_real_and_off_antidiagonal() {
        let g = make_grid(example_three().poles()).unwrap();
        assert!(g.is_real(1e-14));
        assert!(g.antidiagonal_clearance() > 0.1);
    }

    #[test]
    fn duplicate_poles_rejected() {
        assert_eq!(make_grid(&[c(1.0, 0.0), c(1.0, 0.0)]), Err(JnrError::DuplicatePoles(0, 1)));
    }

    #[test]
    fn verify_own_grid() {
        let d = example_three();
        let r = verify_grid_on_curve(&spectral_curve(&d), d.poles(), &Tolerances::default());
        assert!(r.pass && r.defect < 1e-10, "{r:?}");
    }

    #[test]
    fn verify_n1_by_hand() {
        let d = JnrData::new(vec![1.0, 1.0], vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let p = spectral_curve(&d);
        // (-1/conj(1), -1) = (-1, -1) and (1, 1): both on 2 zeta - 2 eta = 0
        assert_eq!(p.eval_affine(c(-1.0, 0.0), c(-1.0, 0.0)), c(0.0, 0.0));
        assert_eq!(p.eval_affine(c(1.0, 0.0), c(1.0, 0.0)), c(0.0, 0.0));
        assert!(verify_grid_on_curve(&p, d.poles(), &Tolerances::default()).pass);
    }

    #[test]
    fn perturbed_grid_fails() {
        let d = example_three();
        let mut poles = d.poles().to_vec();
        poles[2] += c(1e-3, 0.0);
        let r = verify_grid_on_curve(&spectral_curve(&d), &poles, &Tolerances::default());
        assert!(!r.pass && r.defect > 1e-6, "{r:?}");
    }

    #[test]
    fn recover_example_three() {
        let d = example_three();
        let got = recover_weights(&spectral_curve(&d), d.poles(), &Tolerances::default()).unwrap();
        for w in got.weights() {
            assert!((w - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_is_scale_and_phase_invariant() {
        let d = five();
        let p = spectral_curve(&d);
        let tol = Tolerances::default();
        let a = recover_weights(&p, d.poles(), &tol).unwrap();
        let b = recover_weights(&p.scale(c(7.0, 0.0)), d.poles(), &tol).unwrap();
        let e = recover_weights(&p.scale(Complex::from_polar(2.0, 2.5)), d.poles(), &tol).unwrap();
        for ((x, y), z) in a.weights().iter().zip(b.weights()).zip(e.weights()) {
            assert!((x - y).abs() < 1e-12 && (x - z).abs() < 1e-12);
        }
        for (x, y) in a.weights().iter().zip(d.canonical().weights()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn recovery_rejects_wrong_grid() {
        let d = five();
        let mut poles = d.poles().to_vec();
        poles[0] = c(3.0, 3.0);
        assert!(matches!(
            recover_weights(&spectral_curve(&d), &poles, &Tolerances::default()),
            Err(JnrError::GridMismatch { .. })
        ));
    }

    #[test]
    fn recovery_with_wrong_sign_gauge_still_positive() {
        let d = five();
        let p = spectral_curve(&d).scale(c(-1.0, 0.0));
        assert!(recover_weights(&p, d.poles(), &Tolerances::default()).is_ok());
    }

    #[test]
    fn detect_from_exact_pole() {
        let d = five();
        let p = spectral_curve(&d);
        let g = detect_grid(&p, d.poles()[0], &GridSearch::default(), &Tolerances::default()).unwrap();
        assert!(set_distance(g.poles(), d.poles()) < 1e-6);
    }

    #[test]
    fn detect_from_perturbed_seed() {
        let d = five();
        let p = spectral_curve(&d);
        let g = detect_grid(&p, d.poles()[3] + c(1e-2, -5e-3), &GridSearch::default(), &Tolerances::default())
            .unwrap();
        assert!(set_distance(g.poles(), d.poles()) < 1e-6, "{:?}", g.poles());
    }

    #[test]
    fn detect_with_sweep_from_bad_seed() {
        let d = example_three();
        let p = spectral_curve(&d);
        let g = detect_grid(&p, c(40.0, 40.0), &GridSearch::default(), &Tolerances::default()).unwrap();
        assert!(verify_grid_on_curve(&p, g.poles(), &Tolerances::default()).pass);
    }
}
