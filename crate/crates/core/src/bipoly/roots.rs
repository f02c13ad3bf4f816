//! Polynomial roots through the eigenvalues of the companion matrix.

use nalgebra::DMatrix;

use crate::error::{JnrError, Result};
use crate::tolerance::TAU_CLUSTER;
use crate::Complex;

use super::UniPoly;

/// Radius inside which eigenvalues are treated as one perturbed multiple root.
const GROUP_RADIUS: f64 = 1e-3;

/// All complex roots of `q`, with multiplicity.
///
/// Eigenvalues of the (monic) companion matrix are polished with Newton
/// steps. Clusters that are numerically a single multiple root collapse
/// onto one value refined on the appropriate derivative.
pub fn roots(q: &UniPoly) -> Result<Vec<Complex>> {
    let d = match q.degree() {
        None => return Err(JnrError::ZeroPolynomial),
        Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let lead = q.leading().expect("nonzero");
    if d == 1 {
        return Ok(vec![-q.coeff(0) / lead]);
    }
    let mut companion = DMatrix::<Complex>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..d {
        companion[(i, d - 1)] = -q.coeff(i) / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or(JnrError::ZeroPolynomial)?;
    let mut rs: Vec<Complex> = schur.unpack().1.diagonal().iter().copied().collect();

    let dq = q.derivative();
    for r in rs.iter_mut() {
        *r = polish(q, &dq, *r);
    }
    Ok(collapse_clusters(q, rs))
}

fn polish(q: &UniPoly, dq: &UniPoly, mut r: Complex) -> Complex {
    let mut best = q.eval(r).norm();
    for _ in 0..4 {
        let d = dq.eval(r);
        if d.norm() == 0.0 {
            break;
        }
        let next = r - q.eval(r) / d;
        let res = q.eval(next).norm();
        if !(res < best) {
            break;
        }
        best = res;
        r = next;
    }
    r
}

fn collapse_clusters(q: &UniPoly, rs: Vec<Complex>) -> Vec<Complex> {
    let scale = q.max_abs();
    let residual = |z: Complex| q.eval(z).norm() / scale;
    let mut used = vec![false; rs.len()];
    let mut out = Vec::with_capacity(rs.len());
    for i in 0..rs.len() {
        if used[i] {
            continue;
        }
        let radius = GROUP_RADIUS * (1.0 + rs[i].norm());
        let members: Vec<usize> = (i..rs.len())
            .filter(|&j| !used[j] && (rs[j] - rs[i]).norm() < radius)
            .collect();
        let spread = members
            .iter()
            .map(|&j| (rs[j] - rs[i]).norm())
            .fold(0.0, f64::max);
        if members.len() == 1 || spread < TAU_CLUSTER * 1e-3 {
            for &j in &members {
                used[j] = true;
                out.push(rs[j]);
            }
            continue;
        }
        let m = members.len();
        let centroid = members.iter().map(|&j| rs[j]).sum::<Complex>() / m as f64;
        // an m-fold root is a simple root of the (m-1)th derivative
        let mut deriv = q.clone();
        for _ in 0..m - 1 {
            deriv = deriv.derivative();
        }
        let refined = polish(&deriv, &deriv.derivative(), centroid);
        let worst_member = members.iter().map(|&j| residual(rs[j])).fold(0.0, f64::max);
        let collapsed_ok = residual(refined) <= worst_member.max(1e-14)
            && members.iter().all(|&j| (rs[j] - refined).norm() < radius);
        for &j in &members {
            used[j] = true;
            out.push(if collapsed_ok { refined } else { rs[j] });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::TAU_ROOT;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn sorted(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn z_squared_minus_one() {
        let q = UniPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted(roots(&q).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn linear_z() {
        let q = UniPoly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(roots(&q).unwrap(), vec![c(0.0, 0.0)]);
    }

    #[test]
    fn triple_root_clusters() {
        let r0 = c(1.0, 1.0);
        let q = UniPoly::from_roots(&[r0, r0, r0], c(1.0, 0.0));
        let r = roots(&q).unwrap();
        assert_eq!(r.len(), 3);
        for x in r {
            assert!((x - r0).norm() < TAU_CLUSTER, "{x}");
        }
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(roots(&UniPoly::zero()), Err(JnrError::ZeroPolynomial));
    }

    #[test]
    fn residuals_small_for_random_degree_eight() {
        let q = UniPoly::new((0..9).map(|k| c((k as f64 * 1.3).sin(), (k as f64 * 0.7).cos())).collect());
        let r = roots(&q).unwrap();
        assert_eq!(r.len(), 8);
        for x in r {
            assert!(q.eval(x).norm() < TAU_ROOT * q.max_abs());
        }
    }
}
