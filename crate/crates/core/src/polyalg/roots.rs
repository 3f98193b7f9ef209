//! Simultaneous root finding: closed forms for degree <= 2, Aberth-Ehrlich
//! iteration above that, with a companion-matrix Schur fallback. Clustered
//! near-multiple roots are merged to their centroid and reported with
//! multiplicity.

use super::UniPoly;
use crate::error::{Error, Result};
use crate::Complex;

const MAX_ITERATIONS: usize = 120;
const RESTARTS: usize = 3;

/// All roots of `p` with multiplicity, sorted lexicographically by
/// (re, im). Each reported root satisfies `|p(r)| <= tol * scale(p at r)`
/// in the backward-error sense.
pub fn roots(p: &UniPoly, tol: f64) -> Result<Vec<Complex>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = raw_roots(p, tol)?;
    out = cluster_multiples(out, p, tol);
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

fn raw_roots(p: &UniPoly, tol: f64) -> Result<Vec<Complex>> {
    // strip exact zero roots first: they are common in slices and cheap
    let zeros = p.coeffs.iter().take_while(|c| c.norm_sqr() == 0.0).count();
    let stripped = UniPoly::new(p.coeffs[zeros..].to_vec());
    let mut out = vec![Complex::new(0.0, 0.0); zeros];
    out.extend(match stripped.degree() {
        0 => vec![],
        1 => vec![-stripped.coeffs[0] / stripped.coeffs[1]],
        2 => quadratic(&stripped.coeffs),
        _ => aberth_with_fallback(&stripped, tol)?,
    });
    Ok(out)
}

/// Numerically stable complex quadratic formula.
fn quadratic(c: &[Complex]) -> Vec<Complex> {
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign that avoids cancellation in c1 + disc
    let s = if (c1 + disc).norm_sqr() >= (c1 - disc).norm_sqr() {
        disc
    } else {
        -disc
    };
    let q = -0.5 * (c1 + s);
    if q.norm_sqr() == 0.0 {
        // c1 = 0 and c0 = 0
        return vec![Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)];
    }
    vec![q / c2, c0 / q]
}

fn aberth_with_fallback(p: &UniPoly, tol: f64) -> Result<Vec<Complex>> {
    let mut last_residuals = Vec::new();
    for restart in 0..RESTARTS {
        if let Some(rts) = aberth(p, tol, restart) {
            return Ok(rts);
        }
        last_residuals = residuals(p, &initial_guesses(p, restart));
    }
    if let Some(rts) = companion_roots(p, tol) {
        return Ok(rts);
    }
    Err(Error::RootsNoConvergence {
        iterations: RESTARTS * MAX_ITERATIONS,
        residuals: last_residuals,
    })
}

fn residuals(p: &UniPoly, zs: &[Complex]) -> Vec<f64> {
    zs.iter().map(|&z| p.eval(z).norm()).collect()
}

fn initial_guesses(p: &UniPoly, restart: usize) -> Vec<Complex> {
    let n = p.degree();
    let lc = p.coeffs[n].norm();
    // Cauchy bound on root moduli
    let bound = 1.0
        + p.coeffs[..n]
            .iter()
            .map(|c| c.norm() / lc)
            .fold(0.0, f64::max);
    let radius = bound.min(1e8) * (1.0 + 0.35 * restart as f64);
    let phase = 0.4 + 1.3 * restart as f64;
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + phase / n as f64;
            Complex::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect()
}

fn aberth(p: &UniPoly, tol: f64, restart: usize) -> Option<Vec<Complex>> {
    let n = p.degree();
    let dp = p.derivative();
    let mut zs = initial_guesses(p, restart);
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        let snapshot = zs.clone();
        for k in 0..n {
            let z = snapshot[k];
            let pv = p.eval(z);
            if !pv.is_finite() {
                return None;
            }
            let dv = dp.eval(z);
            let newton = if dv.norm_sqr() == 0.0 {
                // nudge off an exact critical point
                Complex::new(tol.max(1e-14), tol.max(1e-14))
            } else {
                pv / dv
            };
            let mut repulsion = Complex::new(0.0, 0.0);
            for (j, &other) in snapshot.iter().enumerate() {
                if j != k {
                    let d = z - other;
                    if d.norm_sqr() == 0.0 {
                        return None;
                    }
                    repulsion += d.inv();
                }
            }
            let denom = Complex::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm_sqr() == 0.0 {
                newton
            } else {
                newton / denom
            };
            zs[k] = z - step;
            if !zs[k].is_finite() {
                return None;
            }
            max_step = max_step.max(step.norm() / (1.0 + zs[k].norm()));
        }
        if max_step <= tol * 0.01 {
            break;
        }
    }
    accept(p, zs, tol)
}

/// Backward-error acceptance: every iterate must be a root of a polynomial
/// with relatively perturbed coefficients.
fn accept(p: &UniPoly, zs: Vec<Complex>, tol: f64) -> Option<Vec<Complex>> {
    let ok = zs.iter().all(|&z| {
        let res = p.eval(z).norm();
        res <= tol.max(1e-13) * p.eval_scale(z).max(f64::MIN_POSITIVE) * 64.0
    });
    ok.then_some(zs)
}

fn companion_roots(p: &UniPoly, tol: f64) -> Option<Vec<Complex>> {
    let n = p.degree();
    let lc = p.coeffs[n];
    let mut m = nalgebra::DMatrix::<Complex>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lc;
    }
    let (_, t) = m.schur().unpack();
    let mut zs: Vec<Complex> = (0..n).map(|i| t[(i, i)]).collect();
    // polish with a few Newton steps
    let dp = p.derivative();
    for z in zs.iter_mut() {
        for _ in 0..4 {
            let dv = dp.eval(*z);
            if dv.norm_sqr() == 0.0 {
                break;
            }
            *z -= p.eval(*z) / dv;
        }
    }
    accept(p, zs, tol)
}

/// Merge root clusters that floating point split apart. The merge radius is
/// adaptive in the candidate multiplicity m: a perturbation of size tol
/// moves an m-fold root by about tol^(1/m).
fn cluster_multiples(mut zs: Vec<Complex>, p: &UniPoly, tol: f64) -> Vec<Complex> {
    let n = zs.len();
    if n < 2 {
        return zs;
    }
    zs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut clusters: Vec<Vec<Complex>> = zs.into_iter().map(|z| vec![z]).collect();
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (ci, cj) = (centroid(&clusters[i]), centroid(&clusters[j]));
                let m = clusters[i].len() + clusters[j].len();
                let local = 1.0 + ci.norm().max(cj.norm());
                let radius = (1e4 * tol.max(1e-14)).powf(1.0 / m as f64) * local;
                if (ci - cj).norm() <= radius {
                    let away = clusters.swap_remove(j);
                    clusters[i].extend(away);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut out = Vec::with_capacity(n);
    for cluster in clusters {
        let m = cluster.len();
        let c = centroid(&cluster);
        // only collapse when the centroid is consistent with an m-fold root
        let collapse = m > 1 && p.eval(c).norm() <= 1e-7 * p.eval_scale(c).max(f64::MIN_POSITIVE);
        for z in cluster {
            out.push(if collapse { c } else { z });
        }
    }
    out
}

fn centroid(zs: &[Complex]) -> Complex {
    zs.iter().sum::<Complex>() / zs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn simple_quadratics() {
        // w^2 - 1
        let r = roots(&UniPoly::from_reals(&[-1.0, 0.0, 1.0]), 1e-12).unwrap();
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
        // w^2: double root at 0
        let r = roots(&UniPoly::from_reals(&[0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].norm() < 1e-12 && r[1].norm() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = roots(&UniPoly::from_reals(&[-1.0, 0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.len(), 3);
        for root in &r {
            assert!((root.powu(3) - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(matches!(
            roots(&UniPoly::zero(), 1e-12),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn near_double_roots_cluster() {
        // (w - 1)^2 (w + 2), perturbed at 1e-13 scale
        let p = UniPoly::new(vec![c(2.0 + 1e-13, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 3);
        let near_one: Vec<_> = r.iter().filter(|z| (*z - c(1.0, 0.0)).norm() < 1e-3).collect();
        assert_eq!(near_one.len(), 2);
        assert_eq!(near_one[0], near_one[1]);
    }

    #[test]
    fn wilkinson_style_degree_8() {
        let exact: Vec<Complex> = (1..=8).map(|k| c(k as f64 / 4.0, 0.0)).collect();
        let p = UniPoly::from_roots(&exact);
        let got = roots(&p, 1e-12).unwrap();
        for (g, e) in got.iter().zip(exact.iter()) {
            assert!((g - e).norm() < 1e-7, "{g} vs {e}");
        }
    }

    proptest! {
        /// Reconstruction: lc * prod (w - r_i) matches the input
        /// coefficient-wise at relative 1e-8, degree <= 12.
        #[test]
        fn roots_reconstruct_polynomial(
            coeffs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..13)
        ) {
            let p = UniPoly::new(coeffs.iter().map(|&(re, im)| c(re, im)).collect());
            prop_assume!(!p.is_zero() && p.degree() >= 2);
            prop_assume!(p.coeffs.last().unwrap().norm() > 0.05);
            prop_assume!(p.coeffs[0].norm() > 0.05);
            let rts = roots(&p, 1e-12).unwrap();
            let rebuilt = UniPoly::from_roots(&rts);
            let lc = *p.coeffs.last().unwrap();
            let s = p.scale();
            for (a, b) in rebuilt.coeffs.iter().zip(p.coeffs.iter()) {
                prop_assert!((a * lc - b).norm() <= 1e-8 * s);
            }
        }
    }
}
