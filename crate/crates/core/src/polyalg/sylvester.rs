//! Resultants by evaluation-interpolation: freeze the surviving variable at
//! sample points on a circle, take the numeric Sylvester determinant with
//! the formal degree structure, and recover the coefficients by an inverse
//! DFT. The determinant entries are polynomial in the sample point, so the
//! interpolated values are exact up to rounding even where slice degrees
//! drop.

use super::{BiPoly, UniPoly};
use crate::error::{Error, Result};
use crate::Complex;

/// Resultant eliminating z: a univariate polynomial in w whose roots are
/// the w-values over which P and Q share a z-root. Errors with
/// `SharedFactor` when the resultant vanishes identically.
pub fn resultant_z(p: &BiPoly, q: &BiPoly) -> Result<UniPoly> {
    let m = p.degree_z();
    let n = q.degree_z();
    if p.is_zero() || q.is_zero() || m == 0 && n == 0 {
        return Err(Error::DegenerateCurve {
            reason: "resultant needs a positive degree in the eliminated variable".into(),
        });
    }
    let degree_bound = m * q.degree_w() + n * p.degree_w();
    let samples = degree_bound + 1;
    let radius = 1.0;
    let phase = Complex::from_polar(radius, 0.7310582120);
    let omega = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / samples as f64);
    let mut values = Vec::with_capacity(samples);
    for k in 0..samples {
        let w0 = phase * omega.powu(k as u32);
        let pc = z_coeff_rows(p, w0);
        let qc = z_coeff_rows(q, w0);
        values.push(sylvester_det(&pc, &qc));
    }
    let scale_bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let abs_floor = 1e-12
        * p.scale().max(1.0).powi(n as i32)
        * q.scale().max(1.0).powi(m as i32)
        * factorial((m + n).min(18)) as f64;
    if scale_bound <= abs_floor {
        return Err(Error::SharedFactor);
    }
    // inverse DFT, then undo the radius/phase scaling per coefficient
    let mut coeffs = Vec::with_capacity(samples);
    for j in 0..samples {
        let mut acc = Complex::new(0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            acc += v * omega.powu(((samples - 1) * j * k % samples) as u32);
        }
        acc /= samples as f64;
        coeffs.push(acc / phase.powu(j as u32));
    }
    // clean rounding dust relative to the largest coefficient
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in coeffs.iter_mut() {
        if c.norm() < 1e-10 * top {
            *c = Complex::new(0.0, 0.0);
        }
    }
    Ok(UniPoly::new(coeffs))
}

/// Resultant eliminating w: univariate in z.
pub fn resultant_w(p: &BiPoly, q: &BiPoly) -> Result<UniPoly> {
    resultant_z(&p.swap_vars(), &q.swap_vars())
}

/// Coefficients of P(., w0) as a polynomial in z, at the formal degree.
fn z_coeff_rows(p: &BiPoly, w0: Complex) -> Vec<Complex> {
    p.rows()
        .iter()
        .map(|row| {
            let mut acc = Complex::new(0.0, 0.0);
            for c in row.iter().rev() {
                acc = acc * w0 + c;
            }
            acc
        })
        .collect()
}

/// Determinant of the Sylvester matrix of two coefficient vectors
/// (ascending degree), sized by their formal degrees.
fn sylvester_det(p: &[Complex], q: &[Complex]) -> Complex {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    if size == 0 {
        return Complex::new(1.0, 0.0);
    }
    let mut mat = vec![Complex::new(0.0, 0.0); size * size];
    // n rows of p, descending-degree convention
    for r in 0..n {
        for (k, c) in p.iter().enumerate() {
            mat[r * size + (r + m - k)] = *c;
        }
    }
    for r in 0..m {
        for (k, c) in q.iter().enumerate() {
            mat[(n + r) * size + (r + n - k)] = *c;
        }
    }
    det_lu(&mut mat, size)
}

/// LU determinant with partial pivoting.
fn det_lu(mat: &mut [Complex], n: usize) -> Complex {
    let mut det = Complex::new(1.0, 0.0);
    for col in 0..n {
        let (pivot_row, pivot_norm) = (col..n)
            .map(|r| (r, mat[r * n + col].norm_sqr()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if pivot_norm == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot_row != col {
            for k in 0..n {
                mat.swap(pivot_row * n + k, col * n + k);
            }
            det = -det;
        }
        let pivot = mat[col * n + col];
        det *= pivot;
        for r in col + 1..n {
            let f = mat[r * n + col] / pivot;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = mat[col * n + k];
                mat[r * n + k] -= f * v;
            }
        }
    }
    det
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::roots;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn two_by_two_sylvester_by_hand() {
        // Res_z(z - w, z - 1) = w - 1 up to sign
        let p = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let q = BiPoly::new(vec![vec![c(-1.0, 0.0)], vec![c(1.0, 0.0)]]);
        let r = resultant_z(&p, &q).unwrap();
        assert_eq!(r.degree(), 1);
        let root = -r.coeffs[0] / r.coeffs[1];
        assert!((root - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn critical_values_of_squaring_from_discriminant() {
        // Res_z(z^2 - w, 2z) has the single root w = 0
        let p = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let dz = p.partial_z();
        let r = resultant_z(&p, &dz).unwrap();
        let rts = roots(&r, 1e-12).unwrap();
        assert!(!rts.is_empty());
        for root in rts {
            assert!(root.norm() < 1e-10);
        }
    }

    #[test]
    fn identical_inputs_flag_shared_factor() {
        let p = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(matches!(resultant_w(&p, &p), Err(Error::SharedFactor)));
    }

    /// Brute-force oracle: resultant_z(P, Q)(w0) = 0 iff the slices at w0
    /// share a z-root, on small random instances.
    #[test]
    fn resultant_zero_iff_common_slice_root() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let rnd = |rng: &mut rand_chacha::ChaCha8Rng| {
                c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            };
            // P = (z - a)(z - b) + w * small, Q = (z - a)(z - c) + w^2 * small
            let a = rnd(&mut rng);
            let b = rnd(&mut rng);
            let shared = rng.gen_bool(0.5);
            let p = BiPoly::new(vec![
                vec![a * b, c(0.3, 0.0)],
                vec![-(a + b), c(0.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ]);
            let a2 = if shared { a } else { rnd(&mut rng) };
            let d = rnd(&mut rng);
            let q = BiPoly::new(vec![
                vec![a2 * d, c(0.0, 0.0), c(0.2, 0.0)],
                vec![-(a2 + d), c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            ]);
            let res = resultant_z(&p, &q).unwrap();
            // at w0 = 0 the slices are (z-a)(z-b) and (z-a2)(z-d)
            let v = res.eval(c(0.0, 0.0)).norm();
            let have_common = shared
                || (a - a2).norm() < 1e-9
                || (a - d).norm() < 1e-9
                || (b - a2).norm() < 1e-9
                || (b - d).norm() < 1e-9;
            if have_common {
                assert!(v < 1e-8 * res.scale().max(1.0), "expected zero, got {v}");
            } else {
                assert!(v > 1e-8 * res.scale().max(1.0), "expected nonzero, got {v}");
            }
        }
    }
}
