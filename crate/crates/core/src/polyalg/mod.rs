//! Univariate and bivariate polynomial arithmetic over complex doubles:
//! evaluation, slicing, root solving, partial derivatives, exact division,
//! and resultants by evaluation-interpolation.

mod roots;
mod sylvester;

pub use roots::roots;
pub use sylvester::{resultant_w, resultant_z};

use crate::error::{Error, Result};
use crate::Complex;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};

/// Coefficients below `TRIM_REL * max|c|` are treated as zero when
/// normalizing degrees.
const TRIM_REL: f64 = 1e-12;

/// Univariate polynomial, coefficients in ascending degree. The zero
/// polynomial is the empty list.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<Complex>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_reals(coeffs: &[f64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop trailing coefficients that are negligible relative to the
    /// largest one.
    fn trim(&mut self) {
        let s = self.scale();
        if s == 0.0 {
            self.coeffs.clear();
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= TRIM_REL * s {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.iter().all(|c| c.norm() == 0.0) {
            self.coeffs.clear();
        }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Sum of |c_i| |z|^i: the natural backward-error scale at `z`.
    pub fn eval_scale(&self, z: Complex) -> f64 {
        let r = z.norm();
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * (i as f64 + 1.0))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn add_scaled(&self, other: &UniPoly, k: Complex) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += k * c;
        }
        UniPoly::new(out)
    }

    /// Monic polynomial with the given roots (for tests and oracles).
    pub fn from_roots(roots: &[Complex]) -> UniPoly {
        let mut p = UniPoly::new(vec![Complex::new(1.0, 0.0)]);
        for &r in roots {
            p = p.mul(&UniPoly::new(vec![-r, Complex::new(1.0, 0.0)]));
        }
        p
    }
}

/// Bivariate polynomial `sum c[i][j] z^i w^j` with a tight coefficient grid:
/// some entry in the top row and in the last column is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    /// Row-major in z-degree: `coeffs[i][j]` multiplies `z^i w^j`.
    coeffs: Vec<Vec<Complex>>,
}

impl BiPoly {
    pub fn new(coeffs: Vec<Vec<Complex>>) -> Self {
        let mut p = BiPoly { coeffs };
        p.tighten();
        p
    }

    pub fn zero() -> Self {
        BiPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Constant-or-monomial helper: `k z^i w^j`.
    pub fn monomial(k: Complex, i: usize, j: usize) -> Self {
        let mut grid = vec![vec![Complex::new(0.0, 0.0); j + 1]; i + 1];
        grid[i][j] = k;
        BiPoly::new(grid)
    }

    pub fn degree_z(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_w(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or(Complex::new(0.0, 0.0))
    }

    pub fn rows(&self) -> &[Vec<Complex>] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Remove negligible top rows / last columns so both degrees are tight.
    fn tighten(&mut self) {
        let s = self.scale();
        if s == 0.0 {
            self.coeffs.clear();
            return;
        }
        let keep = |c: &Complex| c.norm() > TRIM_REL * s;
        // rectangularize first
        let w = self.coeffs.iter().map(|r| r.len()).max().unwrap_or(0);
        for row in &mut self.coeffs {
            row.resize(w, Complex::new(0.0, 0.0));
        }
        while self
            .coeffs
            .last()
            .is_some_and(|row| !row.iter().any(keep))
        {
            self.coeffs.pop();
        }
        while !self.coeffs.is_empty()
            && self.coeffs[0].len() > 0
            && !self.coeffs.iter().any(|row| keep(row.last().unwrap()))
        {
            for row in &mut self.coeffs {
                row.pop();
            }
        }
        if self.coeffs.iter().flatten().count() == 0 {
            self.coeffs.clear();
        }
    }

    pub fn eval(&self, z: Complex, w: Complex) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        for row in self.coeffs.iter().rev() {
            let mut rowv = Complex::new(0.0, 0.0);
            for c in row.iter().rev() {
                rowv = rowv * w + c;
            }
            acc = acc * z + rowv;
        }
        acc
    }

    /// Sum of |c_ij| |z|^i |w|^j, the backward-error scale at (z, w).
    pub fn eval_scale(&self, z: Complex, w: Complex) -> f64 {
        let (rz, rw) = (z.norm(), w.norm());
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let mut rowv = 0.0;
            for c in row.iter().rev() {
                rowv = rowv * rw + c.norm();
            }
            acc = acc * rz + rowv;
        }
        acc
    }

    /// Freeze `z = z0`: univariate polynomial in `w`. Vanished leading
    /// coefficients (degree drop) are trimmed by `UniPoly::new`; callers
    /// read the drop off `degree_w() - slice.degree()`.
    pub fn slice_w(&self, z0: Complex) -> UniPoly {
        let dw = self.degree_w();
        let mut out = vec![Complex::new(0.0, 0.0); dw + 1];
        for (j, out_j) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(0.0, 0.0);
            for row in self.coeffs.iter().rev() {
                acc = acc * z0 + row[j];
            }
            *out_j = acc;
        }
        UniPoly::new(out)
    }

    /// Freeze `w = w0`: univariate polynomial in `z`.
    pub fn slice_z(&self, w0: Complex) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|row| {
                    let mut acc = Complex::new(0.0, 0.0);
                    for c in row.iter().rev() {
                        acc = acc * w0 + c;
                    }
                    acc
                })
                .collect(),
        )
    }

    pub fn partial_z(&self) -> BiPoly {
        if self.coeffs.len() <= 1 {
            return BiPoly::zero();
        }
        BiPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|c| c * (i as f64 + 1.0)).collect())
                .collect(),
        )
    }

    pub fn partial_w(&self) -> BiPoly {
        BiPoly::new(
            self.coeffs
                .iter()
                .map(|row| {
                    if row.len() <= 1 {
                        vec![]
                    } else {
                        row[1..]
                            .iter()
                            .enumerate()
                            .map(|(j, c)| c * (j as f64 + 1.0))
                            .collect()
                    }
                })
                .collect(),
        )
    }

    /// `z^dz P(1/z, w)`: row reversal. Sends behavior at z = inf to z = 0.
    pub fn flip_z(&self) -> BiPoly {
        let mut rows = self.coeffs.clone();
        rows.reverse();
        BiPoly::new(rows)
    }

    /// `w^dw P(z, 1/w)`: column reversal.
    pub fn flip_w(&self) -> BiPoly {
        BiPoly::new(
            self.coeffs
                .iter()
                .map(|row| {
                    let mut r = row.clone();
                    r.reverse();
                    r
                })
                .collect(),
        )
    }

    /// Swap the roles of z and w (grid transpose).
    pub fn swap_vars(&self) -> BiPoly {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let (dz, dw) = (self.degree_z(), self.degree_w());
        let mut grid = vec![vec![Complex::new(0.0, 0.0); dz + 1]; dw + 1];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                grid[j][i] = *c;
            }
        }
        BiPoly::new(grid)
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero();
        }
        let mut grid =
            vec![
                vec![Complex::new(0.0, 0.0); self.degree_w() + other.degree_w() + 1];
                self.degree_z() + other.degree_z() + 1
            ];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for (k, orow) in other.coeffs.iter().enumerate() {
                    for (l, b) in orow.iter().enumerate() {
                        grid[i + k][j + l] += a * b;
                    }
                }
            }
        }
        BiPoly::new(grid)
    }

    pub fn add_scaled(&self, other: &BiPoly, k: Complex) -> BiPoly {
        let dz = self.degree_z().max(other.degree_z());
        let dw = self.degree_w().max(other.degree_w());
        let mut grid = vec![vec![Complex::new(0.0, 0.0); dw + 1]; dz + 1];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                grid[i][j] += c;
            }
        }
        for (i, row) in other.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                grid[i][j] += k * c;
            }
        }
        BiPoly::new(grid)
    }

    pub fn scale_by(&self, k: Complex) -> BiPoly {
        BiPoly::new(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|c| c * k).collect())
                .collect(),
        )
    }

    /// Leading w-coefficient as a polynomial in z (column `degree_w`).
    pub fn leading_w_coeff(&self) -> UniPoly {
        let j = self.degree_w();
        UniPoly::new(self.coeffs.iter().map(|row| row[j]).collect())
    }

    /// Try to divide by the univariate factor `q(z)`; `Some` only when every
    /// w-column divides with negligible remainder.
    pub fn divide_z_content(&self, q: &UniPoly) -> Option<BiPoly> {
        if q.is_zero() || q.degree() == 0 || self.is_zero() {
            return None;
        }
        let dw = self.degree_w();
        let tol = 1e-10 * self.scale().max(1e-300);
        let mut cols = Vec::with_capacity(dw + 1);
        for j in 0..=dw {
            let col = UniPoly::new(self.coeffs.iter().map(|row| row[j]).collect());
            let (quot, rem) = uni_div_rem(&col, q);
            if rem.scale() > tol {
                return None;
            }
            cols.push(quot);
        }
        let new_dz = cols.iter().map(|c| c.coeffs.len()).max()?.saturating_sub(1);
        let mut grid = vec![vec![Complex::new(0.0, 0.0); dw + 1]; new_dz + 1];
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.coeffs.iter().enumerate() {
                grid[i][j] = *c;
            }
        }
        Some(BiPoly::new(grid))
    }

    /// Same for a univariate factor `q(w)`.
    pub fn divide_w_content(&self, q: &UniPoly) -> Option<BiPoly> {
        self.swap_vars().divide_z_content(q).map(|p| p.swap_vars())
    }
}

/// Univariate division with remainder.
pub fn uni_div_rem(num: &UniPoly, den: &UniPoly) -> (UniPoly, UniPoly) {
    assert!(!den.is_zero());
    if num.degree() < den.degree() || num.is_zero() {
        return (UniPoly::zero(), num.clone());
    }
    let mut rem = num.coeffs.clone();
    let dn = num.degree();
    let dd = den.degree();
    let lc = *den.coeffs.last().unwrap();
    let mut quot = vec![Complex::new(0.0, 0.0); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let q = rem[k + dd] / lc;
        quot[k] = q;
        for (i, c) in den.coeffs.iter().enumerate() {
            rem[k + i] -= q * c;
        }
    }
    rem.truncate(dd);
    (UniPoly::new(quot), UniPoly::new(rem))
}

/// Divide `N(u, w)` by `(w - u)` exactly. The z-slot of the grid plays the
/// role of `u`. Fails when the remainder `N(u, u)` is not negligible.
pub fn divide_exact_w_minus_u(n: &BiPoly) -> Result<BiPoly> {
    let tolerance = 1e-10 * n.scale().max(1e-300);
    let dw = n.degree_w();
    if dw == 0 {
        return Err(Error::NotDivisible {
            remainder_norm: n.scale(),
            tolerance,
        });
    }
    // treat N as a polynomial in w with UniPoly (in u) coefficients and run
    // synthetic division by (w - u): B_{k-1} = A_k + u * B_k
    let col = |j: usize| UniPoly::new(n.rows().iter().map(|row| row[j]).collect());
    let shift_up = |p: &UniPoly| {
        // multiply by u
        let mut c = vec![Complex::new(0.0, 0.0)];
        c.extend_from_slice(&p.coeffs);
        UniPoly::new(c)
    };
    let mut b = vec![UniPoly::zero(); dw];
    b[dw - 1] = col(dw);
    for k in (1..dw).rev() {
        b[k - 1] = col(k).add_scaled(&shift_up(&b[k]), Complex::new(1.0, 0.0));
    }
    let remainder = col(0).add_scaled(&shift_up(&b[0]), Complex::new(1.0, 0.0));
    let remainder_norm = remainder.scale();
    if remainder_norm > tolerance {
        return Err(Error::NotDivisible {
            remainder_norm,
            tolerance,
        });
    }
    let du = b.iter().map(|p| p.coeffs.len()).max().unwrap_or(1).max(1) - 1;
    let mut grid = vec![vec![Complex::new(0.0, 0.0); dw]; du + 1];
    for (j, p) in b.iter().enumerate() {
        for (i, c) in p.coeffs.iter().enumerate() {
            grid[i][j] = *c;
        }
    }
    Ok(BiPoly::new(grid))
}

/// Count repeated w-roots at seeded sample slices. A consistently positive
/// count signals a repeated irreducible factor.
pub fn repeated_factor_degree(p: &BiPoly, samples: usize) -> Result<usize> {
    let mut counts = Vec::with_capacity(samples);
    for k in 0..samples {
        // deterministic, irrational-angle sample points away from 0
        let t = 2.399963229728653 * (k as f64 + 1.0);
        let z0 = Complex::new(1.1 * t.cos(), 1.1 * t.sin());
        let slice = p.slice_w(z0);
        if slice.is_zero() || slice.degree() == 0 {
            counts.push(0);
            continue;
        }
        let rts = roots(&slice, 1e-12)?;
        counts.push(count_repeats(&rts));
    }
    Ok(counts.into_iter().min().unwrap_or(0))
}

fn count_repeats(roots: &[Complex]) -> usize {
    let mut repeats = 0;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut seen: Vec<(Complex, bool)> = Vec::new();
    for &r in roots {
        if let Some(entry) = seen
            .iter_mut()
            .find(|(s, _)| (*s - r).norm() < 1e-5 * scale)
        {
            entry.1 = true;
            repeats += 1;
        } else {
            seen.push((r, false));
        }
    }
    repeats
}

/// Square-free part via slice interpolation: at enough z-samples, replace
/// the slice by its distinct-root polynomial scaled by the leading
/// w-coefficient, then interpolate columns back. Returns the reduced
/// polynomial and the degree that was removed.
pub fn square_free_part(p: &BiPoly) -> Result<(BiPoly, usize)> {
    let removed = repeated_factor_degree(p, 5)?;
    if removed == 0 {
        return Ok((p.clone(), 0));
    }
    let dz = p.degree_z();
    let dw = p.degree_w();
    let new_dw = dw - removed;
    // coefficients of lc(z) * prod_(distinct roots)(w - r) have z-degree at
    // most dz + dz = 2 dz (lc has degree <= dz, the monic part is a ratio of
    // polynomials of degree <= dz); sample generously
    let n_samples = 2 * dz + 1;
    let mut values: Vec<Vec<Complex>> = vec![Vec::with_capacity(n_samples); new_dw + 1];
    let mut zs = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / n_samples as f64;
        let z0 = Complex::new(1.21 * t.cos(), 1.21 * t.sin());
        let slice = p.slice_w(z0);
        if slice.degree() != dw {
            return Err(Error::DegenerateCurve {
                reason: "degree drop at a square-free interpolation sample".into(),
            });
        }
        let rts = roots(&slice, 1e-12)?;
        let distinct = cluster_distinct_polished(&rts, &slice);
        if distinct.len() != new_dw {
            return Err(Error::DegenerateCurve {
                reason: "inconsistent repeated-root structure across slices".into(),
            });
        }
        let lc = *slice.coeffs.last().unwrap();
        let sf = UniPoly::from_roots(&distinct);
        for (j, v) in values.iter_mut().enumerate() {
            v.push(lc * sf.coeffs.get(j).copied().unwrap_or(Complex::new(0.0, 0.0)));
        }
        zs.push(z0);
    }
    // Lagrange interpolation per w-column
    let mut grid = vec![vec![Complex::new(0.0, 0.0); new_dw + 1]; n_samples];
    for (j, vals) in values.iter().enumerate() {
        let col = lagrange_interpolate(&zs, vals);
        for (i, c) in col.coeffs.iter().enumerate() {
            grid[i][j] = *c;
        }
    }
    Ok((BiPoly::new(grid), removed))
}

/// Distinct roots of `slice`, each polished on the derivative matching its
/// multiplicity: an m-fold root of p is a simple root of p^(m-1), where
/// Newton restores full accuracy.
fn cluster_distinct_polished(roots: &[Complex], slice: &UniPoly) -> Vec<Complex> {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<(Complex, usize)> = Vec::new();
    for &r in roots {
        if let Some(entry) = clusters
            .iter_mut()
            .find(|(s, _)| (*s - r).norm() < 1e-5 * scale)
        {
            entry.1 += 1;
        } else {
            clusters.push((r, 1));
        }
    }
    clusters
        .into_iter()
        .map(|(root, multiplicity)| {
            let mut q = slice.clone();
            for _ in 1..multiplicity {
                q = q.derivative();
            }
            let dq = q.derivative();
            let mut z = root;
            for _ in 0..6 {
                let d = dq.eval(z);
                if d.norm_sqr() == 0.0 {
                    break;
                }
                z -= q.eval(z) / d;
            }
            z
        })
        .collect()
}

fn lagrange_interpolate(xs: &[Complex], ys: &[Complex]) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, &xi) in xs.iter().enumerate() {
        let mut li = UniPoly::new(vec![Complex::new(1.0, 0.0)]);
        let mut denom = Complex::new(1.0, 0.0);
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                li = li.mul(&UniPoly::new(vec![-xj, Complex::new(1.0, 0.0)]));
                denom *= xi - xj;
            }
        }
        acc = acc.add_scaled(&li, ys[i] / denom);
    }
    acc
}

impl Serialize for BiPoly {
    /// `{ "dz": int, "dw": int, "coeffs": [[[re, im], ...]] }` row-major in
    /// z-degree.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Row<'a>(&'a [Complex]);
        impl Serialize for Row<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for c in self.0 {
                    seq.serialize_element(&[c.re, c.im])?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("BiPoly", 3)?;
        st.serialize_field("dz", &self.degree_z())?;
        st.serialize_field("dw", &self.degree_w())?;
        st.serialize_field(
            "coeffs",
            &self.coeffs.iter().map(|r| Row(r)).collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[allow(dead_code)]
            dz: usize,
            #[allow(dead_code)]
            dw: usize,
            coeffs: Vec<Vec<[f64; 2]>>,
        }
        let r = Repr::deserialize(d)?;
        Ok(BiPoly::new(
            r.coeffs
                .into_iter()
                .map(|row| row.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
                .collect(),
        ))
    }
}
