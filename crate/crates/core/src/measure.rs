//! Atomic approximations of conformal measures and their diagnostics:
//! conformality residuals over chordal disks, mass near parabolic points,
//! petal order fits, and the Dirac-mass conformality check.
//!
//! The measure places an atom at every branch image `f_{n,j}(x)` with mass
//! proportional to `|Df_{n,j}(x)|^s`. Atoms are stored level-contiguously
//! in complete-tree order, so the parent of atom `k` at level `n` is atom
//! `k / d_w` at level `n - 1` without storing links.

use crate::correspondence::{cmp_points, Correspondence, INDIFFERENT_BAND};
use crate::error::{Error, Result};
use crate::numeric::{linear_fit, pairwise_sum};
use crate::orbits::{expand_visit, ExpandMode};
use crate::sphere::{chordal_distance, SpherePoint};
use crate::Complex;
use serde::ser::SerializeSeq;
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct Atom {
    pub point: SpherePoint,
    pub mass: f64,
}

/// Chordal disk region.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereDisk {
    pub center: SpherePoint,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct AtomicMeasure {
    pub s: f64,
    pub depth: usize,
    pub basepoint: SpherePoint,
    /// Branch count per node; fixes the complete-tree indexing.
    pub dw: usize,
    /// Level-contiguous atoms; level n starts at `level_offset(n)`.
    pub atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn level_offset(&self, level: usize) -> usize {
        if self.dw == 1 {
            level
        } else {
            (self.dw.pow(level as u32) - 1) / (self.dw - 1)
        }
    }

    pub fn level_of(&self, index: usize) -> usize {
        let mut level = 0;
        while self.level_offset(level + 1) <= index {
            level += 1;
        }
        level
    }

    pub fn total_mass(&self) -> f64 {
        let masses: Vec<f64> = self.atoms.iter().map(|a| a.mass).collect();
        pairwise_sum(&masses)
    }

    /// Indices of the children of atom `index` at `level` (empty at the
    /// deepest level).
    pub fn children(&self, level: usize, index: usize) -> std::ops::Range<usize> {
        if level >= self.depth {
            return 0..0;
        }
        let local = index - self.level_offset(level);
        let base = self.level_offset(level + 1) + local * self.dw;
        base..base + self.dw
    }

    /// Mass within the chordal ball of `radius` around `omega`.
    pub fn mass_near(&self, omega: &SpherePoint, radius: f64) -> f64 {
        let terms: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| chordal_distance(&a.point, omega) <= radius)
            .map(|a| a.mass)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Build the atomic measure at exponent `s` from the exact expansion to
/// `depth`: atoms at all branch images, masses normalized to 1.
pub fn patterson_sullivan(
    c: &Correspondence,
    x: &SpherePoint,
    s: f64,
    depth: usize,
    budget: f64,
) -> Result<AtomicMeasure> {
    if s <= 0.0 {
        return Err(Error::invalid(
            "patterson_sullivan",
            "exponent s must be positive",
        ));
    }
    let mut atoms: Vec<Atom> = Vec::new();
    let mut level_sums: Vec<f64> = Vec::new();
    expand_visit(c, x, depth, ExpandMode::Exact { budget }, |level| {
        let start = atoms.len();
        for node in &level.nodes {
            let raw = (s * node.log_weight).exp();
            if !raw.is_finite() {
                return Err(Error::NonFiniteWeight { level: level.depth });
            }
            atoms.push(Atom {
                point: node.point,
                mass: raw,
            });
        }
        let masses: Vec<f64> = atoms[start..].iter().map(|a| a.mass).collect();
        level_sums.push(pairwise_sum(&masses));
        Ok(())
    })?;
    let total = pairwise_sum(&level_sums);
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    for atom in atoms.iter_mut() {
        atom.mass /= total;
    }
    Ok(AtomicMeasure {
        s,
        depth,
        basepoint: *x,
        dw: c.degree_w(),
        atoms,
    })
}

/// A branch of `F` selected over a disk: value and complex derivative at
/// the center, validated by continuation along the boundary.
#[derive(Clone, Debug)]
pub struct DiskBranch {
    pub disk: SphereDisk,
    pub index: usize,
    pub w_center: SpherePoint,
    center: Complex,
    lambda: Complex,
}

impl DiskBranch {
    /// Select branch `index` (in the deterministic root order at the
    /// center) and validate that it stays single-valued over the disk:
    /// the disk must avoid the singular z-set, and along the boundary the
    /// prediction from the center germ must match continuation and stay
    /// clearly separated from the other branches.
    pub fn new(c: &Correspondence, disk: SphereDisk, index: usize) -> Result<Self> {
        let center = disk.center.to_complex().ok_or_else(|| Error::NoValidBranch {
            reason: "disk center at infinity is not supported".into(),
        })?;
        let images = c.forward(&disk.center)?;
        if index >= images.len() {
            return Err(Error::NoValidBranch {
                reason: format!("branch index {index} out of range"),
            });
        }
        let w_center = images[index];
        if w_center.is_infinity() {
            return Err(Error::NoValidBranch {
                reason: "branch value at the center is infinite".into(),
            });
        }
        // the branch structure over the disk degenerates at singular
        // points and backward critical values
        let mut obstructions = c.singular_points()?;
        obstructions.extend(c.critical_values_backward()?);
        for p in &obstructions {
            if chordal_distance(p, &disk.center) <= disk.radius {
                return Err(Error::NoValidBranch {
                    reason: format!("disk contains the singular/critical point {p}"),
                });
            }
        }
        let lambda = c.complex_multiplier(&disk.center, &w_center)?;
        let branch = DiskBranch {
            disk,
            index,
            w_center,
            center,
            lambda,
        };
        // boundary validation: prediction vs continuation at 16 samples
        let r_eucl = branch.euclidean_radius();
        for k in 0..16 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let z = SpherePoint::finite(center + Complex::from_polar(r_eucl, t));
            let via_continuation = c.continue_branch(&disk.center, &w_center, &z)?;
            let images = c.forward(&z)?;
            let picked = branch.pick(&images, z.to_complex().unwrap())?;
            if chordal_distance(&images[picked], &via_continuation) > 1e-6 {
                return Err(Error::NoValidBranch {
                    reason: "prediction and continuation disagree on the boundary".into(),
                });
            }
        }
        Ok(branch)
    }

    /// Euclidean radius matching the chordal disk radius at the center.
    fn euclidean_radius(&self) -> f64 {
        self.disk.radius * (1.0 + self.center.norm_sqr()) / 2.0
    }

    /// Predicted branch value by the first-order germ at the center.
    fn predict(&self, z: Complex) -> Complex {
        self.w_center.to_complex().unwrap() + self.lambda * (z - self.center)
    }

    /// Pick the branch image among `images` at `z`: nearest to the
    /// prediction, requiring clear separation from the runner-up.
    pub fn pick(&self, images: &[SpherePoint], z: Complex) -> Result<usize> {
        let p = SpherePoint::finite(self.predict(z));
        let mut best = (f64::INFINITY, 0usize);
        let mut second = f64::INFINITY;
        for (i, w) in images.iter().enumerate() {
            let d = chordal_distance(w, &p);
            if d < best.0 {
                second = best.0;
                best = (d, i);
            } else if d < second {
                second = d;
            }
        }
        if images.len() > 1 && best.0 > 0.35 * second {
            return Err(Error::NoValidBranch {
                reason: format!("branches not separated at z = {z}"),
            });
        }
        Ok(best.1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConformalityReport {
    pub disk: SphereDisk,
    pub branch: usize,
    pub delta: f64,
    /// Mass of atoms in f(A) reachable by the branch from atoms in A.
    pub lhs: f64,
    /// Sum over atoms in A of mass times |Df|^delta.
    pub rhs: f64,
    pub rel_residual: f64,
    pub atoms_in_region: usize,
    /// Atoms in A whose branch child could not be identified.
    pub unmatched_children: usize,
    /// rhs contribution of deepest-level atoms, which have no image atoms;
    /// this is the truncation part of the residual.
    pub truncated_tail_mass: f64,
    /// The true limit set is replaced by the atom support when checking
    /// the special-pair condition: image atoms are required to come from
    /// atoms inside A.
    pub note: &'static str,
}

const FLOOR: f64 = 1e-12;

/// Conformality residual of the measure against `|Df|^delta` over one
/// disk and branch: compares the atom mass of `f(A)` with the integral of
/// `|Df|^delta` over `A`.
pub fn conformality_residual(
    m: &AtomicMeasure,
    c: &Correspondence,
    disk: SphereDisk,
    branch_index: usize,
    delta: f64,
) -> Result<ConformalityReport> {
    let branch = DiskBranch::new(c, disk, branch_index)?;
    let mut lhs_terms: Vec<f64> = Vec::new();
    let mut rhs_terms: Vec<f64> = Vec::new();
    let mut tail_terms: Vec<f64> = Vec::new();
    let mut atoms_in_region = 0usize;
    let mut unmatched = 0usize;
    let mut level = 0usize;
    let mut next_offset = m.level_offset(1);
    for (k, atom) in m.atoms.iter().enumerate() {
        if k >= next_offset {
            level += 1;
            next_offset = m.level_offset(level + 1);
        }
        if chordal_distance(&atom.point, &disk.center) > disk.radius {
            continue;
        }
        let Some(z) = atom.point.to_complex() else {
            continue;
        };
        atoms_in_region += 1;
        if level < m.depth {
            // the children of this atom are exactly its forward images:
            // match the branch child by the center-germ prediction
            let children = m.children(level, k);
            let child_points: Vec<SpherePoint> =
                children.clone().map(|i| m.atoms[i].point).collect();
            match branch.pick(&child_points, z) {
                Ok(local) => {
                    let child = children.start + local;
                    lhs_terms.push(m.atoms[child].mass);
                    let deriv = c.germ_deriv(&atom.point, &m.atoms[child].point)?;
                    rhs_terms.push(atom.mass * deriv.powf(delta));
                }
                Err(_) => unmatched += 1,
            }
        } else {
            // deepest level: no image atoms exist; fresh forward solve for
            // the derivative only
            let images = c.forward(&atom.point)?;
            if let Ok(i) = branch.pick(&images, z) {
                let deriv = c.germ_deriv(&atom.point, &images[i])?;
                let term = atom.mass * deriv.powf(delta);
                rhs_terms.push(term);
                tail_terms.push(term);
            } else {
                unmatched += 1;
            }
        }
    }
    let lhs = pairwise_sum(&lhs_terms);
    let rhs = pairwise_sum(&rhs_terms);
    let rel_residual = (lhs - rhs).abs() / lhs.max(rhs).max(FLOOR);
    Ok(ConformalityReport {
        disk,
        branch: branch.index,
        delta,
        lhs,
        rhs,
        rel_residual,
        atoms_in_region,
        unmatched_children: unmatched,
        truncated_tail_mass: pairwise_sum(&tail_terms),
        note: "limit set approximated by the atom support: image atoms must have preimage atoms in the disk",
    })
}

/// Reports for every branch over the disk.
pub fn conformality_reports(
    m: &AtomicMeasure,
    c: &Correspondence,
    disk: SphereDisk,
    delta: f64,
) -> Result<Vec<ConformalityReport>> {
    (0..c.degree_w())
        .map(|b| conformality_residual(m, c, disk, b, delta))
        .collect()
}

/// Mass of the measure within the chordal ball around `omega`.
pub fn parabolic_mass(m: &AtomicMeasure, omega: &SpherePoint, radius: f64) -> f64 {
    m.mass_near(omega, radius)
}

#[derive(Clone, Debug, Serialize)]
pub struct PetalFit {
    /// Petal order: nearest positive integer to the fitted exponent.
    pub p: u32,
    pub p_raw: f64,
    pub fit_r2: f64,
    /// Empirical constant in |T^n(z) - omega| ~ C n^(-1/p); no claim is
    /// made beyond this run.
    pub c_empirical: f64,
    pub direction: f64,
    pub iterations: usize,
}

/// Estimate the petal order of the indifferent fixed point `omega`:
/// iterate the fixing branch from seeds on a small circle and fit
/// `log |T^n(z0) - omega| ~ -(1/p) log n` along a converging direction.
pub fn parabolic_order(
    c: &Correspondence,
    omega: &SpherePoint,
    n_max: usize,
) -> Result<PetalFit> {
    let omega_c = omega.to_complex().ok_or_else(|| {
        Error::invalid("parabolic_order", "parabolic point at infinity unsupported")
    })?;
    let images = c.forward(omega)?;
    let fixing = images
        .iter()
        .min_by(|a, b| {
            chordal_distance(a, omega)
                .partial_cmp(&chordal_distance(b, omega))
                .unwrap()
        })
        .ok_or_else(|| Error::invalid("parabolic_order", "no forward images"))?;
    let fix_dist = chordal_distance(fixing, omega);
    if fix_dist > 1e-8 {
        return Err(Error::NotFixed { nearest: fix_dist });
    }
    let multiplier_abs = c.germ_deriv(omega, fixing)?;
    if (multiplier_abs - 1.0).abs() > INDIFFERENT_BAND {
        return Err(Error::NotIndifferent { multiplier_abs });
    }
    // large enough that the 1/n decay dominates the seed offset over the
    // fitted tail, small enough to stay in the petal
    let r0 = 3e-2 * (1.0 + omega_c.norm());
    let directions = 12;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..directions {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / directions as f64;
        let mut z = omega_c + Complex::from_polar(r0, theta);
        let mut distances = Vec::with_capacity(n_max);
        let mut escaped = false;
        for _ in 0..n_max {
            let p = SpherePoint::finite(z);
            let images = c.forward(&p)?;
            // the fixing branch is the image nearest the current point
            let next = images
                .iter()
                .min_by(|a, b| {
                    chordal_distance(a, &p)
                        .partial_cmp(&chordal_distance(b, &p))
                        .unwrap()
                })
                .unwrap();
            let Some(zn) = next.to_complex() else {
                escaped = true;
                break;
            };
            z = zn;
            let d = (z - omega_c).norm();
            distances.push(d);
            if d > 8.0 * r0 {
                escaped = true;
                break;
            }
            if d < 1e-14 {
                break;
            }
        }
        if escaped || distances.len() < n_max / 2 {
            continue;
        }
        let final_d = *distances.last().unwrap();
        if final_d < r0 / 3.0 {
            let better = match &best {
                Some((d, _)) => final_d < *d,
                None => true,
            };
            if better {
                best = Some((theta, distances));
            }
        }
    }
    let Some((direction, distances)) = best.map(|(t, d)| (t, d)) else {
        return Err(Error::WrongDirection { tried: directions });
    };
    let start = (distances.len() / 2).max(2);
    let xs: Vec<f64> = (start..distances.len())
        .map(|j| ((j + 1) as f64).ln())
        .collect();
    let ys: Vec<f64> = distances[start..].iter().map(|d| d.ln()).collect();
    let (slope, intercept, fit_r2) = linear_fit(&xs, &ys);
    let p_raw = -1.0 / slope;
    Ok(PetalFit {
        p: p_raw.round().max(1.0) as u32,
        p_raw,
        fit_r2,
        c_empirical: intercept.exp(),
        direction,
        iterations: distances.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracReport {
    pub omega: SpherePoint,
    pub delta: f64,
    /// Branch derivatives at omega, in deterministic branch order.
    pub branch_derivs: Vec<f64>,
    /// Index of a branch with derivative below 1e-6, when one exists.
    pub critical_branch: Option<usize>,
    /// |multiplier| of the branch fixing omega, when one exists.
    pub fixing_branch_deriv: Option<f64>,
    pub pairs_checked: usize,
    /// For special pairs avoiding omega on both sides, both sides of the
    /// conformality identity for the Dirac mass vanish identically.
    pub pairs_residual_zero: bool,
}

/// Check the conformality of the Dirac mass at a fixed point `omega`:
/// verify the branch structure there and that sampled special pairs
/// avoiding `omega` bilaterally give 0 = 0.
pub fn dirac_conformality_check(
    c: &Correspondence,
    omega: &SpherePoint,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<DiracReport> {
    let images = c.forward(omega)?;
    let nearest = images
        .iter()
        .map(|w| chordal_distance(w, omega))
        .fold(f64::INFINITY, f64::min);
    if nearest > 1e-8 {
        return Err(Error::NotFixed { nearest });
    }
    let mut branch_derivs = Vec::with_capacity(images.len());
    let mut critical_branch = None;
    let mut fixing_branch_deriv = None;
    for (i, w) in images.iter().enumerate() {
        let d = c.germ_deriv(omega, w)?;
        if d <= 1e-6 && critical_branch.is_none() {
            critical_branch = Some(i);
        }
        if chordal_distance(w, omega) <= 1e-8 {
            fixing_branch_deriv = Some(d);
        }
        branch_derivs.push(d);
    }
    // deterministic linear-congruential stream; no external RNG needed
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut unit = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut pairs_checked = 0usize;
    let mut pairs_residual_zero = true;
    let mut attempts = 0usize;
    while pairs_checked < trials && attempts < trials * 64 {
        attempts += 1;
        let center = Complex::new(4.0 * unit() - 2.0, 4.0 * unit() - 2.0);
        let radius = 0.05 + 0.1 * unit();
        let disk_center = SpherePoint::finite(center);
        // A must avoid omega
        if chordal_distance(&disk_center, omega) <= radius + 0.1 {
            continue;
        }
        let Ok(images) = c.forward(&disk_center) else {
            continue;
        };
        for w in &images {
            let Ok(deriv) = c.germ_deriv(&disk_center, w) else {
                continue;
            };
            if !deriv.is_finite() {
                continue;
            }
            // crude image-size bound; f(A) must avoid omega too
            let image_radius = radius * deriv * 2.0 + 0.05;
            if chordal_distance(w, omega) <= image_radius {
                continue;
            }
            // both sides of the conformality identity for the Dirac mass:
            // mu(f(A)) counts omega in f(A); the integral weights omega in A
            let lhs = f64::from(u8::from(chordal_distance(w, omega) <= radius * deriv));
            let rhs = f64::from(u8::from(chordal_distance(&disk_center, omega) <= radius));
            if lhs != 0.0 || rhs != 0.0 {
                pairs_residual_zero = false;
            }
            pairs_checked += 1;
        }
    }
    Ok(DiracReport {
        omega: *omega,
        delta,
        branch_derivs,
        critical_branch,
        fixing_branch_deriv,
        pairs_checked,
        pairs_residual_zero,
    })
}

impl Serialize for AtomicMeasure {
    /// `{ "s":, "depth":, "dw":, "basepoint":, "atoms": [[re, im, mass], ...] }`;
    /// atoms at infinity serialize as `[null, null, mass]`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct AtomRow<'a>(&'a Atom);
        impl Serialize for AtomRow<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(3))?;
                match self.0.point.to_complex() {
                    Some(z) => {
                        seq.serialize_element(&z.re)?;
                        seq.serialize_element(&z.im)?;
                    }
                    None => {
                        seq.serialize_element(&Option::<f64>::None)?;
                        seq.serialize_element(&Option::<f64>::None)?;
                    }
                }
                seq.serialize_element(&self.0.mass)?;
                seq.end()
            }
        }
        let mut st = s.serialize_struct("AtomicMeasure", 5)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("dw", &self.dw)?;
        st.serialize_field("basepoint", &self.basepoint)?;
        st.serialize_field(
            "atoms",
            &self.atoms.iter().map(AtomRow).collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

/// Ten deterministic test disks centered on the unit circle, used by the
/// conformality diagnostics of the circle example.
pub fn circle_test_disks(radius: f64) -> Vec<SphereDisk> {
    (0..10)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.3) / 10.0;
            SphereDisk {
                center: SpherePoint::finite(Complex::from_polar(1.0, t)),
                radius,
            }
        })
        .collect()
}

/// Sort order helper shared by callers emitting atom lists.
pub fn sort_atoms(atoms: &mut [Atom]) {
    atoms.sort_by(|a, b| cmp_points(&a.point, &b.point));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bullett_penrose, from_rational_inverse};
    use crate::poincare::weight_table;
    use crate::polyalg::UniPoly;

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(Complex::new(re, im))
    }

    fn squaring_inverse() -> Correspondence {
        from_rational_inverse(
            &UniPoly::from_reals(&[0.0, 0.0, 1.0]),
            &UniPoly::from_reals(&[1.0]),
        )
        .unwrap()
    }

    fn cauliflower() -> Correspondence {
        from_rational_inverse(
            &UniPoly::from_reals(&[0.25, 0.0, 1.0]),
            &UniPoly::from_reals(&[1.0]),
        )
        .unwrap()
    }

    #[test]
    fn masses_normalize_and_match_level_sums() {
        let f = squaring_inverse();
        let x = pt(1.0, 0.0);
        let s = 1.3;
        let depth = 10;
        let m = patterson_sullivan(&f, &x, s, depth, 2e7).unwrap();
        assert!((m.total_mass() - 1.0).abs() <= 1e-12);
        // per-level mass ties to the level sums bit for bit up to the
        // shared normalization
        let sums = weight_table(&f, &x, depth, 2e7)
            .unwrap()
            .level_sums(s)
            .unwrap();
        let total: f64 = pairwise_sum(&sums.sums);
        for n in 0..=depth {
            let level_mass: Vec<f64> = m.atoms[m.level_offset(n)..m.level_offset(n + 1)]
                .iter()
                .map(|a| a.mass)
                .collect();
            let got = pairwise_sum(&level_mass);
            let want = sums.sums[n] / total;
            assert!(
                (got - want).abs() <= 1e-13,
                "level {n}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn circle_measure_atom_masses() {
        // at s = 1 every level has sum 1: each depth-n atom carries
        // 2^-n / (depth + 1)
        let f = squaring_inverse();
        let depth = 8;
        let m = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, depth, 2e7).unwrap();
        for n in 0..=depth {
            for atom in &m.atoms[m.level_offset(n)..m.level_offset(n + 1)] {
                let want = 2f64.powi(-(n as i32)) / (depth as f64 + 1.0);
                assert!((atom.mass - want).abs() <= 1e-12, "level {n}");
            }
        }
    }

    #[test]
    fn conformality_on_the_circle() {
        let f = squaring_inverse();
        let m = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 14, 2e7).unwrap();
        let disks = circle_test_disks(0.25);
        for disk in &disks {
            let reports = conformality_reports(&m, &f, *disk, 1.0).unwrap();
            // at least one branch must be clean; both should be
            for r in &reports {
                assert!(
                    r.rel_residual <= 0.10,
                    "residual {} on disk at {}",
                    r.rel_residual,
                    disk.center
                );
                assert!(r.atoms_in_region > 50);
                assert_eq!(r.unmatched_children, 0);
            }
        }
        // wrong exponent: a clear mismatch
        for disk in &disks {
            let r = conformality_residual(&m, &f, *disk, 0, 2.0).unwrap();
            assert!(r.rel_residual >= 0.2, "residual {}", r.rel_residual);
        }
    }

    #[test]
    fn conformality_improves_with_depth() {
        let f = squaring_inverse();
        let shallow = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 8, 2e7).unwrap();
        let deep = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 16, 2e7).unwrap();
        let disk = circle_test_disks(0.25)[2];
        let r_shallow = conformality_residual(&shallow, &f, disk, 0, 1.0).unwrap();
        let r_deep = conformality_residual(&deep, &f, disk, 0, 1.0).unwrap();
        assert!(
            r_deep.rel_residual < r_shallow.rel_residual,
            "{} !< {}",
            r_deep.rel_residual,
            r_shallow.rel_residual
        );
    }

    #[test]
    fn empty_disk_gives_zero_residual() {
        let f = squaring_inverse();
        let m = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 8, 2e7).unwrap();
        // a disk well inside the unit disk, away from all atoms and from
        // the singular point 0
        let disk = SphereDisk {
            center: pt(0.4, 0.35),
            radius: 0.05,
        };
        let r = conformality_residual(&m, &f, disk, 0, 1.0).unwrap();
        assert_eq!(r.atoms_in_region, 0);
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert_eq!(r.rel_residual, 0.0);
    }

    #[test]
    fn parabolic_mass_modes() {
        let f = squaring_inverse();
        let m = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 10, 2e7).unwrap();
        // radius 0 catches nothing when no atom sits exactly there
        assert_eq!(parabolic_mass(&m, &pt(0.3, 0.2), 0.0), 0.0);
        // sanity mode: mass near any test point is bounded by the measure
        let ball = parabolic_mass(&m, &pt(1.0, 0.0), 0.3);
        assert!(ball > 0.0 && ball < 1.0);
    }

    #[test]
    fn petal_order_of_the_cauliflower() {
        let f = cauliflower();
        let fit = parabolic_order(&f, &pt(0.5, 0.0), 400).unwrap();
        assert_eq!(fit.p, 1, "p_raw = {}", fit.p_raw);
        assert!(fit.fit_r2 > 0.99);
        assert!((fit.p_raw - 1.0).abs() < 0.2);
    }

    #[test]
    fn petal_order_rejects_attracting_points() {
        let f = squaring_inverse();
        // z = 1 is an attracting fixed point (multiplier 1/2)
        let err = parabolic_order(&f, &pt(1.0, 0.0), 100);
        assert!(matches!(err, Err(Error::NotIndifferent { .. })), "{err:?}");
        // and a non-fixed point is rejected outright
        let err = parabolic_order(&f, &pt(0.7, 0.1), 100);
        assert!(matches!(err, Err(Error::NotFixed { .. })));
    }

    #[test]
    fn bullett_penrose_petal_fit_reports() {
        let f = bullett_penrose(Complex::new(4.0, 0.0)).unwrap();
        // record the fit; the order is reported, not asserted
        let fit = parabolic_order(&f, &pt(0.0, 0.0), 300).unwrap();
        assert!(fit.p >= 1);
        assert!(fit.fit_r2 > 0.9, "fit quality {}", fit.fit_r2);
    }

    #[test]
    fn dirac_check_on_bullett_penrose() {
        let f = bullett_penrose(Complex::new(4.0, 0.0)).unwrap();
        let report = dirac_conformality_check(&f, &pt(0.0, 0.0), 1.5, 40, 7).unwrap();
        assert!(report.critical_branch.is_some(), "{report:?}");
        let fixing = report.fixing_branch_deriv.unwrap();
        assert!((fixing - 1.0).abs() <= 1e-9, "fixing multiplier {fixing}");
        assert!(report.pairs_checked >= 40);
        assert!(report.pairs_residual_zero);
    }

    #[test]
    fn dirac_check_negative_control() {
        // squaring inverse at the attracting point 1: no critical branch
        let f = squaring_inverse();
        let report = dirac_conformality_check(&f, &pt(1.0, 0.0), 1.0, 20, 3).unwrap();
        assert!(report.critical_branch.is_none(), "{report:?}");
        assert!(report.fixing_branch_deriv.is_some());
        // not fixed at a generic point
        let err = dirac_conformality_check(&f, &pt(0.3, 0.3), 1.0, 5, 3);
        assert!(matches!(err, Err(Error::NotFixed { .. })));
    }

    #[test]
    fn measure_json_shape() {
        let f = squaring_inverse();
        let m = patterson_sullivan(&f, &pt(1.0, 0.0), 1.0, 3, 2e7).unwrap();
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["depth"], 3);
        assert_eq!(json["dw"], 2);
        let atoms = json["atoms"].as_array().unwrap();
        assert_eq!(atoms.len(), 15);
        assert_eq!(atoms[0].as_array().unwrap().len(), 3);
    }
}
