//! The multivalued map `F: z -> w` defined by `P(z, w) = 0` (holomorphic)
//! or `P(conj z, w) = 0` (antiholomorphic): forward/backward images, branch
//! derivatives in the spherical metric, critical and singular sets,
//! period-1 classification, and inverse-like diagnostics.

use crate::error::{Error, Result};
use crate::polyalg::{resultant_z, roots, square_free_part, BiPoly, UniPoly};
use crate::sphere::{chordal_distance, PointCloud, SphereGrid, SpherePoint};
use crate::Complex;
use serde::{Deserialize, Serialize};

/// Residual tolerance (relative) for "lies on the curve" checks.
const ON_CURVE_REL: f64 = 1e-8;
/// Relative threshold below which a partial derivative counts as zero.
const PARTIAL_ZERO_REL: f64 = 1e-11;
/// Half-width of the indifferent classification band around |m| = 1.
pub const INDIFFERENT_BAND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "holo")]
    Holomorphic,
    #[serde(rename = "anti")]
    Antiholomorphic,
}

/// Family name, parameters, and construction notes.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Metadata {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    /// Degree of the repeated factor removed by square-free reduction.
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub square_free_removed: usize,
    /// Content loci removed by the family constructors (e.g. "z=-1").
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed_content: Vec<String>,
}

fn is_zero_usize(n: &usize) -> bool {
    *n == 0
}

/// One chart combination of the defining polynomial with its partials.
#[derive(Clone, Debug)]
struct ChartVariant {
    poly: BiPoly,
    pz: BiPoly,
    pw: BiPoly,
}

impl ChartVariant {
    fn new(poly: BiPoly) -> Self {
        let pz = poly.partial_z();
        let pw = poly.partial_w();
        ChartVariant { poly, pz, pw }
    }
}

#[derive(Clone, Debug)]
pub struct Correspondence {
    poly: BiPoly,
    kind: Kind,
    metadata: Metadata,
    /// Indexed by [z inverted][w inverted].
    variants: [[ChartVariant; 2]; 2],
}

/// A single-valued germ of `F` at a point of the curve.
#[derive(Clone, Copy, Debug)]
pub struct BranchGerm {
    pub z: SpherePoint,
    pub w: SpherePoint,
    /// |Df| in the spherical metric; `f64::INFINITY` when `P_w` vanishes.
    pub deriv_sph: f64,
    pub critical: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Attracting,
    Repelling,
    Indifferent,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub point: SpherePoint,
    /// Complex multiplier of the fixing branch when finite.
    pub multiplier: Option<[f64; 2]>,
    pub multiplier_abs: f64,
    pub class: PointClass,
    /// `(p, q)` when the multiplier argument is within 1e-6 of `2 pi p/q`
    /// with `q <= 64`.
    pub root_of_unity: Option<(i64, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseLikeReport {
    pub fraction_unique: f64,
    pub checked: usize,
    pub violations: Vec<(SpherePoint, usize)>,
}

impl Correspondence {
    pub fn new(poly: BiPoly, kind: Kind) -> Result<Self> {
        Self::with_metadata(poly, kind, Metadata::default())
    }

    pub fn with_metadata(poly: BiPoly, kind: Kind, mut metadata: Metadata) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::DegenerateCurve {
                reason: "defining polynomial is zero".into(),
            });
        }
        let (reduced, removed) = square_free_part(&poly)?;
        metadata.square_free_removed += removed;
        let poly = reduced;
        if poly.degree_z() < 1 || poly.degree_w() < 1 {
            return Err(Error::DegenerateCurve {
                reason: format!(
                    "degrees must be at least 1 in each variable, got d_z = {}, d_w = {}",
                    poly.degree_z(),
                    poly.degree_w()
                ),
            });
        }
        let variants = [
            [
                ChartVariant::new(poly.clone()),
                ChartVariant::new(poly.flip_w()),
            ],
            [
                ChartVariant::new(poly.flip_z()),
                ChartVariant::new(poly.flip_z().flip_w()),
            ],
        ];
        Ok(Correspondence {
            poly,
            kind,
            metadata,
            variants,
        })
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn degree_z(&self) -> usize {
        self.poly.degree_z()
    }

    pub fn degree_w(&self) -> usize {
        self.poly.degree_w()
    }

    /// The z-side input after the kind twist: `z` itself for holomorphic,
    /// `conj z` for antiholomorphic.
    fn twist(&self, z: &SpherePoint) -> SpherePoint {
        match self.kind {
            Kind::Holomorphic => *z,
            Kind::Antiholomorphic => z.conj(),
        }
    }

    fn variant(&self, zs: &SpherePoint, w: &SpherePoint) -> &ChartVariant {
        &self.variants[zs.is_inverted() as usize][w.is_inverted() as usize]
    }

    /// Forward image: the d_w values `w` with `(z*, w)` on the curve, with
    /// multiplicity. Degree drops of the slice come back as points at
    /// infinity, so the cardinality is always d_w.
    pub fn forward(&self, z: &SpherePoint) -> Result<Vec<SpherePoint>> {
        let zs = self.twist(z);
        let variant = &self.variants[zs.is_inverted() as usize][0];
        let z0 = zs.coord();
        let slice = variant.poly.slice_w(z0);
        let slice_floor =
            1e-14 * self.poly.scale() * z0.norm().max(1.0).powi(self.poly.degree_z() as i32);
        if slice.is_zero() || slice.scale() <= slice_floor {
            return Err(Error::DegenerateSlice { at: z0 });
        }
        let dw = self.poly.degree_w();
        let mut out: Vec<SpherePoint> = roots(&slice, 1e-12)?
            .into_iter()
            .map(SpherePoint::finite)
            .collect();
        out.extend((0..dw - slice.degree()).map(|_| SpherePoint::infinity()));
        sort_points(&mut out);
        Ok(out)
    }

    /// Backward image: the d_z values `z` with `w` in `F(z)`.
    pub fn backward(&self, w: &SpherePoint) -> Result<Vec<SpherePoint>> {
        let variant = &self.variants[0][w.is_inverted() as usize];
        let w0 = w.coord();
        let slice = variant.poly.slice_z(w0);
        let slice_floor =
            1e-14 * self.poly.scale() * w0.norm().max(1.0).powi(self.poly.degree_w() as i32);
        if slice.is_zero() || slice.scale() <= slice_floor {
            return Err(Error::DegenerateSlice { at: w0 });
        }
        let dz = self.poly.degree_z();
        let conj = self.kind == Kind::Antiholomorphic;
        let mut out: Vec<SpherePoint> = roots(&slice, 1e-12)?
            .into_iter()
            .map(|r| SpherePoint::finite(if conj { r.conj() } else { r }))
            .collect();
        out.extend((0..dz - slice.degree()).map(|_| SpherePoint::infinity()));
        sort_points(&mut out);
        Ok(out)
    }

    /// Residual of `(z, w)` against the curve, relative to the evaluation
    /// scale.
    pub fn curve_residual(&self, z: &SpherePoint, w: &SpherePoint) -> f64 {
        let zs = self.twist(z);
        let v = self.variant(&zs, w);
        let (a, b) = (zs.coord(), w.coord());
        v.poly.eval(a, b).norm() / v.poly.eval_scale(a, b).max(f64::MIN_POSITIVE)
    }

    /// |Df| at a germ, in the spherical metric, without the on-curve check.
    /// Returns 0 at branch critical points (`P_z = 0`), infinity when
    /// `P_w = 0 != P_z`, and an error at curve singular points.
    pub fn germ_deriv(&self, z: &SpherePoint, w: &SpherePoint) -> Result<f64> {
        let zs = self.twist(z);
        let v = self.variant(&zs, w);
        let (a, b) = (zs.coord(), w.coord());
        let pz = v.pz.eval(a, b);
        let pw = v.pw.eval(a, b);
        let floor = 1e-16 * self.poly.scale().max(f64::MIN_POSITIVE);
        let pz_zero = pz.norm() <= PARTIAL_ZERO_REL * v.pz.eval_scale(a, b).max(floor);
        let pw_zero = pw.norm() <= PARTIAL_ZERO_REL * v.pw.eval_scale(a, b).max(floor);
        if pz_zero && pw_zero {
            return Err(Error::SingularPoint { z: a, w: b });
        }
        if pw_zero {
            return Ok(f64::INFINITY);
        }
        if pz_zero {
            return Ok(0.0);
        }
        let euclid = (pz / pw).norm();
        Ok(euclid * (1.0 + a.norm_sqr()) / (1.0 + b.norm_sqr()))
    }

    /// |Df| with the precondition checked: `(z*, w)` must lie on the curve.
    pub fn branch_derivative(&self, z: &SpherePoint, w: &SpherePoint) -> Result<f64> {
        let residual = self.curve_residual(z, w);
        if residual > ON_CURVE_REL {
            return Err(Error::NotOnCurve {
                residual,
                tolerance: ON_CURVE_REL,
            });
        }
        self.germ_deriv(z, w)
    }

    pub fn germ(&self, z: &SpherePoint, w: &SpherePoint) -> Result<BranchGerm> {
        let deriv_sph = self.branch_derivative(z, w)?;
        Ok(BranchGerm {
            z: *z,
            w: *w,
            deriv_sph,
            critical: deriv_sph == 0.0,
        })
    }

    /// Complex chart derivative `dw/dz*` at a finite germ (both points in
    /// the main chart).
    pub fn complex_multiplier(&self, z: &SpherePoint, w: &SpherePoint) -> Result<Complex> {
        let zs = self.twist(z);
        if zs.is_inverted() || w.is_inverted() {
            return Err(Error::invalid(
                "complex_multiplier",
                "only available at finite germs",
            ));
        }
        let v = &self.variants[0][0];
        let (a, b) = (zs.coord(), w.coord());
        let pw = v.pw.eval(a, b);
        let pz = v.pz.eval(a, b);
        if pw.norm_sqr() == 0.0 {
            return Err(Error::invalid("complex_multiplier", "P_w vanishes"));
        }
        Ok(-pz / pw)
    }

    /// Critical values of the forward direction: w-values over the
    /// ramification of the projection `(z, w) -> w`, merged across charts.
    pub fn critical_values_forward(&self) -> Result<Vec<SpherePoint>> {
        ramification_values(&self.poly)
    }

    /// Critical values of the inverse direction, reported in the z-variable
    /// (conjugated for the antiholomorphic kind).
    pub fn critical_values_backward(&self) -> Result<Vec<SpherePoint>> {
        let vals = ramification_values(&self.poly.swap_vars())?;
        Ok(self.conj_if_anti(vals))
    }

    fn conj_if_anti(&self, mut pts: Vec<SpherePoint>) -> Vec<SpherePoint> {
        if self.kind == Kind::Antiholomorphic {
            for p in pts.iter_mut() {
                *p = p.conj();
            }
            sort_points(&mut pts);
        }
        pts
    }

    /// Singular points of `F`: projections to z of the non-injectivity
    /// locus of `(z, w) -> z`, plus the sheet escapes where the leading
    /// w-coefficient vanishes. Contains the backward critical values.
    pub fn singular_points(&self) -> Result<Vec<SpherePoint>> {
        let mut out = ramification_values(&self.poly.swap_vars())?;
        let lc = self.poly.leading_w_coeff();
        if !lc.is_zero() && lc.degree() >= 1 {
            // sheet escapes: a w-root runs off to infinity over these z
            for r in roots(&lc, 1e-10)? {
                push_dedup(&mut out, SpherePoint::finite(r), 1e-7);
            }
        }
        sort_points(&mut out);
        Ok(self.conj_if_anti(out))
    }

    /// Finite fixed points: roots of the diagonal `P(z, z)` for the
    /// holomorphic kind, a damped-Newton grid hunt for the antiholomorphic
    /// kind. Each is classified by the fixing-branch multiplier.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        match self.kind {
            Kind::Holomorphic => self.fixed_points_holomorphic(),
            Kind::Antiholomorphic => self.fixed_points_antiholomorphic(),
        }
    }

    fn fixed_points_holomorphic(&self) -> Result<Vec<FixedPoint>> {
        let dz = self.poly.degree_z();
        let dw = self.poly.degree_w();
        let mut diag = vec![Complex::new(0.0, 0.0); dz + dw + 1];
        for (i, row) in self.poly.rows().iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                diag[i + j] += c;
            }
        }
        let diag = UniPoly::new(diag);
        if diag.is_zero() || diag.scale() <= 1e-14 * self.poly.scale() {
            return Err(Error::DiagonalDegenerate);
        }
        let mut pts: Vec<Complex> = Vec::new();
        for r in roots(&diag, 1e-12)? {
            if !pts.iter().any(|p| (*p - r).norm() < 1e-9 * (1.0 + r.norm())) {
                pts.push(r);
            }
        }
        let mut out = Vec::with_capacity(pts.len());
        for r in pts {
            out.push(self.classify_fixed(&SpherePoint::finite(r)));
        }
        out.sort_by(|a, b| cmp_points(&a.point, &b.point));
        Ok(out)
    }

    fn classify_fixed(&self, p: &SpherePoint) -> FixedPoint {
        let multiplier = self.complex_multiplier(p, p).ok();
        // chart factors cancel at a fixed point, so the euclidean and
        // spherical magnitudes agree
        let multiplier_abs = multiplier.map_or(f64::INFINITY, |m| m.norm());
        let class = if (multiplier_abs - 1.0).abs() <= INDIFFERENT_BAND {
            PointClass::Indifferent
        } else if multiplier_abs < 1.0 {
            PointClass::Attracting
        } else {
            PointClass::Repelling
        };
        let root_of_unity = match (class, multiplier, self.kind) {
            (PointClass::Indifferent, Some(m), Kind::Holomorphic) => {
                let turn = m.arg() / (2.0 * std::f64::consts::PI);
                rational_approx(turn.rem_euclid(1.0), 64, 1e-6)
            }
            // |m| = 1 makes the (holomorphic) second iterate have
            // multiplier of modulus |m|^2 = 1
            (PointClass::Indifferent, Some(_), Kind::Antiholomorphic) => Some((0, 1)),
            _ => None,
        };
        FixedPoint {
            point: *p,
            multiplier: multiplier.map(|m| [m.re, m.im]),
            multiplier_abs,
            class,
            root_of_unity,
        }
    }

    /// Antiholomorphic period-1 points: `P(conj z, z) = 0` is not
    /// polynomial in z, so hunt zeros of the real-analytic system with
    /// damped Newton from a deterministic grid of seeds.
    fn fixed_points_antiholomorphic(&self) -> Result<Vec<FixedPoint>> {
        let v = &self.variants[0][0];
        let h = |z: Complex| v.poly.eval(z.conj(), z);
        let scale = self.poly.scale().max(f64::MIN_POSITIVE);
        let mut found: Vec<Complex> = Vec::new();
        for i in -4i32..=4 {
            for j in -4i32..=4 {
                let seed = Complex::new(i as f64 * 0.5, j as f64 * 0.5);
                if let Some(z) = damped_newton_conj(&h, v, seed, scale) {
                    if !found.iter().any(|f| (*f - z).norm() < 1e-7 * (1.0 + z.norm())) {
                        found.push(z);
                    }
                }
            }
        }
        found.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        Ok(found
            .into_iter()
            .map(|z| self.classify_fixed(&SpherePoint::finite(z)))
            .collect())
    }

    /// Continue the branch through `(z0, w0)` along the straight segment
    /// from `z0` to `z1` (finite chart), tracking the nearest root with
    /// adaptive step halving. Errors when branches cannot be separated.
    pub fn continue_branch(
        &self,
        z0: &SpherePoint,
        w0: &SpherePoint,
        z1: &SpherePoint,
    ) -> Result<SpherePoint> {
        let a = z0
            .to_complex()
            .ok_or_else(|| Error::invalid("continue_branch", "start point must be finite"))?;
        let b = z1
            .to_complex()
            .ok_or_else(|| Error::invalid("continue_branch", "end point must be finite"))?;
        let mut t = 0.0f64;
        let mut step = 0.5f64;
        let mut w = *w0;
        let mut iterations = 0usize;
        while t < 1.0 {
            iterations += 1;
            if iterations > 4000 {
                return Err(Error::NoValidBranch {
                    reason: "branch continuation did not terminate".into(),
                });
            }
            let t_next = (t + step).min(1.0);
            let z = SpherePoint::finite(a + (b - a) * t_next);
            let images = self.forward(&z)?;
            let mut best = (f64::INFINITY, 0usize);
            let mut second = f64::INFINITY;
            for (i, cand) in images.iter().enumerate() {
                let d = chordal_distance(cand, &w);
                if d < best.0 {
                    second = best.0;
                    best = (d, i);
                } else if d < second {
                    second = d;
                }
            }
            if images.len() > 1 && best.0 > 0.4 * second {
                // ambiguous tracking: refine the step
                if step > 1e-6 {
                    step *= 0.5;
                    continue;
                }
                return Err(Error::NoValidBranch {
                    reason: "branches collide along the continuation path".into(),
                });
            }
            w = images[best.1];
            t = t_next;
            step = (step * 1.7).min(0.5);
        }
        Ok(w)
    }

    /// Fraction of cloud points with exactly one backward preimage inside
    /// the cloud (within `tol`), plus the violating points.
    pub fn inverse_like_check(&self, cloud: &PointCloud, tol: f64) -> Result<InverseLikeReport> {
        if cloud.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        let grid = SphereGrid::from_points(tol, cloud.points.iter());
        let mut unique = 0usize;
        let mut violations = Vec::new();
        for w in &cloud.points {
            let preimages = self.backward(w)?;
            let inside = preimages
                .iter()
                .filter(|p| grid.nearest_within(p, tol).is_some())
                .count();
            if inside == 1 {
                unique += 1;
            } else {
                violations.push((*w, inside));
            }
        }
        Ok(InverseLikeReport {
            fraction_unique: unique as f64 / cloud.points.len() as f64,
            checked: cloud.points.len(),
            violations,
        })
    }
}

/// One damped Newton run for `H(z) = P(conj z, z)` from `seed`.
fn damped_newton_conj(
    h: &impl Fn(Complex) -> Complex,
    v: &ChartVariant,
    seed: Complex,
    scale: f64,
) -> Option<Complex> {
    let mut z = seed;
    for _ in 0..60 {
        let hv = h(z);
        let local = v.poly.eval_scale(z.conj(), z).max(scale * 1e-6);
        if hv.norm() <= 1e-13 * local {
            return Some(z);
        }
        // Wirtinger pair: dH/dz = P_w, dH/d(conj z) = P_z
        let a = v.pw.eval(z.conj(), z);
        let b = v.pz.eval(z.conj(), z);
        let denom = a.norm_sqr() - b.norm_sqr();
        if denom.abs() < 1e-30 {
            return None;
        }
        let delta = (-hv * a.conj() + b * hv.conj()) / denom;
        let mut step = delta;
        let mut accepted = false;
        for _ in 0..20 {
            let cand = z + step;
            if cand.is_finite() && h(cand).norm() < hv.norm() {
                z = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Union of backward images of the backward critical values up to `depth`,
/// deduplicated on a spherical grid.
pub fn postcritical_backward(
    c: &Correspondence,
    depth: usize,
    grid_res: f64,
) -> Result<PointCloud> {
    let seeds = c.critical_values_backward()?;
    let mut grid = SphereGrid::new(grid_res.max(1e-12));
    let mut frontier = Vec::new();
    for s in seeds {
        if grid.insert_if_far(s, grid_res / 2.0) {
            frontier.push(s);
        }
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for q in c.backward(p)? {
                if grid.insert_if_far(q, grid_res / 2.0) {
                    next.push(q);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(PointCloud {
        points: grid.into_points(),
        grid_res,
    })
}

/// Values of the second variable over the ramification locus of the
/// projection onto the second variable, merged across the four chart
/// combinations.
fn ramification_values(base: &BiPoly) -> Result<Vec<SpherePoint>> {
    let mut out: Vec<SpherePoint> = Vec::new();
    for z_flip in [false, true] {
        for w_flip in [false, true] {
            let mut v = base.clone();
            if z_flip {
                v = v.flip_z();
            }
            if w_flip {
                v = v.flip_w();
            }
            let dv = v.partial_z();
            if dv.is_zero() {
                continue;
            }
            let candidates = if v.degree_z() >= 1 && dv.degree_z() >= 1 {
                let res = match resultant_z(&v, &dv) {
                    Ok(r) => r,
                    Err(Error::SharedFactor) => {
                        return Err(Error::DegenerateCurve {
                            reason: "discriminant vanishes identically".into(),
                        })
                    }
                    Err(e) => return Err(e),
                };
                if res.is_zero() || res.degree() == 0 {
                    continue;
                }
                roots(&res, 1e-10)?
            } else {
                // the partial is z-free: candidates are its w-roots, still
                // subject to the common-root check below
                let row = UniPoly::new(dv.rows()[0].clone());
                if row.degree() == 0 {
                    continue;
                }
                roots(&row, 1e-10)?
            };
            for r in candidates {
                // the resultant can vanish without a genuine common zero
                // when slice degrees drop; verify before emitting
                if !slices_share_root(&v, &dv, r) {
                    continue;
                }
                let pt = if w_flip {
                    SpherePoint::from_inverted(r)
                } else {
                    SpherePoint::finite(r)
                };
                push_dedup(&mut out, pt, 1e-7);
            }
        }
    }
    sort_points(&mut out);
    Ok(out)
}

/// Whether `v(., w0)` and `dv(., w0)` have a common z-root. The tolerance
/// is loose: a ramification double root splits like the square root of the
/// perturbation of w0.
fn slices_share_root(v: &BiPoly, dv: &BiPoly, w0: Complex) -> bool {
    let sp = v.slice_z(w0);
    let sd = dv.slice_z(w0);
    let p_roots = match () {
        _ if sp.is_zero() => return true, // vertical-line content: ramified
        _ if sp.degree() == 0 => return false,
        _ => match roots(&sp, 1e-10) {
            Ok(r) => r,
            Err(_) => return false,
        },
    };
    if sd.is_zero() {
        return true;
    }
    if sd.degree() == 0 {
        return false;
    }
    let d_roots = match roots(&sd, 1e-10) {
        Ok(r) => r,
        Err(_) => return false,
    };
    p_roots.iter().any(|a| {
        d_roots
            .iter()
            .any(|b| (a - b).norm() <= 1e-4 * (1.0 + a.norm().max(b.norm())))
    })
}

fn push_dedup(points: &mut Vec<SpherePoint>, p: SpherePoint, tol: f64) {
    if !points.iter().any(|q| chordal_distance(q, &p) < tol) {
        points.push(p);
    }
}

/// Deterministic point ordering: finite points lexicographic by (re, im),
/// the point at infinity last.
pub fn sort_points(points: &mut [SpherePoint]) {
    points.sort_by(cmp_points);
}

pub fn cmp_points(a: &SpherePoint, b: &SpherePoint) -> std::cmp::Ordering {
    match (a.to_complex(), b.to_complex()) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (Some(_), None) => std::cmp::Ordering::Less,
        (Some(x), Some(y)) => x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal)),
    }
}

/// Best rational approximation p/q of x in [0, 1) with q <= max_den, by
/// continued fractions; `None` when no denominator gets within `tol`.
fn rational_approx(x: f64, max_den: u32, tol: f64) -> Option<(i64, u32)> {
    let (mut h0, mut k0, mut h1, mut k1) = (0i64, 1u64, 1i64, 0u64);
    let mut frac = x;
    for _ in 0..24 {
        let a = frac.floor() as i64;
        let h2 = a * h1 + h0;
        let k2 = (a as u64).saturating_mul(k1).saturating_add(k0);
        if k2 > max_den as u64 {
            break;
        }
        (h0, k0, h1, k1) = (h1, k1, h2, k2);
        if k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1 as u32));
        }
        let rem = frac - a as f64;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}
