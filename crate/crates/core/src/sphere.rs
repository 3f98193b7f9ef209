//! Riemann-sphere numerics: points with an infinity chart, the chordal
//! metric, and spherical rescaling of derivatives.
//!
//! A point is stored either in the main chart (coordinate `z`) or in the
//! inverted chart (coordinate `u` with `z = 1/u`, so `u = 0` is the point at
//! infinity). Points with `|z| > CHART_SWITCH` live in the inverted chart,
//! which keeps chart factors like `1 + |coord|^2` well conditioned.

use crate::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Modulus beyond which a coordinate is re-expressed in the other chart.
pub const CHART_SWITCH: f64 = 1e8;

#[derive(Clone, Copy, Debug)]
pub struct SpherePoint {
    coord: Complex,
    inverted: bool,
}

impl SpherePoint {
    /// Point with finite value `z` (stored in the inverted chart when huge).
    pub fn finite(z: Complex) -> Self {
        if z.norm_sqr() > CHART_SWITCH * CHART_SWITCH || !z.is_finite() {
            if z.is_finite() {
                SpherePoint {
                    coord: z.inv(),
                    inverted: true,
                }
            } else {
                SpherePoint::infinity()
            }
        } else {
            SpherePoint {
                coord: z,
                inverted: false,
            }
        }
    }

    pub fn infinity() -> Self {
        SpherePoint {
            coord: Complex::new(0.0, 0.0),
            inverted: true,
        }
    }

    /// Point given by its coordinate in the inverted chart (`z = 1/u`).
    pub fn from_inverted(u: Complex) -> Self {
        if u.norm_sqr() < 1.0 / (CHART_SWITCH * CHART_SWITCH) {
            SpherePoint {
                coord: u,
                inverted: true,
            }
        } else {
            SpherePoint::finite(u.inv())
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.inverted && self.coord.norm_sqr() == 0.0
    }

    /// Whether the stored coordinate lives in the inverted chart.
    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    /// Raw chart coordinate (meaning depends on `is_inverted`).
    pub fn coord(&self) -> Complex {
        self.coord
    }

    /// Finite value in the main chart; `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex> {
        if self.inverted {
            if self.is_infinity() {
                None
            } else {
                Some(self.coord.inv())
            }
        } else {
            Some(self.coord)
        }
    }

    /// Image under `z -> 1/z` with `0 <-> inf`. Involutive to the last ulp:
    /// the chart flag flips and only re-canonicalization may divide.
    pub fn invert_chart(&self) -> Self {
        let flipped = SpherePoint {
            coord: self.coord,
            inverted: !self.inverted,
        };
        flipped.canonicalized()
    }

    pub fn conj(&self) -> Self {
        SpherePoint {
            coord: self.coord.conj(),
            inverted: self.inverted,
        }
    }

    fn canonicalized(self) -> Self {
        if self.inverted {
            SpherePoint::from_inverted(self.coord)
        } else {
            SpherePoint::finite(self.coord)
        }
    }

    /// Embedding into the unit sphere in R^3; chordal distance is Euclidean
    /// distance between embedded points. Infinity maps to the north pole.
    pub fn embed3(&self) -> [f64; 3] {
        let n = self.coord.norm_sqr();
        let d = 1.0 + n;
        if self.inverted {
            [
                2.0 * self.coord.re / d,
                -2.0 * self.coord.im / d,
                (1.0 - n) / d,
            ]
        } else {
            [
                2.0 * self.coord.re / d,
                2.0 * self.coord.im / d,
                (n - 1.0) / d,
            ]
        }
    }

    /// Deterministic total order (by embedding, lexicographic). Used to fix
    /// branch indexing and output ordering.
    pub fn order_key(&self) -> [f64; 3] {
        self.embed3()
    }

    pub fn cmp_order(&self, other: &Self) -> std::cmp::Ordering {
        let a = self.order_key();
        let b = other.order_key();
        for i in 0..3 {
            match a[i].partial_cmp(&b[i]).unwrap_or(std::cmp::Ordering::Equal) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// Chordal distance `2|p - q| / (sqrt(1+|p|^2) sqrt(1+|q|^2))`, extended
/// continuously to infinity. Symmetric, bounded by 2.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let (a, b) = (p.coord, q.coord);
    let num = if p.inverted == q.inverted {
        // both main or both inverted: inversion is a chordal isometry
        2.0 * (a - b).norm()
    } else {
        // z-chart p vs inverted q: 2|p - 1/u| reduces to 2|p u - 1|
        2.0 * (a * b - Complex::new(1.0, 0.0)).norm()
    };
    num / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Rescale a chart derivative magnitude to the spherical metric:
/// `|Df|_sph = euclid_deriv * (1 + |z|^2) / (1 + |w|^2)` with each factor
/// taken in the chart the point is stored in.
pub fn spherical_scale(z: &SpherePoint, w: &SpherePoint, euclid_deriv: f64) -> f64 {
    euclid_deriv * (1.0 + z.coord.norm_sqr()) / (1.0 + w.coord.norm_sqr())
}

/// Spatial hash over the R^3 embedding. Cell size equals the query
/// radius, so a lookup only ever inspects the 27 neighboring cells.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    cell: f64,
    points: Vec<SpherePoint>,
    map: std::collections::HashMap<(i64, i64, i64), Vec<u32>>,
}

impl SphereGrid {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell must be positive");
        SphereGrid {
            cell,
            points: Vec::new(),
            map: std::collections::HashMap::new(),
        }
    }

    pub fn from_points<'a>(cell: f64, pts: impl IntoIterator<Item = &'a SpherePoint>) -> Self {
        let mut g = SphereGrid::new(cell);
        for p in pts {
            g.push(*p);
        }
        g
    }

    fn key(&self, p: &SpherePoint) -> (i64, i64, i64) {
        let e = p.embed3();
        (
            (e[0] / self.cell).floor() as i64,
            (e[1] / self.cell).floor() as i64,
            (e[2] / self.cell).floor() as i64,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<SpherePoint> {
        self.points
    }

    /// Unconditional insert.
    pub fn push(&mut self, p: SpherePoint) -> u32 {
        let idx = self.points.len() as u32;
        let key = self.key(&p);
        self.points.push(p);
        self.map.entry(key).or_default().push(idx);
        idx
    }

    /// Index and distance of the nearest stored point within `r`
    /// (requires `r <= cell`).
    pub fn nearest_within(&self, p: &SpherePoint, r: f64) -> Option<(u32, f64)> {
        debug_assert!(r <= self.cell * (1.0 + 1e-9));
        let (kx, ky, kz) = self.key(p);
        let mut best: Option<(u32, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.map.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &i in ids {
                            let d = chordal_distance(p, &self.points[i as usize]);
                            if d <= r && best.is_none_or(|(_, bd)| d < bd) {
                                best = Some((i, d));
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// Insert only when no stored point lies within `min_dist`; returns
    /// whether the point was inserted.
    pub fn insert_if_far(&mut self, p: SpherePoint, min_dist: f64) -> bool {
        if self.nearest_within(&p, min_dist).is_some() {
            return false;
        }
        self.push(p);
        true
    }
}

/// Spherically deduplicated point sample: pairwise chordal distance at
/// least `grid_res / 2`.
#[derive(Clone, Debug)]
pub struct PointCloud {
    pub points: Vec<SpherePoint>,
    pub grid_res: f64,
}

impl PointCloud {
    /// Deduplicate `pts` in order on a spherical grid of resolution
    /// `grid_res`.
    pub fn build(grid_res: f64, pts: impl IntoIterator<Item = SpherePoint>) -> Self {
        let mut grid = SphereGrid::new(grid_res.max(1e-300));
        for p in pts {
            grid.insert_if_far(p, grid_res / 2.0);
        }
        PointCloud {
            points: grid.into_points(),
            grid_res,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl PartialEq for SpherePoint {
    /// Exact equality of the canonical representation. Two points at
    /// infinity are equal: the sphere has one point there.
    fn eq(&self, other: &Self) -> bool {
        if self.is_infinity() || other.is_infinity() {
            return self.is_infinity() && other.is_infinity();
        }
        match (self.inverted, other.inverted) {
            (a, b) if a == b => self.coord == other.coord,
            _ => false,
        }
    }
}

impl std::fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_complex() {
            None => write!(f, "inf"),
            Some(z) => write!(f, "{}{}{}i", z.re, if z.im < 0.0 { "" } else { "+" }, z.im),
        }
    }
}

impl Serialize for SpherePoint {
    /// Finite point as `[re, im]`, infinity as the string `"inf"`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_complex() {
            None => s.serialize_str("inf"),
            Some(z) => [z.re, z.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Inf(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(d)? {
            Repr::Inf(s) if s == "inf" => Ok(SpherePoint::infinity()),
            Repr::Inf(s) => Err(D::Error::custom(format!("unknown point literal {s:?}"))),
            Repr::Pair([re, im]) => Ok(SpherePoint::finite(Complex::new(re, im))),
        }
    }
}
