//! Constructors for the three bundled correspondence classes: inverses of
//! rational maps, the 2-to-2 family with a parabolic fixed point at 0, and
//! the antiholomorphic d-to-d family built from a rational map univalent on
//! the closed disk.

use crate::correspondence::{Correspondence, Kind, Metadata};
use crate::error::{Error, Result};
use crate::polyalg::{divide_exact_w_minus_u, roots, BiPoly, UniPoly};
use crate::Complex;

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}

/// The correspondence `F = R^{-1}` for the rational map `R = p/q`:
/// `P(z, w) = p(w) - z q(w)`, so `forward(z)` solves `R(w) = z`.
pub fn from_rational_inverse(p: &UniPoly, q: &UniPoly) -> Result<Correspondence> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegenerateFamily {
            reason: "numerator and denominator must be nonzero".into(),
        });
    }
    if p.degree().max(q.degree()) < 1 {
        return Err(Error::DegreeTooLow { min: 1, got: 0 });
    }
    // common factors collapse the curve; check numerically
    if p.degree() >= 1 && q.degree() >= 1 {
        let proots = roots(p, 1e-12)?;
        let qroots = roots(q, 1e-12)?;
        for a in &proots {
            if let Some(b) = qroots
                .iter()
                .find(|b| (a - *b).norm() < 1e-8 * (1.0 + a.norm()))
            {
                return Err(Error::CommonRoot { root: *b });
            }
        }
    }
    let dw = p.degree().max(q.degree());
    let mut grid = vec![vec![Complex::new(0.0, 0.0); dw + 1]; 2];
    for (j, c) in p.coeffs.iter().enumerate() {
        grid[0][j] = *c;
    }
    for (j, c) in q.coeffs.iter().enumerate() {
        grid[1][j] = -c;
    }
    let mut metadata = Metadata {
        family: "rational-inverse".into(),
        ..Default::default()
    };
    metadata.params.insert("p".into(), coeffs_json(&p.coeffs));
    metadata.params.insert("q".into(), coeffs_json(&q.coeffs));
    Correspondence::with_metadata(BiPoly::new(grid), Kind::Holomorphic, metadata)
}

/// The 2-to-2 family
/// `((aw-1)/(w-1))^2 + ((aw-1)/(w-1))((az+1)/(z+1)) + ((az+1)/(z+1))^2 = 3`
/// with denominators cleared. Every member fixes 0, with multiplier 1 on
/// the fixing branch and a critical non-fixing branch there.
pub fn bullett_penrose(a: Complex) -> Result<Correspondence> {
    let aw1 = BiPoly::new(vec![vec![-one(), a]]);
    let wm1 = BiPoly::new(vec![vec![-one(), one()]]);
    let az1 = BiPoly::new(vec![vec![one()], vec![a]]);
    let zp1 = BiPoly::new(vec![vec![one()], vec![one()]]);
    let term1 = aw1.mul(&aw1).mul(&zp1).mul(&zp1);
    let term2 = aw1.mul(&wm1).mul(&az1).mul(&zp1);
    let term3 = az1.mul(&az1).mul(&wm1).mul(&wm1);
    let term4 = wm1.mul(&wm1).mul(&zp1).mul(&zp1);
    let p = term1
        .add_scaled(&term2, one())
        .add_scaled(&term3, one())
        .add_scaled(&term4, Complex::new(-3.0, 0.0));
    if p.is_zero() {
        return Err(Error::DegenerateFamily {
            reason: format!("parameter a = {a} collapses the curve"),
        });
    }
    let mut metadata = Metadata {
        family: "bullett-penrose".into(),
        ..Default::default()
    };
    metadata
        .params
        .insert("a".into(), serde_json::json!([a.re, a.im]));
    let p = strip_known_content(
        p,
        &[
            (UniPoly::new(vec![one(), one()]), true, "z=-1"),
            (UniPoly::new(vec![-one(), one()]), false, "w=1"),
        ],
        &mut metadata,
    );
    if p.degree_z() != 2 || p.degree_w() != 2 {
        return Err(Error::DegenerateFamily {
            reason: format!(
                "parameter a = {a} collapses the degrees to ({}, {})",
                p.degree_z(),
                p.degree_w()
            ),
        });
    }
    Correspondence::with_metadata(p, Kind::Holomorphic, metadata)
}

/// The antiholomorphic correspondence attached to a rational `f = p/q` of
/// degree d+1 >= 2: delete the trivial root from `f(w) - f(eta(z))`,
/// `eta(z) = 1/conj(z)`, and clear denominators. Univalence of `f` on the
/// closed disk is the caller's responsibility; see
/// [`univalence_diagnostic`] for a sampling check.
pub fn llmm(p: &UniPoly, q: &UniPoly) -> Result<Correspondence> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegenerateFamily {
            reason: "numerator and denominator must be nonzero".into(),
        });
    }
    let degree = p.degree().max(q.degree());
    if degree < 2 {
        return Err(Error::DegreeTooLow {
            min: 2,
            got: degree,
        });
    }
    // N(u, w) = p(w) q(u) - p(u) q(w), exactly divisible by (w - u)
    let n = row_poly(p)
        .mul(&col_poly(q))
        .add_scaled(&col_poly(p).mul(&row_poly(q)), -one());
    let quotient = divide_exact_w_minus_u(&n).map_err(|e| match e {
        Error::NotDivisible { .. } => Error::DegenerateFamily {
            reason: "f(w) - f(u) is not divisible by (w - u); malformed rational map".into(),
        },
        other => other,
    })?;
    // substitute u = 1/zc and clear denominators: row reversal
    let cleared = quotient.flip_z();
    let mut metadata = Metadata {
        family: "llmm".into(),
        ..Default::default()
    };
    metadata.params.insert("p".into(), coeffs_json(&p.coeffs));
    metadata.params.insert("q".into(), coeffs_json(&q.coeffs));
    let cleared = strip_known_content(
        cleared,
        &[(
            UniPoly::new(vec![Complex::new(0.0, 0.0), one()]),
            true,
            "zc=0",
        )],
        &mut metadata,
    );
    Correspondence::with_metadata(cleared, Kind::Antiholomorphic, metadata)
}

/// Pairwise-injectivity sample check of `f = p/q` on the unit circle.
/// Returns the smallest image separation over all sampled pairs; exact
/// univalence testing is out of numeric reach.
pub fn univalence_diagnostic(p: &UniPoly, q: &UniPoly, n_samples: usize) -> f64 {
    let f = |z: Complex| p.eval(z) / q.eval(z);
    let mut pts = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n_samples as f64;
        pts.push(f(Complex::from_polar(1.0, t)));
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            min_sep = min_sep.min((pts[i] - pts[j]).norm());
        }
    }
    min_sep
}

/// Divide out the listed content factors while they divide exactly,
/// recording each removal. Spurious lines introduced by denominator
/// clearing corrupt forward images at isolated points.
fn strip_known_content(
    mut p: BiPoly,
    factors: &[(UniPoly, bool, &str)],
    metadata: &mut Metadata,
) -> BiPoly {
    loop {
        let mut removed_any = false;
        for (factor, in_z, name) in factors {
            let divided = if *in_z {
                p.divide_z_content(factor)
            } else {
                p.divide_w_content(factor)
            };
            if let Some(q) = divided {
                p = q;
                metadata.removed_content.push((*name).into());
                removed_any = true;
            }
        }
        if !removed_any {
            return p;
        }
    }
}

/// `p(w)` as a BiPoly living in the w-slot.
fn row_poly(p: &UniPoly) -> BiPoly {
    BiPoly::new(vec![p.coeffs.clone()])
}

/// `p(u)` as a BiPoly living in the z-slot.
fn col_poly(p: &UniPoly) -> BiPoly {
    BiPoly::new(p.coeffs.iter().map(|c| vec![*c]).collect())
}

fn coeffs_json(coeffs: &[Complex]) -> serde_json::Value {
    serde_json::Value::Array(
        coeffs
            .iter()
            .map(|c| serde_json::json!([c.re, c.im]))
            .collect(),
    )
}
