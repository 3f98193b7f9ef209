//! Numerical engine for iterating (anti)holomorphic correspondences on the
//! Riemann sphere.
//!
//! A correspondence is the multivalued map `F: z -> w` cut out by a bivariate
//! polynomial relation `P(z, w) = 0` (or `P(conj z, w) = 0` in the
//! antiholomorphic case). This crate computes forward/backward images and
//! branch derivatives in the spherical metric, expands orbit trees, extracts
//! forward limit sets, evaluates Poincare series and estimates the critical
//! exponent, builds atomic conformal-measure approximations with conformality
//! and parabolic diagnostics, and estimates box-counting dimension.

pub mod correspondence;
pub mod dimension;
pub mod error;
pub mod families;
pub mod io;
pub mod measure;
pub mod numeric;
pub mod orbits;
pub mod parse;
pub mod poincare;
pub mod polyalg;
pub mod sphere;

pub use correspondence::{Correspondence, Kind};
pub use error::{Error, Result};
pub use polyalg::{BiPoly, UniPoly};
pub use sphere::SpherePoint;

pub type Complex = num_complex::Complex<f64>;
