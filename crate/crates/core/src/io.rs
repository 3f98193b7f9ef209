//! File encodings: cloud CSV, rho-sample CSV, PGM rasters, and the
//! correspondence JSON envelope. All encoders are byte-deterministic.

use crate::correspondence::{Correspondence, Kind, Metadata};
use crate::error::Result;
use crate::orbits::Raster;
use crate::polyalg::BiPoly;
use crate::sphere::PointCloud;
use serde::{Deserialize, Serialize};

/// Cloud CSV: `re,im` rows; points at infinity are omitted and counted in
/// the header comment.
pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut omitted = 0usize;
    let mut body = String::new();
    for p in &cloud.points {
        match p.to_complex() {
            Some(z) => {
                body.push_str(&format!("{:?},{:?}\n", z.re, z.im));
            }
            None => omitted += 1,
        }
    }
    format!("# omitted_at_infinity: {omitted}\nre,im\n{body}")
}

/// `(s, rho)` samples as CSV.
pub fn rho_samples_to_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("s,rho\n");
    for (s, rho) in samples {
        out.push_str(&format!("{s:?},{rho:?}\n"));
    }
    out
}

/// Binary PGM (P5), maxval 255, row-major from the top-left.
pub fn raster_to_pgm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend_from_slice(&raster.pixels);
    out
}

/// JSON envelope for a correspondence:
/// `{ "kind": "holo"|"anti", "poly": BiPoly, "family": string, "params": object }`.
#[derive(Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub kind: Kind,
    pub poly: BiPoly,
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

pub fn correspondence_to_json(c: &Correspondence) -> CorrespondenceJson {
    CorrespondenceJson {
        kind: c.kind(),
        poly: c.poly().clone(),
        family: c.metadata().family.clone(),
        params: c.metadata().params.clone(),
    }
}

pub fn correspondence_from_json(j: CorrespondenceJson) -> Result<Correspondence> {
    Correspondence::with_metadata(
        j.poly,
        j.kind,
        Metadata {
            family: j.family,
            params: j.params,
            ..Default::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SpherePoint;
    use crate::Complex;

    #[test]
    fn csv_counts_infinities() {
        let cloud = PointCloud {
            points: vec![
                SpherePoint::finite(Complex::new(1.5, -0.25)),
                SpherePoint::infinity(),
                SpherePoint::finite(Complex::new(0.0, 2.0)),
            ],
            grid_res: 1e-3,
        };
        let csv = cloud_to_csv(&cloud);
        assert!(csv.starts_with("# omitted_at_infinity: 1\nre,im\n"));
        assert!(csv.contains("1.5,-0.25\n"));
        assert!(csv.contains("0.0,2.0\n"));
    }

    #[test]
    fn pgm_header_is_exact() {
        let raster = Raster {
            width: 3,
            height: 2,
            pixels: vec![0, 255, 0, 255, 0, 255],
        };
        let bytes = raster_to_pgm(&raster);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 6);
    }

    #[test]
    fn correspondence_json_round_trip() {
        let f = crate::families::bullett_penrose(Complex::new(4.0, 0.0)).unwrap();
        let j = correspondence_to_json(&f);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"kind\":\"holo\""));
        assert!(text.contains("\"family\":\"bullett-penrose\""));
        let parsed: CorrespondenceJson = serde_json::from_str(&text).unwrap();
        let back = correspondence_from_json(parsed).unwrap();
        assert_eq!(back.degree_z(), 2);
        assert_eq!(back.degree_w(), 2);
        let d = back
            .poly()
            .add_scaled(f.poly(), Complex::new(-1.0, 0.0));
        assert!(d.scale() <= 1e-12 * f.poly().scale());
    }
}
