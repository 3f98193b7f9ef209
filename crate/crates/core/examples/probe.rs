use holocorr_core::families::from_rational_inverse;
use holocorr_core::measure::*;
use holocorr_core::polyalg::UniPoly;
use holocorr_core::sphere::SpherePoint;
use holocorr_core::Complex;

fn main() {
    let f = from_rational_inverse(
        &UniPoly::from_reals(&[0.0, 0.0, 1.0]),
        &UniPoly::from_reals(&[1.0]),
    )
    .unwrap();
    let x = SpherePoint::finite(Complex::new(1.0, 0.0));
    let m24 = patterson_sullivan(&f, &x, 1.0, 24, 2e7).unwrap();
    for radius in [0.2f64, 0.3, 0.35, 0.4] {
        let disks = circle_test_disks(radius);
        let mut worst: f64 = 0.0;
        for d in &disks {
            for b in 0..2 {
                let r = conformality_residual(&m24, &f, *d, b, 1.0).unwrap();
                worst = worst.max(r.rel_residual);
            }
        }
        println!("radius {radius}: worst residual over 10 disks x 2 branches = {worst:.5}");
    }
}
