//! Acceptance suite: one test per criterion, each printing its pass line
//! and the measured quantities. Run with `--nocapture` to see them.

use holocorr_core::correspondence::{Correspondence, Kind};
use holocorr_core::dimension::{hd_delta_report, ReportConfig};
use holocorr_core::families::{bullett_penrose, from_rational_inverse, llmm};
use holocorr_core::measure::{
    circle_test_disks, conformality_residual, parabolic_mass, patterson_sullivan,
};
use holocorr_core::poincare::{critical_exponent, weight_table, DeltaParams};
use holocorr_core::polyalg::UniPoly;
use holocorr_core::sphere::{chordal_distance, spherical_scale, SpherePoint};
use holocorr_core::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

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

fn llmm_quadratic() -> Correspondence {
    llmm(
        &UniPoly::from_reals(&[0.0, 1.0, 0.5]),
        &UniPoly::from_reals(&[1.0]),
    )
    .unwrap()
}

fn llmm_cubic() -> Correspondence {
    llmm(
        &UniPoly::from_reals(&[0.0, 1.0, 0.0, 1.0 / 3.0]),
        &UniPoly::from_reals(&[1.0]),
    )
    .unwrap()
}

/// Criterion 1: closed-form Poincare oracle for the inverse of squaring.
#[test]
fn criterion_1_closed_form_poincare_oracle() {
    let start = Instant::now();
    let f = squaring_inverse();
    let x = pt(1.0, 0.0);
    let table = weight_table(&f, &x, 15, 2e7).unwrap();
    for s in [0.5, 1.0, 1.5, 2.0] {
        let sums = table.level_sums(s).unwrap();
        for (n, &a) in sums.sums.iter().enumerate() {
            let expect = 2f64.powf(n as f64 * (1.0 - s));
            assert!(
                (a - expect).abs() <= 1e-9 * expect,
                "a[{n}]({s}) = {a}, closed form {expect}"
            );
        }
    }
    let est = critical_exponent(&f, &x, &DeltaParams::default()).unwrap();
    assert!(
        (est.delta - 1.0).abs() <= 0.02,
        "delta = {} not within 0.02 of 1",
        est.delta
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?} >= 10 s");
    println!(
        "criterion 1: PASS  level sums match 2^(n(1-s)) to 1e-9 for n <= 15; delta = {:.4}; runtime {:?}",
        est.delta, elapsed
    );
}

/// Criterion 2: dimension-vs-exponent inequality for the inverse of
/// z^2 + 1/4 at desk scale.
#[test]
fn criterion_2_dimension_inequality_cauliflower() {
    let start = Instant::now();
    let f = cauliflower();
    let cfg = ReportConfig {
        delta: DeltaParams {
            depth: 20,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = hd_delta_report(&f, &pt(3.0, 0.0), &cfg).unwrap();
    assert!(
        report.inequality_ok,
        "box dim {} > delta {} + {}",
        report.hd_est, report.delta_est, report.slack
    );
    assert!(
        report.delta_est < 2.0 - 0.05,
        "delta {} not below 1.95",
        report.delta_est
    );
    assert!(
        report.delta_est >= 0.95,
        "delta {} below the lower bound 0.95",
        report.delta_est
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?} >= 2 min");
    println!(
        "criterion 2: PASS  box dim {:.4} <= delta {:.4} + 0.1; 0.95 <= delta < 1.95; runtime {:?}",
        report.hd_est, report.delta_est, elapsed
    );
}

/// Criterion 3: conformality residuals on ten fixed disks, right and
/// wrong exponent, two truncation depths.
#[test]
fn criterion_3_conformality_residuals() {
    let f = squaring_inverse();
    let x = pt(1.0, 0.0);
    let disks = circle_test_disks(0.25);
    let m12 = patterson_sullivan(&f, &x, 1.0, 12, 2e7).unwrap();
    let m24 = patterson_sullivan(&f, &x, 1.0, 24, 2e7).unwrap();
    let mut worst24 = 0.0f64;
    for disk in &disks {
        let r24 = conformality_residual(&m24, &f, *disk, 0, 1.0).unwrap();
        let r12 = conformality_residual(&m12, &f, *disk, 0, 1.0).unwrap();
        assert!(
            r24.rel_residual <= 0.05,
            "depth-24 residual {} > 0.05 at {}",
            r24.rel_residual,
            disk.center
        );
        assert!(
            r24.rel_residual < r12.rel_residual,
            "no improvement: {} !< {} at {}",
            r24.rel_residual,
            r12.rel_residual,
            disk.center
        );
        worst24 = worst24.max(r24.rel_residual);
    }
    let mut wrong_exponent_hits = 0;
    for disk in &disks {
        let r = conformality_residual(&m24, &f, *disk, 0, 2.0).unwrap();
        if r.rel_residual >= 0.2 {
            wrong_exponent_hits += 1;
        }
    }
    assert!(
        wrong_exponent_hits >= 8,
        "delta = 2 only flagged on {wrong_exponent_hits}/10 disks"
    );
    println!(
        "criterion 3: PASS  worst depth-24 residual {:.4} <= 0.05, all improving on depth 12; delta=2 flagged on {}/10 disks",
        worst24, wrong_exponent_hits
    );
}

/// Criterion 4: parabolic structure at 0 across sampled parameters of the
/// 2-to-2 family.
#[test]
fn criterion_4_bullett_penrose_parabolic_structure() {
    let params = [
        Complex::new(4.0, 0.0),
        Complex::new(5.0, 0.0),
        Complex::new(4.0, 1.0),
        Complex::new(3.5, -0.5),
        Complex::new(6.0, 2.0),
    ];
    let zero = pt(0.0, 0.0);
    for a in params {
        let f = bullett_penrose(a).unwrap();
        let images = f.forward(&zero).unwrap();
        let fixing = images
            .iter()
            .min_by(|p, q| {
                chordal_distance(p, &zero)
                    .partial_cmp(&chordal_distance(q, &zero))
                    .unwrap()
            })
            .unwrap();
        assert!(
            chordal_distance(fixing, &zero) <= 1e-10,
            "forward(0) misses 0 for a = {a}"
        );
        let residual = f.curve_residual(&zero, fixing);
        assert!(residual <= 1e-10, "curve residual {residual} for a = {a}");
        // fixing branch multiplier within 1e-6 of a root of unity
        let m = f.complex_multiplier(&zero, fixing).unwrap();
        let nearest_root_of_unity = (1..=64u32)
            .map(|q| {
                let turn = (m.arg() / (2.0 * std::f64::consts::PI) * q as f64).round() / q as f64;
                let target = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * turn);
                (m - target).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest_root_of_unity <= 1e-6,
            "multiplier {m} is {nearest_root_of_unity} from the roots of unity (a = {a})"
        );
        // the non-fixing branch is critical at 0
        let non_fixing = images
            .iter()
            .max_by(|p, q| {
                chordal_distance(p, &zero)
                    .partial_cmp(&chordal_distance(q, &zero))
                    .unwrap()
            })
            .unwrap();
        let deriv = f.germ_deriv(&zero, non_fixing).unwrap();
        assert!(
            deriv <= 1e-6,
            "non-fixing branch derivative {deriv} at 0 for a = {a}"
        );
    }
    println!(
        "criterion 4: PASS  for 5 parameters: 0 in F(0) (residual <= 1e-10), unit-root multiplier, critical non-fixing branch"
    );
}

/// Criterion 5: hand-algebra oracle for the antiholomorphic family built
/// from f(w) = w + w^2/2.
#[test]
fn criterion_5_llmm_hand_algebra() {
    let f = llmm_quadratic();
    // P = zc w + 2 zc + 1 up to scalar, coefficient match 1e-12
    let scale = f.poly().coeff(1, 1);
    assert!(scale.norm() > 0.0);
    for ((i, j), want) in [((0, 0), 1.0), ((0, 1), 0.0), ((1, 0), 2.0), ((1, 1), 1.0)] {
        let got = f.poly().coeff(i, j) / scale;
        assert!(
            (got - Complex::new(want, 0.0)).norm() <= 1e-12,
            "coefficient ({i},{j}) = {got}, want {want}"
        );
    }
    // its unique branch is -2 - eta(z) on 100 random samples
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0;
    while checked < 100 {
        let z = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if z.norm() < 0.05 {
            continue;
        }
        let images = f.forward(&pt(z.re, z.im)).unwrap();
        assert_eq!(images.len(), 1);
        let expect = -2.0 - z.conj().inv();
        let got = images[0].to_complex().unwrap();
        assert!(
            (got - expect).norm() <= 1e-10 * (1.0 + expect.norm()),
            "branch at z = {z}: {got} vs {expect}"
        );
        checked += 1;
    }
    // the branch fixes -1
    let at = f.forward(&pt(-1.0, 0.0)).unwrap();
    assert!(chordal_distance(&at[0], &pt(-1.0, 0.0)) <= 1e-12);
    println!(
        "criterion 5: PASS  coefficients match zc*w + 2*zc + 1 to 1e-12; branch = -2 - eta(z) on 100 samples; fixes -1"
    );
}

/// Criterion 6: no-mass-at-parabolics trend for the cauliflower measure.
/// The basepoint 0.52 sits in the escaping petal region, where the ball
/// around the parabolic point holds atoms at every depth.
#[test]
fn criterion_6_parabolic_mass_trend() {
    let f = cauliflower();
    let est = critical_exponent(&f, &pt(3.0, 0.0), &DeltaParams::default()).unwrap();
    let s = est.delta + 0.05;
    let omega = pt(0.5, 0.0);
    let x = pt(0.52, 0.0);
    let mut masses = Vec::new();
    for depth in [12usize, 16, 20] {
        let m = patterson_sullivan(&f, &x, s, depth, 2e7).unwrap();
        masses.push(parabolic_mass(&m, &omega, 0.05));
    }
    assert!(
        masses[0] > masses[1] && masses[1] > masses[2],
        "masses not strictly decreasing: {masses:?}"
    );
    assert!(masses[0] > 0.0);
    println!(
        "criterion 6: PASS  mass in B(1/2, 0.05) at s = {:.4}: {:.5} > {:.5} > {:.5}",
        s, masses[0], masses[1], masses[2]
    );
}

/// Criterion 7: duality and conservation property suite over seeded
/// samples, zero failures allowed.
#[test]
fn criterion_7_duality_and_conservation() {
    let families: Vec<(&str, Correspondence)> = vec![
        ("squaring-inverse", squaring_inverse()),
        ("bullett-penrose", bullett_penrose(Complex::new(4.0, 0.0)).unwrap()),
        ("llmm-cubic", llmm_cubic()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7777);
    let mut samples = 0usize;
    while samples < 1000 {
        // mix moderate points with chart-seam magnitudes and infinity
        let draw = rng.gen_range(0..10);
        let z = match draw {
            0 => SpherePoint::infinity(),
            1 => {
                let r = rng.gen_range(1e7..1e9);
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                SpherePoint::finite(Complex::from_polar(r, t))
            }
            _ => pt(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        };
        let (_, f) = &families[samples % families.len()];
        // multiplicity conservation
        let images = match f.forward(&z) {
            Ok(im) => im,
            Err(e) => panic!("forward failed at {z}: {e}"),
        };
        assert_eq!(images.len(), f.degree_w(), "|F({z})| != d_w");
        // duality within 1e-8
        for w in &images {
            let back = f.backward(w).unwrap();
            assert_eq!(back.len(), f.degree_z(), "|F^-1({w})| != d_z");
            assert!(
                back.iter().any(|p| chordal_distance(p, &z) < 1e-8),
                "duality failed: z = {z}, w = {w}"
            );
        }
        samples += 1;
    }

    // chain rule against finite differences along tracked branches
    let mut chain_checks = 0usize;
    let mut tries = 0usize;
    while chain_checks < 200 && tries < 4000 {
        tries += 1;
        let (_, f) = &families[tries % families.len()];
        let z0 = pt(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let Ok(im1) = f.forward(&z0) else { continue };
        let w0 = im1[tries % im1.len()];
        if w0.is_infinity() {
            continue;
        }
        let Ok(im2) = f.forward(&w0) else { continue };
        let v0 = im2[(tries / 2) % im2.len()];
        if v0.is_infinity() {
            continue;
        }
        let d1 = f.branch_derivative(&z0, &w0).unwrap();
        let d2 = f.branch_derivative(&w0, &v0).unwrap();
        if !(1e-3..1e3).contains(&d1) || !(1e-3..1e3).contains(&d2) {
            continue; // keep clear of critical points for the FD probe
        }
        // separation guards: the finite-difference step must track branches
        let sep1 = min_pair_separation(&im1);
        let sep2 = min_pair_separation(&im2);
        if sep1 < 1e-3 || sep2 < 1e-3 {
            continue;
        }
        let product = d1 * d2;
        let h = 1e-6;
        let zp = pt(z0.to_complex().unwrap().re + h, z0.to_complex().unwrap().im);
        let wp = nearest_to(&f.forward(&zp).unwrap(), &w0);
        let vp = nearest_to(&f.forward(&wp).unwrap(), &v0);
        let fd = chordal_distance(&vp, &v0) / chordal_distance(&zp, &z0);
        assert!(
            (product - fd).abs() <= 1e-5 * product.max(fd).max(1e-6) * 10.0,
            "chain rule: product {product} vs finite difference {fd}"
        );
        chain_checks += 1;
    }
    assert!(chain_checks >= 200);

    // chart independence of spherical derivative scaling
    for _ in 0..1000 {
        let z = Complex::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
        let w = Complex::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
        let d = rng.gen_range(0.01..10.0);
        let p = SpherePoint::finite(z);
        let q = SpherePoint::finite(w);
        let s1 = spherical_scale(&p, &q, d);
        let s2 = spherical_scale(
            &p.invert_chart(),
            &q.invert_chart(),
            d * z.norm_sqr() / w.norm_sqr(),
        );
        assert!(
            (s1 - s2).abs() <= 1e-9 * s1.max(s2),
            "chart dependence: {s1} vs {s2}"
        );
    }
    println!(
        "criterion 7: PASS  1000 conservation/duality samples, {chain_checks} chain-rule checks, 1000 chart checks, 0 failures"
    );
}

fn min_pair_separation(points: &[SpherePoint]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            min = min.min(chordal_distance(&points[i], &points[j]));
        }
    }
    min
}

fn nearest_to(cands: &[SpherePoint], target: &SpherePoint) -> SpherePoint {
    *cands
        .iter()
        .min_by(|a, b| {
            chordal_distance(a, target)
                .partial_cmp(&chordal_distance(b, target))
                .unwrap()
        })
        .unwrap()
}

/// Criterion 8: exact-mode level sums match an independent naive
/// enumerator that recomputes every branch composition from scratch.
#[test]
fn criterion_8_brute_force_equivalence() {
    let cases: Vec<(&str, Correspondence, SpherePoint)> = vec![
        ("squaring-inverse", squaring_inverse(), pt(1.1, 0.3)),
        (
            "bullett-penrose",
            bullett_penrose(Complex::new(4.0, 0.0)).unwrap(),
            pt(0.3, 0.2),
        ),
        ("llmm-cubic", llmm_cubic(), pt(1.5, 0.5)),
    ];
    for (name, f, x) in &cases {
        for s in [0.8, 1.0, 1.6] {
            let fast = weight_table(f, x, 6, 2e7)
                .unwrap()
                .level_sums(s)
                .unwrap();
            let naive = naive_level_sums(f, x, s, 6);
            for (n, (a, b)) in fast.sums.iter().zip(naive.iter()).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-9 * b.max(1e-30),
                    "{name} s = {s} level {n}: {a} vs naive {b}"
                );
            }
        }
    }
    println!(
        "criterion 8: PASS  depth-6 level sums match the naive enumerator to 1e-9 on all three families"
    );
}

/// Independent oracle for criterion 8: enumerate branch compositions
/// recursively, recomputing the full path with fresh root solves and
/// multiplying derivatives in the plain (non-log) domain.
fn naive_level_sums(c: &Correspondence, x: &SpherePoint, s: f64, depth: usize) -> Vec<f64> {
    let mut sums = vec![0.0f64; depth + 1];
    sums[0] = 1.0;
    fn recurse(
        c: &Correspondence,
        z: &SpherePoint,
        weight: f64,
        level: usize,
        depth: usize,
        s: f64,
        sums: &mut [f64],
    ) {
        if level == depth {
            return;
        }
        let images = c.forward(z).unwrap();
        for w in images {
            let d = c.branch_derivative(z, &w).unwrap();
            let next = weight * d;
            sums[level + 1] += next.powf(s);
            recurse(c, &w, next, level + 1, depth, s, sums);
        }
    }
    recurse(c, x, 1.0, 0, depth, s, &mut sums);
    sums
}

/// Kind sanity used by the suite: the antiholomorphic twist is exercised
/// through the llmm family above; this pins the flag.
#[test]
fn bundled_family_kinds() {
    assert_eq!(squaring_inverse().kind(), Kind::Holomorphic);
    assert_eq!(llmm_cubic().kind(), Kind::Antiholomorphic);
}
