//! Poincare series evaluation and critical-exponent estimation.
//!
//! The series is summed level by level: `a[n](s)` adds `|Df|^s` over every
//! branch of the n-th iterate at the basepoint. The critical exponent is
//! located as the root of the fitted tail growth rate `rho(s) = 1`: partial
//! sums cannot witness divergence, the growth rate can.

use crate::correspondence::{Correspondence, PointClass};
use crate::error::{Error, Result};
use crate::numeric::{linear_fit, pairwise_sum};
use crate::orbits::{expand_visit, ExpandMode};
use crate::sphere::{chordal_distance, SpherePoint};
use serde::Serialize;

/// Basepoints whose orbit passes this close to a parabolic point are
/// rejected: their Poincare series diverges for every exponent.
pub const PARABOLIC_GUARD_RADIUS: f64 = 1e-9;

/// Log-domain branch weights of an exact expansion, one vector per level.
/// Level sums for any exponent are cheap to evaluate from this.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub log_weights: Vec<Vec<f64>>,
}

/// Per-level sums `a[n] = sum_j |Df_{n,j}(x)|^s`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSums {
    pub s: f64,
    pub sums: Vec<f64>,
}

/// Tail growth rate of the level sums.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhoEstimate {
    pub rho: f64,
    pub r2: f64,
    pub tail_levels: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub bracket: [f64; 2],
    pub rho_at_delta: f64,
    pub depth: usize,
    /// Regression quality of the tail fit at delta. Polynomially modulated
    /// tails (parabolic points) degrade this; callers should judge.
    pub fit_r2: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct DeltaParams {
    pub s_lo: f64,
    pub s_hi: f64,
    pub tol: f64,
    pub depth: usize,
    pub budget: f64,
    pub tail_fraction: f64,
    /// Bracket endpoints must clear 1 by this much.
    pub margin: f64,
}

impl Default for DeltaParams {
    fn default() -> Self {
        DeltaParams {
            s_lo: 0.5,
            s_hi: 1.8,
            tol: 0.02,
            // about 2.6e5 leaf nodes at d_w = 2
            depth: 18,
            budget: 2e7,
            tail_fraction: 0.5,
            margin: 0.005,
        }
    }
}

/// Expand exactly to `depth` and record the log-weights, guarding against
/// orbits that land on any of `guard` (within [`PARABOLIC_GUARD_RADIUS`]).
pub fn weight_table_guarded(
    c: &Correspondence,
    x: &SpherePoint,
    depth: usize,
    budget: f64,
    guard: &[SpherePoint],
) -> Result<WeightTable> {
    let mut log_weights = Vec::with_capacity(depth + 1);
    expand_visit(c, x, depth, ExpandMode::Exact { budget }, |level| {
        for node in &level.nodes {
            for g in guard {
                if chordal_distance(&node.point, g) < PARABOLIC_GUARD_RADIUS {
                    return Err(Error::BasepointRejected {
                        reason: format!(
                            "orbit lands on the parabolic point {g} at level {}",
                            level.depth
                        ),
                    });
                }
            }
        }
        log_weights.push(level.nodes.iter().map(|n| n.log_weight).collect());
        Ok(())
    })?;
    Ok(WeightTable { log_weights })
}

pub fn weight_table(
    c: &Correspondence,
    x: &SpherePoint,
    depth: usize,
    budget: f64,
) -> Result<WeightTable> {
    weight_table_guarded(c, x, depth, budget, &[])
}

impl WeightTable {
    pub fn depth(&self) -> usize {
        self.log_weights.len().saturating_sub(1)
    }

    /// `a[n](s)` for all levels. Errors when a branch weight is infinite
    /// (the orbit met a point with `P_w = 0`).
    pub fn level_sums(&self, s: f64) -> Result<LevelSums> {
        self.sums_with_exponent(|_| s).map(|sums| LevelSums { s, sums })
    }

    /// Level sums with the two-regime exponent schedule: `2 delta - s`
    /// below the threshold level `h(1/(s - delta))`, `s` from there on.
    /// The schedule forces divergence at the critical exponent when the
    /// plain series converges there; `h` stays caller-supplied because no
    /// concrete growth wins in general.
    pub fn modified_level_sums(
        &self,
        s: f64,
        delta: f64,
        h: impl Fn(f64) -> usize,
    ) -> Result<LevelSums> {
        let threshold = h(1.0 / (s - delta));
        let low = 2.0 * delta - s;
        self.sums_with_exponent(|n| if n < threshold { low } else { s })
            .map(|sums| LevelSums { s, sums })
    }

    fn sums_with_exponent(&self, exponent: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
        let mut sums = Vec::with_capacity(self.log_weights.len());
        for (n, level) in self.log_weights.iter().enumerate() {
            let t = exponent(n);
            let terms: Vec<f64> = level.iter().map(|lw| (t * lw).exp()).collect();
            if terms.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteWeight { level: n });
            }
            sums.push(pairwise_sum(&terms));
        }
        Ok(sums)
    }
}

/// Convenience wrapper: expand and sum in one call.
pub fn level_sums(
    c: &Correspondence,
    x: &SpherePoint,
    s: f64,
    depth: usize,
    budget: f64,
) -> Result<LevelSums> {
    if s <= 0.0 {
        return Err(Error::invalid("level_sums", "exponent s must be positive"));
    }
    weight_table(c, x, depth, budget)?.level_sums(s)
}

/// Partial Poincare sum over levels `0..=depth`.
pub fn poincare_partial_sum(
    c: &Correspondence,
    x: &SpherePoint,
    s: f64,
    depth: usize,
    budget: f64,
) -> Result<f64> {
    let ls = level_sums(c, x, s, depth, budget)?;
    Ok(pairwise_sum(&ls.sums))
}

/// Tail growth rate: slope of the least-squares fit of `log a[n]` against
/// `n` over the last `tail_fraction` of levels, exponentiated. A value
/// below 1 indicates convergence of the series.
pub fn growth_rate(ls: &LevelSums, tail_fraction: f64) -> Result<RhoEstimate> {
    let len = ls.sums.len();
    let tail = ((len as f64 * tail_fraction).ceil() as usize).clamp(4, len);
    if len < 4 || tail < 4 {
        return Err(Error::TailTooShort {
            needed: 4,
            got: len.min(tail),
        });
    }
    let start = len - tail;
    if ls.sums[start..].iter().any(|&v| v <= 0.0) {
        return Err(Error::ZeroTail);
    }
    let xs: Vec<f64> = (start..len).map(|n| n as f64).collect();
    let ys: Vec<f64> = ls.sums[start..].iter().map(|v| v.ln()).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    Ok(RhoEstimate {
        rho: slope.exp(),
        r2,
        tail_levels: tail,
    })
}

/// Locate the critical exponent as the root of `rho(s) = 1` by bisection.
///
/// Preconditions checked: the bracket must straddle 1 with `margin`, the
/// basepoint orbit must stay clear of parabolic fixed points, and `rho`
/// must behave monotonically on the samples taken (violations abort with
/// the offending samples).
pub fn critical_exponent(
    c: &Correspondence,
    x: &SpherePoint,
    params: &DeltaParams,
) -> Result<DeltaEstimate> {
    if params.s_lo <= 0.0 || params.s_hi <= params.s_lo {
        return Err(Error::invalid(
            "critical_exponent",
            "need 0 < s_lo < s_hi",
        ));
    }
    let guard: Vec<SpherePoint> = c
        .fixed_points()?
        .into_iter()
        .filter(|fp| fp.class == PointClass::Indifferent)
        .map(|fp| fp.point)
        .collect();
    let table = weight_table_guarded(c, x, params.depth, params.budget, &guard)?;
    let rho_of = |s: f64| -> Result<RhoEstimate> {
        growth_rate(&table.level_sums(s)?, params.tail_fraction)
    };
    let lo_est = rho_of(params.s_lo)?;
    let hi_est = rho_of(params.s_hi)?;
    if lo_est.rho <= 1.0 + params.margin || hi_est.rho >= 1.0 - params.margin {
        return Err(Error::InvalidBracket {
            s_lo: params.s_lo,
            rho_lo: lo_est.rho,
            s_hi: params.s_hi,
            rho_hi: hi_est.rho,
        });
    }
    let mut lo = (params.s_lo, lo_est.rho);
    let mut hi = (params.s_hi, hi_est.rho);
    let mut mid_est = lo_est;
    let mono_slack = 1e-9;
    while hi.0 - lo.0 > params.tol {
        let mid = 0.5 * (lo.0 + hi.0);
        mid_est = rho_of(mid)?;
        // rho must stay between the bracket values: branch derivatives on
        // the attractor side are below 1, making level sums decreasing in s
        if mid_est.rho > lo.1 + mono_slack || mid_est.rho < hi.1 - mono_slack {
            return Err(Error::NonMonotoneRho {
                samples: vec![lo, (mid, mid_est.rho), hi],
            });
        }
        if mid_est.rho >= 1.0 {
            lo = (mid, mid_est.rho);
        } else {
            hi = (mid, mid_est.rho);
        }
    }
    let delta = 0.5 * (lo.0 + hi.0);
    let at_delta = rho_of(delta)?;
    Ok(DeltaEstimate {
        delta,
        bracket: [lo.0, hi.0],
        rho_at_delta: at_delta.rho,
        depth: params.depth,
        fit_r2: at_delta.r2,
        rho_lo: mid_est.rho.max(lo.1),
        rho_hi: hi.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::from_rational_inverse;
    use crate::polyalg::{BiPoly, UniPoly};
    use crate::{Complex, Kind};

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

    fn conj_corr() -> Correspondence {
        let p = BiPoly::new(vec![
            vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            vec![Complex::new(-1.0, 0.0), Complex::new(0.0, 0.0)],
        ]);
        Correspondence::new(p, Kind::Antiholomorphic).unwrap()
    }

    #[test]
    fn closed_form_level_sums() {
        // a[n](s) = 2^(n (1-s)) for the inverse of squaring at x = 1
        let f = squaring_inverse();
        let table = weight_table(&f, &pt(1.0, 0.0), 12, 2e7).unwrap();
        for s in [0.5, 1.0, 1.5, 2.0] {
            let ls = table.level_sums(s).unwrap();
            assert_eq!(ls.sums[0], 1.0);
            for (n, &a) in ls.sums.iter().enumerate() {
                let expect = 2f64.powf(n as f64 * (1.0 - s));
                assert!(
                    (a - expect).abs() <= 1e-9 * expect,
                    "a[{n}]({s}) = {a}, want {expect}"
                );
            }
        }
        // a[3](1) = 1, a[3](2) = 1/8
        let ls = table.level_sums(1.0).unwrap();
        assert!((ls.sums[3] - 1.0).abs() < 1e-12);
        let ls = table.level_sums(2.0).unwrap();
        assert!((ls.sums[3] - 0.125).abs() < 1e-12);
    }

    #[test]
    fn conjugation_sums_are_all_one() {
        let f = conj_corr();
        let table = weight_table(&f, &pt(0.3, 0.7), 10, 2e7).unwrap();
        for s in [0.7, 1.0, 2.3] {
            let ls = table.level_sums(s).unwrap();
            for &a in &ls.sums {
                assert!((a - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_sums_geometric() {
        let f = squaring_inverse();
        // s = 2: sum_{n<=10} 2^-n = 2 - 2^-10
        let got = poincare_partial_sum(&f, &pt(1.0, 0.0), 2.0, 10, 2e7).unwrap();
        let expect = 2.0 - 2f64.powi(-10);
        assert!((got - expect).abs() < 1e-12);
        // s = 1: depth + 1 exactly
        let got = poincare_partial_sum(&f, &pt(1.0, 0.0), 1.0, 10, 2e7).unwrap();
        assert!((got - 11.0).abs() < 1e-11);
        // depth 0: just a[0] = 1
        let got = poincare_partial_sum(&f, &pt(1.0, 0.0), 1.3, 0, 2e7).unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn growth_rate_closed_form() {
        let f = squaring_inverse();
        let table = weight_table(&f, &pt(1.0, 0.0), 14, 2e7).unwrap();
        // rho(s) = 2^(1-s)
        let rho = growth_rate(&table.level_sums(1.5).unwrap(), 0.5).unwrap();
        assert!((rho.rho - 2f64.powf(-0.5)).abs() < 1e-9);
        assert!(rho.r2 > 1.0 - 1e-12);
        let rho = growth_rate(&table.level_sums(1.0).unwrap(), 0.5).unwrap();
        assert!((rho.rho - 1.0).abs() < 1e-10);
    }

    #[test]
    fn critical_exponent_of_the_circle() {
        let f = squaring_inverse();
        let est = critical_exponent(
            &f,
            &pt(1.0, 0.0),
            &DeltaParams {
                depth: 14,
                tol: 0.005,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (est.delta - 1.0).abs() <= 0.02,
            "delta = {} bracket {:?}",
            est.delta,
            est.bracket
        );
        assert!(est.rho_at_delta > 0.9 && est.rho_at_delta < 1.1);
    }

    #[test]
    fn conjugation_rejects_bracket() {
        // every branch is an isometry: rho is identically 1, the series
        // diverges at every exponent and no bracket is valid
        let f = conj_corr();
        let err = critical_exponent(&f, &pt(0.3, 0.7), &DeltaParams::default());
        assert!(matches!(err, Err(Error::InvalidBracket { .. })), "{err:?}");
    }

    #[test]
    fn basepoint_on_parabolic_orbit_is_rejected() {
        // cauliflower: the orbit of the parabolic point itself must be
        // rejected by the guard
        let f = from_rational_inverse(
            &UniPoly::from_reals(&[0.25, 0.0, 1.0]),
            &UniPoly::from_reals(&[1.0]),
        )
        .unwrap();
        let err = critical_exponent(&f, &pt(0.5, 0.0), &DeltaParams::default());
        assert!(matches!(err, Err(Error::BasepointRejected { .. })), "{err:?}");
    }

    #[test]
    fn modified_sums_schedule() {
        let f = squaring_inverse();
        let table = weight_table(&f, &pt(1.0, 0.0), 10, 2e7).unwrap();
        // h = 0: identical to the plain sums
        let plain = table.level_sums(1.3).unwrap();
        let modified = table.modified_level_sums(1.3, 1.0, |_| 0).unwrap();
        for (a, b) in plain.sums.iter().zip(modified.sums.iter()) {
            assert_eq!(a, b);
        }
        // s = delta: the schedule collapses to the plain exponent
        let plain = table.level_sums(1.0).unwrap();
        let modified = table.modified_level_sums(1.0, 1.0, |_| 7).unwrap();
        for (a, b) in plain.sums.iter().zip(modified.sums.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        // delta = 1, s = 1.1, threshold 5: a[n] = 2^(0.1 n) below level 5
        let modified = table.modified_level_sums(1.1, 1.0, |_| 5).unwrap();
        for n in 0..5 {
            let expect = 2f64.powf(0.1 * n as f64);
            assert!(
                (modified.sums[n] - expect).abs() <= 1e-9 * expect,
                "level {n}: {} vs {expect}",
                modified.sums[n]
            );
        }
        for n in 5..=10 {
            let expect = 2f64.powf(-0.1 * n as f64);
            assert!((modified.sums[n] - expect).abs() <= 1e-9 * expect);
        }
    }

    /// Submultiplicativity on a small instance, against full enumeration:
    /// a[m+n](s) <= a[m](s) * max over level-m points of their own level-n
    /// sum.
    #[test]
    fn level_sums_submultiplicative() {
        let f = squaring_inverse();
        let x = pt(1.3, 0.4);
        let s = 1.2;
        let table = weight_table(&f, &x, 6, 2e7).unwrap();
        let a = table.level_sums(s).unwrap().sums;
        let levels = crate::orbits::expand(&f, &x, 3, ExpandMode::exact()).unwrap();
        for m in 1..=3usize {
            for n in 1..=3usize {
                let mut worst = 0.0f64;
                for node in &levels[m].nodes {
                    let sub = weight_table(&f, &node.point, n, 2e7)
                        .unwrap()
                        .level_sums(s)
                        .unwrap();
                    worst = worst.max(sub.sums[n]);
                }
                assert!(
                    a[m + n] <= a[m] * worst * (1.0 + 1e-9),
                    "a[{}] = {} vs bound {}",
                    m + n,
                    a[m + n],
                    a[m] * worst
                );
            }
        }
    }

    /// rho from the fit tracks the raw tail ratios.
    #[test]
    fn growth_rate_matches_tail_ratios() {
        let f = squaring_inverse();
        let table = weight_table(&f, &pt(0.8, 0.5), 12, 2e7).unwrap();
        let ls = table.level_sums(1.4).unwrap();
        let rho = growth_rate(&ls, 0.5).unwrap();
        let ratio = ls.sums[12] / ls.sums[11];
        assert!(
            (rho.rho - ratio).abs() <= 0.05 * ratio,
            "fit {} vs ratio {ratio}",
            rho.rho
        );
    }
}
