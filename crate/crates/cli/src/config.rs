//! Run configuration: flag and file sources, overlay merging, and
//! validation that names every violated field.

use holocorr_core::correspondence::Correspondence;
use holocorr_core::families;
use holocorr_core::io::{correspondence_from_json, CorrespondenceJson};
use holocorr_core::parse::{parse_complex, parse_unipoly};
use holocorr_core::sphere::SpherePoint;
use serde::{Deserialize, Serialize};

/// Raw options as they arrive from flags or the config file. A value in
/// the config file overrides the corresponding flag.
#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Family name: rational-inverse | bullett-penrose | llmm
    #[arg(long)]
    pub family: Option<String>,
    /// Numerator coefficients, ascending degree (rational-inverse, llmm)
    #[arg(long)]
    pub p: Option<String>,
    /// Denominator coefficients, ascending degree (rational-inverse, llmm)
    #[arg(long)]
    pub q: Option<String>,
    /// Family parameter a (bullett-penrose)
    #[arg(long)]
    pub a: Option<String>,
    /// Path to a correspondence JSON file (alternative to --family)
    #[arg(long)]
    pub poly_json: Option<String>,
    /// Basepoint, e.g. "2", "0.3+0.7i", or "inf"
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub depth: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub burn_in: Option<i64>,
    #[arg(long)]
    pub grid_res: Option<f64>,
    #[arg(long)]
    pub s_lo: Option<f64>,
    #[arg(long)]
    pub s_hi: Option<f64>,
    /// Bracket tolerance for the critical exponent
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub tail_fraction: Option<f64>,
    /// Exact-mode node budget
    #[arg(long)]
    pub budget: Option<f64>,
    /// Measure exponent s
    #[arg(long)]
    pub s: Option<f64>,
    /// Conformality exponent delta
    #[arg(long)]
    pub delta: Option<f64>,
    /// Test disks "cx,cy,r" (repeatable)
    #[arg(long = "disk")]
    pub disks: Option<Vec<String>>,
    /// Number of (s, rho) samples in the delta CSV
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Render window "re_min,re_max,im_min,im_max"
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    /// Also write a PNG next to the PGM
    #[arg(long)]
    pub png: Option<bool>,
    /// Box-counting scales for the report
    #[arg(long)]
    pub scale_lo: Option<f64>,
    #[arg(long)]
    pub scale_hi: Option<f64>,
    #[arg(long)]
    pub n_scales: Option<usize>,
    #[arg(long)]
    pub slack: Option<f64>,
    /// Cloud depth used by the report pipeline
    #[arg(long, allow_hyphen_values = true)]
    pub cloud_depth: Option<i64>,
    /// Worker threads (default: HOLOCORR_THREADS or 1)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for sampled diagnostics, recorded in outputs
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path prefix
    #[arg(long)]
    pub out: Option<String>,
}

impl RawConfig {
    /// Overlay: values present in `file` win over `self`.
    pub fn overlaid(mut self, file: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if file.$field.is_some() { self.$field = file.$field; })*
            };
        }
        take!(
            family, p, q, a, poly_json, x, depth, burn_in, grid_res, s_lo, s_hi, tol, margin,
            tail_fraction, budget, s, delta, disks, n_samples, window, width, height, png,
            scale_lo, scale_hi, n_scales, slack, cloud_depth, threads, seed, out
        );
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// Validated configuration with defaults applied.
pub struct RunConfig {
    pub correspondence: Correspondence,
    pub x: SpherePoint,
    pub depth: usize,
    pub burn_in: usize,
    pub grid_res: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub tol: f64,
    pub margin: f64,
    pub tail_fraction: f64,
    pub budget: f64,
    pub s: f64,
    pub delta: f64,
    pub disks: Vec<(f64, f64, f64)>,
    pub n_samples: usize,
    pub window: (f64, f64, f64, f64),
    pub width: u32,
    pub height: u32,
    pub png: bool,
    pub scale_lo: f64,
    pub scale_hi: f64,
    pub n_scales: usize,
    pub slack: f64,
    pub cloud_depth: usize,
    pub threads: usize,
    pub seed: u64,
    pub out: String,
}

pub fn validate(raw: &RawConfig) -> Result<RunConfig, Vec<Violation>> {
    let mut violations: Vec<Violation> = Vec::new();
    let mut fail = |field: &str, message: String| {
        violations.push(Violation {
            field: field.into(),
            message,
        });
    };

    let depth = match raw.depth {
        None => 18usize,
        Some(d) if (0..=64).contains(&d) => d as usize,
        Some(d) => {
            fail("depth", format!("must be in 0..=64, got {d}"));
            18
        }
    };
    let cloud_depth = match raw.cloud_depth {
        None => 26usize,
        Some(d) if (1..=400).contains(&d) => d as usize,
        Some(d) => {
            fail("cloud_depth", format!("must be in 1..=400, got {d}"));
            26
        }
    };
    let burn_in = match raw.burn_in {
        None => depth.max(cloud_depth) / 3,
        Some(b) if b >= 0 => b as usize,
        Some(b) => {
            fail("burn_in", format!("must be nonnegative, got {b}"));
            0
        }
    };
    let grid_res = positive(raw.grid_res.unwrap_or(1e-3), "grid_res", &mut fail);
    let s_lo = positive(raw.s_lo.unwrap_or(0.5), "s_lo", &mut fail);
    let s_hi = positive(raw.s_hi.unwrap_or(1.8), "s_hi", &mut fail);
    if s_hi <= s_lo {
        fail("s_hi", format!("must exceed s_lo = {s_lo}, got {s_hi}"));
    }
    let tol = positive(raw.tol.unwrap_or(0.02), "tol", &mut fail);
    let margin = positive(raw.margin.unwrap_or(0.005), "margin", &mut fail);
    let tail_fraction = {
        let t = raw.tail_fraction.unwrap_or(0.5);
        if !(0.05..=1.0).contains(&t) {
            fail("tail_fraction", format!("must be in [0.05, 1], got {t}"));
        }
        t
    };
    let budget = positive(raw.budget.unwrap_or(2e7), "budget", &mut fail);
    let s = positive(raw.s.unwrap_or(1.0), "s", &mut fail);
    let delta = positive(raw.delta.unwrap_or(1.0), "delta", &mut fail);
    let n_samples = {
        let n = raw.n_samples.unwrap_or(25);
        if n < 2 {
            fail("n_samples", format!("must be at least 2, got {n}"));
        }
        n
    };
    let width = raw.width.unwrap_or(512);
    let height = raw.height.unwrap_or(512);
    if width == 0 || width > 8192 {
        fail("width", format!("must be in 1..=8192, got {width}"));
    }
    if height == 0 || height > 8192 {
        fail("height", format!("must be in 1..=8192, got {height}"));
    }
    let window = match &raw.window {
        None => (-2.0, 2.0, -2.0, 2.0),
        Some(text) => match parse_quad(text) {
            Some(w) if w.1 > w.0 && w.3 > w.2 => w,
            _ => {
                fail(
                    "window",
                    format!("expected re_min,re_max,im_min,im_max with increasing pairs, got {text:?}"),
                );
                (-2.0, 2.0, -2.0, 2.0)
            }
        },
    };
    let scale_lo = positive(raw.scale_lo.unwrap_or(4e-3), "scale_lo", &mut fail);
    let scale_hi = positive(raw.scale_hi.unwrap_or(0.2), "scale_hi", &mut fail);
    let n_scales = {
        let n = raw.n_scales.unwrap_or(12);
        if n < 2 {
            fail("n_scales", format!("must be at least 2, got {n}"));
        }
        n
    };
    let slack = positive(raw.slack.unwrap_or(0.1), "slack", &mut fail);
    let threads = {
        let n = raw
            .threads
            .or_else(|| {
                std::env::var("HOLOCORR_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(1);
        if n == 0 || n > 512 {
            fail("threads", format!("must be in 1..=512, got {n}"));
        }
        n.clamp(1, 512)
    };
    let seed = raw.seed.unwrap_or(12345);
    let out = raw.out.clone().unwrap_or_else(|| "holocorr-out".into());

    let mut disks = Vec::new();
    if let Some(list) = &raw.disks {
        for (i, text) in list.iter().enumerate() {
            match parse_triple(text) {
                Some((cx, cy, r)) if r > 0.0 => disks.push((cx, cy, r)),
                _ => fail(
                    "disk",
                    format!("entry {i}: expected cx,cy,r with r > 0, got {text:?}"),
                ),
            }
        }
    }

    let x = match &raw.x {
        None => Some(SpherePoint::finite(holocorr_core::Complex::new(2.0, 0.0))),
        Some(text) if text == "inf" => Some(SpherePoint::infinity()),
        Some(text) => match parse_complex(text) {
            Ok(z) => Some(SpherePoint::finite(z)),
            Err(e) => {
                fail("x", e.to_string());
                None
            }
        },
    };

    let correspondence = build_correspondence(raw, &mut fail);

    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(RunConfig {
        correspondence: correspondence.expect("validated"),
        x: x.expect("validated"),
        depth,
        burn_in,
        grid_res,
        s_lo,
        s_hi,
        tol,
        margin,
        tail_fraction,
        budget,
        s,
        delta,
        disks,
        n_samples,
        window,
        width,
        height,
        png: raw.png.unwrap_or(false),
        scale_lo,
        scale_hi,
        n_scales,
        slack,
        cloud_depth,
        threads,
        seed,
        out,
    })
}

fn build_correspondence(
    raw: &RawConfig,
    fail: &mut impl FnMut(&str, String),
) -> Option<Correspondence> {
    if let Some(path) = &raw.poly_json {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                fail("poly_json", format!("cannot read {path:?}: {e}"));
                return None;
            }
        };
        let parsed: CorrespondenceJson = match serde_json::from_str(&text) {
            Ok(p) => p,
            Err(e) => {
                fail("poly_json", format!("invalid JSON: {e}"));
                return None;
            }
        };
        return match correspondence_from_json(parsed) {
            Ok(c) => Some(c),
            Err(e) => {
                fail("poly_json", e.to_string());
                None
            }
        };
    }
    let family = match &raw.family {
        Some(f) => f.as_str(),
        None => {
            fail(
                "family",
                "one of --family or --poly-json is required".into(),
            );
            return None;
        }
    };
    match family {
        "rational-inverse" | "llmm" => {
            let p = match &raw.p {
                Some(t) => parse_unipoly(t),
                None => {
                    fail("p", format!("--p is required for family {family}"));
                    return None;
                }
            };
            let q = match &raw.q {
                Some(t) => parse_unipoly(t),
                None => Ok(holocorr_core::polyalg::UniPoly::from_reals(&[1.0])),
            };
            let (p, q) = match (p, q) {
                (Ok(p), Ok(q)) => (p, q),
                (Err(e), _) => {
                    fail("p", e.to_string());
                    return None;
                }
                (_, Err(e)) => {
                    fail("q", e.to_string());
                    return None;
                }
            };
            let built = if family == "llmm" {
                families::llmm(&p, &q)
            } else {
                families::from_rational_inverse(&p, &q)
            };
            match built {
                Ok(c) => Some(c),
                Err(e) => {
                    fail("family", e.to_string());
                    None
                }
            }
        }
        "bullett-penrose" => {
            let a = match &raw.a {
                Some(t) => match parse_complex(t) {
                    Ok(a) => a,
                    Err(e) => {
                        fail("a", e.to_string());
                        return None;
                    }
                },
                None => {
                    fail("a", "--a is required for family bullett-penrose".into());
                    return None;
                }
            };
            match families::bullett_penrose(a) {
                Ok(c) => Some(c),
                Err(e) => {
                    fail("a", e.to_string());
                    None
                }
            }
        }
        other => {
            fail(
                "family",
                format!("unknown family {other:?}; expected rational-inverse, bullett-penrose, or llmm"),
            );
            None
        }
    }
}

fn positive(value: f64, field: &str, fail: &mut impl FnMut(&str, String)) -> f64 {
    if !(value > 0.0 && value.is_finite()) {
        fail(field, format!("must be positive and finite, got {value}"));
    }
    value
}

fn parse_triple(text: &str) -> Option<(f64, f64, f64)> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse().ok())
        .collect::<Option<_>>()?;
    (parts.len() == 3).then(|| (parts[0], parts[1], parts[2]))
}

fn parse_quad(text: &str) -> Option<(f64, f64, f64, f64)> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse().ok())
        .collect::<Option<_>>()?;
    (parts.len() == 4).then(|| (parts[0], parts[1], parts[2], parts[3]))
}
