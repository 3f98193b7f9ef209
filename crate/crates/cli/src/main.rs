//! Command-line front end: reproducible pipelines over the engine.
//!
//! Every command writes its artifacts under the `--out` prefix and prints
//! the main JSON to stdout. Outputs are byte-identical for identical
//! configuration and seed, independent of the thread count.

mod config;

use clap::Parser;
use config::{validate, RawConfig, RunConfig, Violation};
use holocorr_core::dimension::{hd_delta_report, ReportConfig};
use holocorr_core::io::{cloud_to_csv, raster_to_pgm, rho_samples_to_csv};
use holocorr_core::measure::{conformality_reports, patterson_sullivan, SphereDisk};
use holocorr_core::orbits::{limit_set, render, Window};
use holocorr_core::poincare::{critical_exponent, growth_rate, weight_table, DeltaParams};
use holocorr_core::sphere::SpherePoint;
use holocorr_core::Complex;
use serde::Serialize;
use std::io::Write as _;

#[derive(Parser)]
#[command(
    name = "holocorr",
    about = "Iterate (anti)holomorphic correspondences: limit sets, Poincare series, conformal measures, dimension reports",
    version
)]
struct Cli {
    /// JSON config file; values present in it override the flags
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(flatten)]
    raw: RawConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand, Clone, Copy)]
enum Command {
    /// Forward limit set as CSV, optionally rendered to PGM/PNG
    Limitset,
    /// Critical exponent estimate plus a CSV of (s, rho) samples
    Delta,
    /// Atomic conformal-measure approximation as JSON
    Measure,
    /// Conformality residual reports over the configured disks
    Conformality,
    /// One-shot pipeline: box dimension vs critical exponent
    Report,
    /// Classified fixed points
    Fixedpoints,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let mut raw = cli.raw;
    if let Some(path) = &cli.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return config_failure(&[violation("config", format!("cannot read {path:?}: {e}"))]),
        };
        match serde_json::from_str::<RawConfig>(&text) {
            Ok(file) => raw = raw.overlaid(file),
            Err(e) => return config_failure(&[violation("config", format!("invalid JSON: {e}"))]),
        }
    }
    let cfg = match validate(&raw) {
        Ok(cfg) => cfg,
        Err(violations) => return config_failure(&violations),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
        .ok();
    match execute(cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            let payload = serde_json::json!({
                "error": "runtime",
                "kind": e.kind(),
                "message": e.to_string(),
            });
            eprintln!("{payload}");
            1
        }
    }
}

fn violation(field: &str, message: String) -> Violation {
    Violation {
        field: field.into(),
        message,
    }
}

fn config_failure(violations: &[Violation]) -> i32 {
    let payload = serde_json::json!({
        "error": "config",
        "violations": violations,
    });
    eprintln!("{payload}");
    2
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    seed: u64,
    family: String,
    result: T,
}

fn execute(command: Command, cfg: &RunConfig) -> holocorr_core::Result<()> {
    match command {
        Command::Limitset => cmd_limitset(cfg),
        Command::Delta => cmd_delta(cfg),
        Command::Measure => cmd_measure(cfg),
        Command::Conformality => cmd_conformality(cfg),
        Command::Report => cmd_report(cfg),
        Command::Fixedpoints => cmd_fixedpoints(cfg),
    }
}

fn write_artifact(path: &str, bytes: &[u8]) -> holocorr_core::Result<()> {
    if let Some(parent) = std::path::Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)?;
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &RunConfig, path: &str, result: T) -> holocorr_core::Result<()> {
    let envelope = Envelope {
        seed: cfg.seed,
        family: cfg.correspondence.metadata().family.clone(),
        result,
    };
    let text = serde_json::to_string_pretty(&envelope).expect("serializable");
    write_artifact(path, text.as_bytes())?;
    println!("{text}");
    Ok(())
}

fn cmd_limitset(cfg: &RunConfig) -> holocorr_core::Result<()> {
    let cloud = limit_set(
        &cfg.correspondence,
        &cfg.x,
        cfg.cloud_depth,
        cfg.burn_in,
        cfg.grid_res,
    )?;
    let csv_path = format!("{}.cloud.csv", cfg.out);
    write_artifact(&csv_path, cloud_to_csv(&cloud).as_bytes())?;
    let mut artifacts = vec![csv_path];
    if cfg.width > 0 && cfg.height > 0 {
        let window = Window {
            re_min: cfg.window.0,
            re_max: cfg.window.1,
            im_min: cfg.window.2,
            im_max: cfg.window.3,
        };
        let raster = render(&cloud, &window, cfg.width, cfg.height)?;
        let pgm_path = format!("{}.pgm", cfg.out);
        write_artifact(&pgm_path, &raster_to_pgm(&raster))?;
        artifacts.push(pgm_path);
        if cfg.png {
            let png_path = format!("{}.png", cfg.out);
            image::save_buffer(
                &png_path,
                &raster.pixels,
                raster.width,
                raster.height,
                image::ExtendedColorType::L8,
            )
            .map_err(|e| holocorr_core::Error::invalid("png", e.to_string()))?;
            artifacts.push(png_path);
        }
    }
    emit_json(
        cfg,
        &format!("{}.limitset.json", cfg.out),
        serde_json::json!({
            "points": cloud.len(),
            "grid_res": cloud.grid_res,
            "depth": cfg.cloud_depth,
            "burn_in": cfg.burn_in,
            "artifacts": artifacts,
        }),
    )
}

fn delta_params(cfg: &RunConfig) -> DeltaParams {
    DeltaParams {
        s_lo: cfg.s_lo,
        s_hi: cfg.s_hi,
        tol: cfg.tol,
        depth: cfg.depth,
        budget: cfg.budget,
        tail_fraction: cfg.tail_fraction,
        margin: cfg.margin,
    }
}

fn cmd_delta(cfg: &RunConfig) -> holocorr_core::Result<()> {
    let estimate = critical_exponent(&cfg.correspondence, &cfg.x, &delta_params(cfg))?;
    // (s, rho) samples across the bracket for the CSV
    let table = weight_table(&cfg.correspondence, &cfg.x, cfg.depth, cfg.budget)?;
    let mut samples = Vec::with_capacity(cfg.n_samples);
    for k in 0..cfg.n_samples {
        let s = cfg.s_lo + (cfg.s_hi - cfg.s_lo) * k as f64 / (cfg.n_samples - 1) as f64;
        let rho = growth_rate(&table.level_sums(s)?, cfg.tail_fraction)?;
        samples.push((s, rho.rho));
    }
    write_artifact(
        &format!("{}.rho.csv", cfg.out),
        rho_samples_to_csv(&samples).as_bytes(),
    )?;
    emit_json(cfg, &format!("{}.delta.json", cfg.out), estimate)
}

fn cmd_measure(cfg: &RunConfig) -> holocorr_core::Result<()> {
    let measure = patterson_sullivan(&cfg.correspondence, &cfg.x, cfg.s, cfg.depth, cfg.budget)?;
    emit_json(cfg, &format!("{}.measure.json", cfg.out), measure)
}

fn cmd_conformality(cfg: &RunConfig) -> holocorr_core::Result<()> {
    if cfg.disks.is_empty() {
        return Err(holocorr_core::Error::invalid(
            "disk",
            "at least one --disk cx,cy,r is required",
        ));
    }
    let measure = patterson_sullivan(&cfg.correspondence, &cfg.x, cfg.s, cfg.depth, cfg.budget)?;
    let mut reports = Vec::new();
    for &(cx, cy, r) in &cfg.disks {
        let disk = SphereDisk {
            center: SpherePoint::finite(Complex::new(cx, cy)),
            radius: r,
        };
        reports.extend(conformality_reports(
            &measure,
            &cfg.correspondence,
            disk,
            cfg.delta,
        )?);
    }
    emit_json(cfg, &format!("{}.conformality.json", cfg.out), reports)
}

fn cmd_report(cfg: &RunConfig) -> holocorr_core::Result<()> {
    let report_cfg = ReportConfig {
        delta: delta_params(cfg),
        cloud_depth: cfg.cloud_depth,
        burn_in: Some(cfg.burn_in),
        grid_res: cfg.grid_res,
        scale_lo: cfg.scale_lo,
        scale_hi: cfg.scale_hi,
        n_scales: cfg.n_scales,
        slack: cfg.slack,
    };
    let report = hd_delta_report(&cfg.correspondence, &cfg.x, &report_cfg)?;
    emit_json(cfg, &format!("{}.report.json", cfg.out), report)
}

fn cmd_fixedpoints(cfg: &RunConfig) -> holocorr_core::Result<()> {
    let fps = cfg.correspondence.fixed_points()?;
    emit_json(cfg, &format!("{}.fixedpoints.json", cfg.out), fps)
}
