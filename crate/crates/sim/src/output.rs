//! File emission: aggregate CSVs, per-trial JSONL, and a plot-ready long
//! format. Formatting goes through Rust's shortest-roundtrip float display,
//! so identical results serialize to identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::ablation::AblationReport;
use crate::scenario::CircleReport;
use crate::sweep::SweepResult;
use crate::trial::TrialResult;

/// Build identifier stamped into every CSV row.
pub fn build_id() -> &'static str {
    env!("BUILD_GIT_DESCRIBE")
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

/// One row per (configuration, team size, avoidance arm).
pub fn write_sweep_csv<W: Write>(mut w: W, sweep: &SweepResult, build: &str) -> io::Result<()> {
    writeln!(
        w,
        "config_id,team_size,avoidance,arena_side,mav_radius,density,trials,collisions,censored,\
         mean_flight_time,sd_flight_time,mean_flight_time_completed,survival_fraction,\
         mean_coverage_pct,border_collision_fraction,mean_range_rmse,mean_bearing_rmse,\
         master_seed,build"
    )?;
    for r in &sweep.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.config_id,
            r.team_size,
            r.avoidance,
            r.arena_side,
            r.mav_radius,
            r.density,
            r.trials,
            r.collisions,
            r.censored,
            r.mean_flight_time,
            r.sd_flight_time,
            opt(&r.mean_flight_time_completed),
            r.survival_fraction,
            r.mean_coverage_pct,
            opt(&r.border_collision_fraction),
            opt(&r.mean_range_rmse),
            opt(&r.mean_bearing_rmse),
            sweep.master_seed,
            build,
        )?;
    }
    Ok(())
}

/// One JSON object per trial.
pub fn write_trials_jsonl<W: Write>(mut w: W, sweep: &SweepResult) -> io::Result<()> {
    for record in &sweep.records {
        serde_json::to_writer(&mut w, record)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Long format: one (cell, metric, value) row per line, for plotting tools.
pub fn write_long_csv<W: Write>(mut w: W, sweep: &SweepResult, build: &str) -> io::Result<()> {
    writeln!(
        w,
        "config_id,team_size,avoidance,density,metric,value,master_seed,build"
    )?;
    for r in &sweep.rows {
        let mut emit = |metric: &str, value: String| -> io::Result<()> {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.config_id, r.team_size, r.avoidance, r.density, metric, value, sweep.master_seed, build
            )
        };
        emit("mean_flight_time", r.mean_flight_time.to_string())?;
        emit("sd_flight_time", r.sd_flight_time.to_string())?;
        emit("survival_fraction", r.survival_fraction.to_string())?;
        emit("mean_coverage_pct", r.mean_coverage_pct.to_string())?;
        emit(
            "border_collision_fraction",
            opt(&r.border_collision_fraction),
        )?;
        emit("mean_range_rmse", opt(&r.mean_range_rmse))?;
        emit("mean_bearing_rmse", opt(&r.mean_bearing_rmse))?;
    }
    Ok(())
}

pub fn write_ablation_csv<W: Write>(
    mut w: W,
    report: &AblationReport,
    build: &str,
) -> io::Result<()> {
    writeln!(
        w,
        "config_id,team_size,variant,trials,collisions,mean_flight_time,sd_flight_time,master_seed,build"
    )?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.config_id,
            r.team_size,
            r.variant.label(),
            r.trials,
            r.collisions,
            r.mean_flight_time,
            r.sd_flight_time,
            report.master_seed,
            build,
        )?;
    }
    Ok(())
}

pub fn write_circle_csv<W: Write>(
    mut w: W,
    report: &CircleReport,
    master_seed: u64,
    build: &str,
) -> io::Result<()> {
    writeln!(
        w,
        "t,ekf_range_err,ld_range_err,bearing_err,master_seed,build"
    )?;
    let trace = &report.trace;
    for k in 0..trace.t.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            trace.t[k],
            trace.ekf_range_err[k],
            trace.ld_range_err[k],
            trace.bearing_err[k],
            master_seed,
            build,
        )?;
    }
    Ok(())
}

/// Full single-trial diagnostics: state samples and per-link filter records
/// interleaved as tagged JSONL, finished by a result line.
pub fn write_trial_diagnostics<W: Write>(mut w: W, result: &TrialResult) -> io::Result<()> {
    #[derive(serde::Serialize)]
    struct Tagged<'a, T> {
        kind: &'a str,
        #[serde(flatten)]
        inner: &'a T,
    }

    for sample in &result.traj {
        serde_json::to_writer(
            &mut w,
            &Tagged {
                kind: "state",
                inner: sample,
            },
        )?;
        writeln!(w)?;
    }
    for link in &result.links {
        serde_json::to_writer(
            &mut w,
            &Tagged {
                kind: "link",
                inner: link,
            },
        )?;
        writeln!(w)?;
    }
    serde_json::to_writer(
        &mut w,
        &Tagged {
            kind: "result",
            inner: result,
        },
    )?;
    writeln!(w)?;
    Ok(())
}

pub fn create_file(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}
