//! Monte Carlo sweep over the configuration grid.
//!
//! Trials are seeded sequentially from the master seed in a fixed
//! enumeration order (cell by cell, avoidance arm by arm, trial by trial),
//! run in parallel, and aggregated in that same order, so results are
//! byte-identical regardless of the parallelism level.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Cell, Experiment};
use crate::stats;
use crate::trial::{run_trial, RecordLevel, SimError, TrialResult};

/// Collisions this close to a border count as border collisions, m.
pub const BORDER_BAND: f64 = 0.5;

/// Which avoidance arms a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmSelection {
    /// Avoidance on and off, interleaved per cell.
    Both,
    OnOnly,
    OffOnly,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Worker threads; 0 picks the rayon default.
    pub parallelism: usize,
    pub arms: ArmSelection,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            parallelism: 0,
            arms: ArmSelection::Both,
        }
    }
}

/// Scalar per-trial record, one JSONL line each.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub config_id: u32,
    pub team_size: usize,
    pub avoidance: bool,
    pub trial_index: usize,
    pub seed: u64,
    pub flight_time: f64,
    pub collided: bool,
    pub censored: bool,
    pub collision_x: Option<f64>,
    pub collision_y: Option<f64>,
    /// Collision happened within [`BORDER_BAND`] of a border.
    pub border_collision: Option<bool>,
    pub coverage_pct: f64,
    pub range_rmse: Option<f64>,
    pub bearing_rmse: Option<f64>,
    pub m1_fraction: f64,
    pub m2_fraction: f64,
}

impl TrialRecord {
    fn from_result(result: &TrialResult, trial_index: usize) -> Self {
        Self {
            config_id: result.config_id,
            team_size: result.team_size,
            avoidance: result.avoidance,
            trial_index,
            seed: result.seed,
            flight_time: result.flight_time,
            collided: result.collided,
            censored: result.censored,
            collision_x: result.collision_pos.map(|(x, _)| x),
            collision_y: result.collision_pos.map(|(_, y)| y),
            border_collision: result.collision_wall_distance.map(|d| d < BORDER_BAND),
            coverage_pct: result.coverage_pct,
            range_rmse: result.range_rmse,
            bearing_rmse: result.bearing_rmse,
            m1_fraction: result.m1_fraction,
            m2_fraction: result.m2_fraction,
        }
    }
}

/// Aggregates of one (configuration, team size, avoidance arm) cell.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub config_id: u32,
    pub team_size: usize,
    pub avoidance: bool,
    pub arena_side: f64,
    pub mav_radius: f64,
    pub density: f64,
    pub trials: usize,
    pub collisions: usize,
    pub censored: usize,
    /// Mean flight time with censored trials entering at the cap, s.
    pub mean_flight_time: f64,
    pub sd_flight_time: f64,
    /// Mean over collided trials only; None when every trial was censored.
    pub mean_flight_time_completed: Option<f64>,
    /// Fraction of trials that reached the cap without a collision.
    pub survival_fraction: f64,
    pub mean_coverage_pct: f64,
    /// Fraction of collisions within [`BORDER_BAND`] of a border.
    pub border_collision_fraction: Option<f64>,
    pub mean_range_rmse: Option<f64>,
    pub mean_bearing_rmse: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
    pub records: Vec<TrialRecord>,
}

impl SweepResult {
    /// Per-trial flight times of one cell, in trial order.
    pub fn flight_times(&self, config_id: u32, team_size: usize, avoidance: bool) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| {
                r.config_id == config_id && r.team_size == team_size && r.avoidance == avoidance
            })
            .map(|r| r.flight_time)
            .collect()
    }

    pub fn row(&self, config_id: u32, team_size: usize, avoidance: bool) -> Option<&SweepRow> {
        self.rows.iter().find(|r| {
            r.config_id == config_id && r.team_size == team_size && r.avoidance == avoidance
        })
    }
}

fn arms(selection: ArmSelection) -> &'static [bool] {
    match selection {
        ArmSelection::Both => &[true, false],
        ArmSelection::OnOnly => &[true],
        ArmSelection::OffOnly => &[false],
    }
}

/// Aggregates one cell's records into a row. Means are over all trials with
/// censored flight times entering at the cap; the completed-only mean is
/// reported alongside.
pub fn aggregate_cell(cell: &Cell, avoidance: bool, records: &[TrialRecord]) -> SweepRow {
    let flight_times: Vec<f64> = records.iter().map(|r| r.flight_time).collect();
    let completed: Vec<f64> = records
        .iter()
        .filter(|r| r.collided)
        .map(|r| r.flight_time)
        .collect();
    let coverages: Vec<f64> = records.iter().map(|r| r.coverage_pct).collect();
    let range_rmses: Vec<f64> = records.iter().filter_map(|r| r.range_rmse).collect();
    let bearing_rmses: Vec<f64> = records.iter().filter_map(|r| r.bearing_rmse).collect();
    let collisions = completed.len();
    let censored = records.len() - collisions;
    let border_hits = records
        .iter()
        .filter(|r| r.border_collision == Some(true))
        .count();

    SweepRow {
        config_id: cell.config_id,
        team_size: cell.team_size,
        avoidance,
        arena_side: cell.trial.task.arena_side,
        mav_radius: cell.trial.mav_radius,
        density: cell.trial.density(),
        trials: records.len(),
        collisions,
        censored,
        mean_flight_time: stats::mean(&flight_times),
        sd_flight_time: stats::sample_sd(&flight_times),
        mean_flight_time_completed: (!completed.is_empty()).then(|| stats::mean(&completed)),
        survival_fraction: censored as f64 / records.len().max(1) as f64,
        mean_coverage_pct: stats::mean(&coverages),
        border_collision_fraction: (collisions > 0)
            .then(|| border_hits as f64 / collisions as f64),
        mean_range_rmse: (!range_rmses.is_empty()).then(|| stats::mean(&range_rmses)),
        mean_bearing_rmse: (!bearing_rmses.is_empty()).then(|| stats::mean(&bearing_rmses)),
    }
}

/// Runs the sweep: every cell of the experiment, for the selected avoidance
/// arms, `cell.trials` trials each.
pub fn run_sweep(experiment: &Experiment, options: &SweepOptions) -> Result<SweepResult, SimError> {
    // Deterministic job list; the position in this list fixes the seed.
    struct Job {
        cell_index: usize,
        avoidance: bool,
        trial_index: usize,
        seed: u64,
    }

    let mut jobs = Vec::new();
    let mut counter = 0u64;
    for (cell_index, cell) in experiment.cells.iter().enumerate() {
        for &avoidance in arms(options.arms) {
            for trial_index in 0..cell.trials {
                jobs.push(Job {
                    cell_index,
                    avoidance,
                    trial_index,
                    seed: experiment.master_seed.wrapping_add(counter),
                });
                counter += 1;
            }
        }
    }

    let run_all = || -> Result<Vec<TrialResult>, SimError> {
        jobs.par_iter()
            .map(|job| {
                let cell = &experiment.cells[job.cell_index];
                let mut trial_cfg = cell.trial.clone();
                trial_cfg.avoidance = job.avoidance;
                run_trial(&trial_cfg, job.seed, RecordLevel::Summary)
            })
            .collect()
    };

    let results = if options.parallelism == 0 {
        run_all()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.parallelism)
            .build()
            .map_err(|e| SimError::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(run_all)?
    };

    let records: Vec<TrialRecord> = jobs
        .iter()
        .zip(results.iter())
        .map(|(job, result)| TrialRecord::from_result(result, job.trial_index))
        .collect();

    // Aggregate in job order: records of one (cell, arm) group are
    // contiguous by construction.
    let mut rows = Vec::new();
    let mut offset = 0;
    for cell in experiment.cells.iter() {
        for &avoidance in arms(options.arms) {
            let group = &records[offset..offset + cell.trials];
            rows.push(aggregate_cell(cell, avoidance, group));
            offset += cell.trials;
        }
    }

    Ok(SweepResult {
        master_seed: experiment.master_seed,
        rows,
        records,
    })
}
