use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use airprox_sim::ablation::run_ablation;
use airprox_sim::config::Experiment;
use airprox_sim::output;
use airprox_sim::report::correlation_report;
use airprox_sim::scenario::scenario_circle;
use airprox_sim::sweep::{run_sweep, ArmSelection, SweepOptions};
use airprox_sim::trial::{run_trial, RecordLevel};

#[derive(Parser)]
#[command(
    name = "airprox",
    version,
    about = "Multi-vehicle relative localization and collision avoidance simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment definition (TOML). Defaults to the built-in campaign.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single trial with full diagnostics.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Configuration id to run (default: first in the experiment).
        #[arg(long)]
        config_id: Option<u32>,
        /// Team size (default: first matching cell).
        #[arg(long)]
        team_size: Option<usize>,
        /// Disable the collision-avoidance layer.
        #[arg(long)]
        no_avoidance: bool,
    },
    /// Run the Monte Carlo sweep over the configuration grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Trials per cell override.
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
        /// Run only the avoidance-off baseline arm.
        #[arg(long)]
        no_avoidance: bool,
    },
    /// Run the channel ablation study on configurations 1, 2, 5, 6, 9, 10.
    Ablation {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
    },
    /// Validation scenarios.
    Scenario {
        #[command(subcommand)]
        scenario: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Circular flight around a static observer: filter validation.
    Circle {
        #[command(flatten)]
        common: CommonArgs,
        /// Noise realizations override.
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn load_experiment(common: &CommonArgs) -> anyhow::Result<Experiment> {
    let mut experiment = match &common.config {
        Some(path) => Experiment::load(path)
            .with_context(|| format!("loading experiment from {}", path.display()))?,
        None => Experiment::default_campaign(),
    };
    if let Some(seed) = common.seed {
        experiment.master_seed = seed;
    }
    Ok(experiment)
}

fn apply_trials(experiment: &mut Experiment, trials: Option<usize>) {
    if let Some(n) = trials {
        experiment.trials = n;
        for cell in experiment.cells.iter_mut() {
            cell.trials = n;
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            common,
            config_id,
            team_size,
            no_avoidance,
        } => {
            let experiment = load_experiment(&common)?;
            let cell = experiment
                .cells
                .iter()
                .find(|c| {
                    config_id.is_none_or(|id| c.config_id == id)
                        && team_size.is_none_or(|m| c.team_size == m)
                })
                .context("no configuration cell matches --config-id / --team-size")?;
            let mut trial_cfg = cell.trial.clone();
            trial_cfg.avoidance = !no_avoidance;
            let result = run_trial(&trial_cfg, experiment.master_seed, RecordLevel::Full)?;

            let mut file = output::create_file(&common.out, "trial.jsonl")?;
            output::write_trial_diagnostics(&mut file, &result)?;

            println!(
                "configuration {} team_size {} seed {} avoidance {}",
                result.config_id, result.team_size, result.seed, result.avoidance
            );
            println!(
                "flight_time {:.2} s, collided {}, coverage {:.1}%, range RMSE {}, bearing RMSE {}",
                result.flight_time,
                result.collided,
                result.coverage_pct,
                result
                    .range_rmse
                    .map_or("n/a".into(), |v| format!("{v:.3} m")),
                result
                    .bearing_rmse
                    .map_or("n/a".into(), |v| format!("{v:.3} rad")),
            );
            println!("diagnostics: {}", common.out.join("trial.jsonl").display());
        }
        Command::Sweep {
            common,
            trials,
            parallelism,
            no_avoidance,
        } => {
            let mut experiment = load_experiment(&common)?;
            apply_trials(&mut experiment, trials);
            let options = SweepOptions {
                parallelism,
                arms: if no_avoidance {
                    ArmSelection::OffOnly
                } else {
                    ArmSelection::Both
                },
            };
            let sweep = run_sweep(&experiment, &options)?;

            let build = output::build_id();
            output::write_sweep_csv(output::create_file(&common.out, "sweep.csv")?, &sweep, build)?;
            output::write_long_csv(
                output::create_file(&common.out, "sweep_long.csv")?,
                &sweep,
                build,
            )?;
            output::write_trials_jsonl(output::create_file(&common.out, "trials.jsonl")?, &sweep)?;

            // The density correlation needs at least six configurations.
            let mut distinct: Vec<u32> = sweep.rows.iter().map(|r| r.config_id).collect();
            distinct.sort_unstable();
            distinct.dedup();
            if !no_avoidance && distinct.len() >= 6 {
                let report = correlation_report(&sweep);
                let mut file = output::create_file(&common.out, "correlation.json")?;
                serde_json::to_writer_pretty(&mut file, &report)?;
                println!(
                    "spearman(density, mean flight time) = {:.3}; below-trend configs: {:?}",
                    report.spearman_rho, report.below_trend_config_ids
                );
            }
            for row in &sweep.rows {
                println!(
                    "config {:>2} m={} avoidance={}: mean {:>6.1} s over {} trials ({} collisions)",
                    row.config_id,
                    row.team_size,
                    row.avoidance,
                    row.mean_flight_time,
                    row.trials,
                    row.collisions
                );
            }
            println!("results in {}", common.out.display());
        }
        Command::Ablation {
            common,
            trials,
            parallelism,
        } => {
            let mut experiment = load_experiment(&common)?;
            apply_trials(&mut experiment, trials);
            let report = run_ablation(&experiment, parallelism)?;
            output::write_ablation_csv(
                output::create_file(&common.out, "ablation.csv")?,
                &report,
                output::build_id(),
            )?;
            for delta in report.deltas() {
                println!(
                    "config {:>2}: low-noise {:+.1} s, no-lobes {:+.1} s",
                    delta.config_id, delta.low_noise_delta, delta.no_lobes_delta
                );
            }
            println!("results in {}", common.out.display());
        }
        Command::Scenario { scenario } => match scenario {
            ScenarioCommand::Circle { common, trials } => {
                let experiment = load_experiment(&common)?;
                let mut circle_cfg = experiment.circle.clone();
                if let Some(n) = trials {
                    circle_cfg.realizations = n;
                }
                let report = scenario_circle(&circle_cfg, experiment.master_seed);
                output::write_circle_csv(
                    output::create_file(&common.out, "circle.csv")?,
                    &report,
                    experiment.master_seed,
                    output::build_id(),
                )?;
                let mut file = output::create_file(&common.out, "circle_summary.json")?;
                serde_json::to_writer_pretty(&mut file, &report)?;
                println!(
                    "time-averaged |range error|: filter {:.3} m vs inverted LD {:.3} m over {} realizations",
                    report.time_avg_ekf_range_err,
                    report.time_avg_ld_range_err,
                    report.realizations
                );
                println!(
                    "median |bearing error| after {:.0} s: {:.3} rad",
                    circle_cfg.tail_start, report.median_bearing_err_tail
                );
                println!("results in {}", common.out.display());
            }
        },
    }
    Ok(())
}
