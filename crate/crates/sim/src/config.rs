//! Experiment definition: the twelve-configuration grid, TOML loading with
//! per-configuration override blocks, and resolution into trial configs.
//!
//! The exact arena sides and vehicle diameters of the twelve standard
//! configurations are a reconstruction (see README); they keep the grid's
//! sharing structure (configurations 1-4, 5-8, 9-12 share a diameter;
//! 2-5-9, 3-6-10, 4-7-11 and 8-12 share an arena side) and are anchored by
//! configuration 11 = (4 m, 0.5 m) and configuration 2 = (2 m, 0.3 m).
//! Every value can be overridden from a config file.

use std::path::Path;

use airprox_core::avoidance::{epsilon_from_pair, ConeParams, SearchConfig, DEFAULT_MAX_EXPANSION};
use airprox_core::channel::{ChannelParams, LobeModel};
use airprox_core::estimator::{FilterConfig, MeasurementNoise, ProcessNoise};
use serde::Deserialize;

use crate::scenario::CircleConfig;
use crate::trial::{InitGuess, LobeBearing, StartLayout, TrialConfig};
use crate::world::TaskConfig;

/// `(id, arena_side, vehicle_diameter)` of the default campaign grid.
pub const DEFAULT_GRID: [(u32, f64, f64); 12] = [
    (1, 1.5, 0.3),
    (2, 2.0, 0.3),
    (3, 3.0, 0.3),
    (4, 4.0, 0.3),
    (5, 2.0, 0.4),
    (6, 3.0, 0.4),
    (7, 4.0, 0.4),
    (8, 5.0, 0.4),
    (9, 2.0, 0.5),
    (10, 3.0, 0.5),
    (11, 4.0, 0.5),
    (12, 5.0, 0.5),
];

/// Configurations exercised by the noise/lobe ablation study.
pub const ABLATION_CONFIG_IDS: [u32; 6] = [1, 2, 5, 6, 9, 10];

/// Desired cone expansion angle at the reference range, rad.
pub const DEFAULT_ALPHA_EQ: f64 = 1.7;

pub fn grid_defaults(id: u32) -> Option<(f64, f64)> {
    DEFAULT_GRID
        .iter()
        .find(|(gid, _, _)| *gid == id)
        .map(|(_, side, diam)| (*side, *diam))
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config validation error: {0}")]
    Invalid(String),
}

/// One resolved sweep cell: a configuration at a specific team size.
#[derive(Clone, Debug)]
pub struct Cell {
    pub config_id: u32,
    pub team_size: usize,
    pub trials: usize,
    pub trial: TrialConfig,
}

/// A fully resolved experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub master_seed: u64,
    pub trials: usize,
    pub cells: Vec<Cell>,
    pub circle: CircleConfig,
}

/// Coefficient of the default third-order lobe model, dB.
///
/// The third-order equal-weight form is kept, but the absolute scale is set
/// to 2 dB (a peak swing of about +-8 dB): a 1 dB scale produces lobes too
/// weak to matter next to 5 dB shadowing, which contradicts the ablation
/// finding that lobe removal is the bigger lever. See README.
pub const DEFAULT_LOBE_COEFF: f64 = 2.0;

/// Campaign channel defaults: free-space LD model with 5 dB shadowing and
/// equal-weight third-order lobes.
pub fn default_channel() -> ChannelParams {
    let lobe = LobeModel::new(
        vec![DEFAULT_LOBE_COEFF; 3],
        vec![DEFAULT_LOBE_COEFF; 3],
        2.0 * std::f64::consts::PI,
    )
    .expect("default lobe model is valid");
    ChannelParams::new(-63.0, 2.0, 5.0)
        .expect("default channel params are valid")
        .with_lobe(lobe)
}

fn default_cone(mav_radius: f64, arena_side: f64) -> ConeParams {
    let epsilon = epsilon_from_pair(arena_side / 2.0, DEFAULT_ALPHA_EQ, mav_radius, 1.0)
        .expect("default cone tuning is valid");
    ConeParams {
        radius: mav_radius,
        kappa_alpha: 1.0,
        epsilon_alpha: epsilon,
        max_expansion: DEFAULT_MAX_EXPANSION,
    }
}

/// Campaign-default trial config for a grid configuration id.
///
/// Panics if `config_id` is not in 1..=12; use a config file to define
/// custom geometries.
pub fn default_trial_config(config_id: u32, team_size: usize) -> TrialConfig {
    let (arena_side, diameter) =
        grid_defaults(config_id).expect("config_id must be one of the twelve grid entries");
    let mav_radius = diameter / 2.0;
    let task = TaskConfig {
        arena_side,
        ..TaskConfig::default()
    };
    let channel = default_channel();
    let filter = FilterConfig::default().with_channel(&channel);
    TrialConfig {
        config_id,
        team_size,
        mav_radius,
        search: SearchConfig::for_nominal_speed(task.v_nominal),
        cone: default_cone(mav_radius, arena_side),
        task,
        channel,
        lobe_bearing: LobeBearing::default(),
        filter,
        t_max: 500.0,
        avoidance: true,
        start: StartLayout::Corners,
        init_guess: InitGuess::ArenaCenter,
    }
}

impl Experiment {
    /// The full default campaign: all twelve configurations, both team
    /// sizes, 100 trials per cell.
    pub fn default_campaign() -> Self {
        let mut cells = Vec::new();
        for (id, _, _) in DEFAULT_GRID {
            for team_size in [2usize, 3] {
                cells.push(Cell {
                    config_id: id,
                    team_size,
                    trials: 100,
                    trial: default_trial_config(id, team_size),
                });
            }
        }
        Self {
            master_seed: 42,
            trials: 100,
            cells,
            circle: CircleConfig::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawExperiment = toml::from_str(text)?;
        resolve(raw)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cells.is_empty() {
            return Err(ConfigError::Invalid("no configurations defined".into()));
        }
        for cell in &self.cells {
            cell.trial.validate().map_err(|e| {
                ConfigError::Invalid(format!(
                    "configuration id {} (team size {}): {e}",
                    cell.config_id, cell.team_size
                ))
            })?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Raw TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    master_seed: Option<u64>,
    trials: Option<usize>,
    t_max: Option<f64>,
    init_guess: Option<InitGuess>,
    task: Option<RawTask>,
    channel: Option<RawChannel>,
    filter: Option<RawFilter>,
    cone: Option<RawCone>,
    search: Option<RawSearch>,
    circle: Option<RawCircle>,
    #[serde(default)]
    configuration: Vec<RawConfiguration>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    v_nominal: Option<f64>,
    d_safe: Option<f64>,
    dt_physics: Option<f64>,
    dt_comm: Option<f64>,
    vel_time_constant: Option<f64>,
    sigma_vel: Option<f64>,
    sigma_yaw: Option<f64>,
    sigma_height: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    p_n: Option<f64>,
    gamma_l: Option<f64>,
    sigma_shadow: Option<f64>,
    lobes: Option<RawLobes>,
    /// `"receiver"` (default) or `"transmitter"`.
    lobe_bearing: Option<LobeBearing>,
    quantize: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawLobes {
    /// `"none"` or `"unit_third_order"`.
    Named(String),
    Explicit {
        cosine: Vec<f64>,
        sine: Vec<f64>,
        period: Option<f64>,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    sigma_rssi: Option<f64>,
    sigma_vel: Option<f64>,
    sigma_yaw: Option<f64>,
    sigma_height: Option<f64>,
    q_sigma_pos: Option<f64>,
    q_sigma_vel: Option<f64>,
    q_sigma_yaw: Option<f64>,
    q_sigma_height: Option<f64>,
    init_cov_scale: Option<f64>,
    epsilon_range: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCone {
    kappa_alpha: Option<f64>,
    alpha_eq: Option<f64>,
    rho_eq: Option<f64>,
    epsilon_alpha: Option<f64>,
    max_expansion: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    angle_step: Option<f64>,
    speed_growth: Option<f64>,
    max_speed: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    radius: Option<f64>,
    speed: Option<f64>,
    duration: Option<f64>,
    realizations: Option<usize>,
    state_noise_sd: Option<f64>,
    rssi_sigma: Option<f64>,
    p_n: Option<f64>,
    gamma_l: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfiguration {
    id: u32,
    arena_side: Option<f64>,
    mav_radius: Option<f64>,
    team_size: Option<usize>,
    trials: Option<usize>,
    t_max: Option<f64>,
    init_guess: Option<InitGuess>,
    task: Option<RawTask>,
    channel: Option<RawChannel>,
    filter: Option<RawFilter>,
    cone: Option<RawCone>,
    search: Option<RawSearch>,
}

fn apply_task(cfg: &mut TaskConfig, raw: &RawTask) {
    if let Some(v) = raw.v_nominal {
        cfg.v_nominal = v;
    }
    if let Some(v) = raw.d_safe {
        cfg.d_safe = v;
    }
    if let Some(v) = raw.dt_physics {
        cfg.dt_physics = v;
    }
    if let Some(v) = raw.dt_comm {
        cfg.dt_comm = v;
    }
    if let Some(v) = raw.vel_time_constant {
        cfg.vel_time_constant = v;
    }
    let noise = &mut cfg.state_noise;
    if let Some(v) = raw.sigma_vel {
        noise.sigma_vel = v;
    }
    if let Some(v) = raw.sigma_yaw {
        noise.sigma_yaw = v;
    }
    if let Some(v) = raw.sigma_height {
        noise.sigma_height = v;
    }
}

fn apply_channel(cfg: &mut ChannelParams, raw: &RawChannel) -> Result<(), ConfigError> {
    if let Some(v) = raw.p_n {
        cfg.p_n = v;
    }
    if let Some(v) = raw.gamma_l {
        cfg.gamma_l = v;
    }
    if let Some(v) = raw.sigma_shadow {
        cfg.sigma_shadow = v;
    }
    if let Some(v) = raw.quantize {
        cfg.quantize = v;
    }
    if let Some(lobes) = &raw.lobes {
        cfg.lobe = match lobes {
            RawLobes::Named(name) => match name.as_str() {
                "none" => None,
                "default" => default_channel().lobe,
                "unit_third_order" => Some(LobeModel::unit_third_order()),
                other => {
                    return Err(ConfigError::Invalid(format!(
                        "channel.lobes: unknown preset {other:?} (expected \"none\", \"default\", or \"unit_third_order\")"
                    )))
                }
            },
            RawLobes::Explicit { cosine, sine, period } => Some(
                LobeModel::new(
                    cosine.clone(),
                    sine.clone(),
                    period.unwrap_or(2.0 * std::f64::consts::PI),
                )
                .map_err(|e| ConfigError::Invalid(format!("channel.lobes: {e}")))?,
            ),
        };
    }
    Ok(())
}

fn apply_filter(cfg: &mut FilterConfig, raw: &RawFilter) {
    let m: &mut MeasurementNoise = &mut cfg.measurement_noise;
    if let Some(v) = raw.sigma_rssi {
        m.sigma_rssi = v;
    }
    if let Some(v) = raw.sigma_vel {
        m.sigma_vel = v;
    }
    if let Some(v) = raw.sigma_yaw {
        m.sigma_yaw = v;
    }
    if let Some(v) = raw.sigma_height {
        m.sigma_height = v;
    }
    let q: &mut ProcessNoise = &mut cfg.process_noise;
    if let Some(v) = raw.q_sigma_pos {
        q.sigma_pos = v;
    }
    if let Some(v) = raw.q_sigma_vel {
        q.sigma_vel = v;
    }
    if let Some(v) = raw.q_sigma_yaw {
        q.sigma_yaw = v;
    }
    if let Some(v) = raw.q_sigma_height {
        q.sigma_height = v;
    }
    if let Some(v) = raw.init_cov_scale {
        cfg.init_cov_scale = v;
    }
    if let Some(v) = raw.epsilon_range {
        cfg.epsilon_range = v;
    }
}

fn apply_search(cfg: &mut SearchConfig, raw: &RawSearch) {
    if let Some(v) = raw.angle_step {
        cfg.angle_step = v;
    }
    if let Some(v) = raw.speed_growth {
        cfg.speed_growth = v;
    }
    if let Some(v) = raw.max_speed {
        cfg.max_speed = v;
    }
}

/// Cone resolution: an explicit `epsilon_alpha` wins; otherwise the margin
/// comes from the (rho_eq, alpha_eq) pair with rho_eq defaulting to half the
/// arena side.
fn resolve_cone(
    mav_radius: f64,
    arena_side: f64,
    global: Option<&RawCone>,
    local: Option<&RawCone>,
) -> Result<ConeParams, ConfigError> {
    let get = |f: fn(&RawCone) -> Option<f64>| local.and_then(f).or_else(|| global.and_then(f));

    let kappa = get(|r| r.kappa_alpha).unwrap_or(1.0);
    let alpha_eq = get(|r| r.alpha_eq).unwrap_or(DEFAULT_ALPHA_EQ);
    let rho_eq = get(|r| r.rho_eq).unwrap_or(arena_side / 2.0);
    let max_expansion = get(|r| r.max_expansion).unwrap_or(DEFAULT_MAX_EXPANSION);
    let epsilon = match get(|r| r.epsilon_alpha) {
        Some(eps) => eps,
        None => epsilon_from_pair(rho_eq, alpha_eq, mav_radius, kappa)
            .map_err(|e| ConfigError::Invalid(format!("cone tuning: {e}")))?,
    };
    let params = ConeParams {
        radius: mav_radius,
        kappa_alpha: kappa,
        epsilon_alpha: epsilon,
        max_expansion,
    };
    params
        .validate()
        .map_err(|e| ConfigError::Invalid(format!("cone: {e}")))?;
    Ok(params)
}

fn resolve(raw: RawExperiment) -> Result<Experiment, ConfigError> {
    let master_seed = raw.master_seed.unwrap_or(42);
    let trials = raw.trials.unwrap_or(100);
    let t_max = raw.t_max.unwrap_or(500.0);
    let init_guess = raw.init_guess.unwrap_or(InitGuess::ArenaCenter);

    let rows: Vec<RawConfiguration> = if raw.configuration.is_empty() {
        DEFAULT_GRID
            .iter()
            .map(|(id, _, _)| RawConfiguration {
                id: *id,
                arena_side: None,
                mav_radius: None,
                team_size: None,
                trials: None,
                t_max: None,
                init_guess: None,
                task: None,
                channel: None,
                filter: None,
                cone: None,
                search: None,
            })
            .collect()
    } else {
        raw.configuration
    };

    let mut cells = Vec::new();
    for row in &rows {
        if !(1..=12).contains(&row.id) {
            return Err(ConfigError::Invalid(format!(
                "configuration id {} out of range 1..=12",
                row.id
            )));
        }
        let grid = grid_defaults(row.id);
        let arena_side = row
            .arena_side
            .or(grid.map(|(side, _)| side))
            .ok_or_else(|| {
                ConfigError::Invalid(format!("configuration id {}: arena_side missing", row.id))
            })?;
        let mav_radius = row
            .mav_radius
            .or(grid.map(|(_, diam)| diam / 2.0))
            .ok_or_else(|| {
                ConfigError::Invalid(format!("configuration id {}: mav_radius missing", row.id))
            })?;

        let mut task = TaskConfig {
            arena_side,
            ..TaskConfig::default()
        };
        if let Some(g) = &raw.task {
            apply_task(&mut task, g);
        }
        if let Some(l) = &row.task {
            apply_task(&mut task, l);
        }
        task.arena_side = arena_side;

        let mut channel = default_channel();
        if let Some(g) = &raw.channel {
            apply_channel(&mut channel, g)?;
        }
        if let Some(l) = &row.channel {
            apply_channel(&mut channel, l)?;
        }
        let lobe_bearing = row
            .channel
            .as_ref()
            .and_then(|c| c.lobe_bearing)
            .or_else(|| raw.channel.as_ref().and_then(|c| c.lobe_bearing))
            .unwrap_or_default();

        let mut filter = FilterConfig::default().with_channel(&channel);
        if let Some(g) = &raw.filter {
            apply_filter(&mut filter, g);
        }
        if let Some(l) = &row.filter {
            apply_filter(&mut filter, l);
        }

        let cone = resolve_cone(mav_radius, arena_side, raw.cone.as_ref(), row.cone.as_ref())?;

        let mut search = SearchConfig::for_nominal_speed(task.v_nominal);
        if let Some(g) = &raw.search {
            apply_search(&mut search, g);
        }
        if let Some(l) = &row.search {
            apply_search(&mut search, l);
        }

        let team_sizes: Vec<usize> = match row.team_size {
            Some(m) => vec![m],
            None => vec![2, 3],
        };
        for team_size in team_sizes {
            cells.push(Cell {
                config_id: row.id,
                team_size,
                trials: row.trials.unwrap_or(trials),
                trial: TrialConfig {
                    config_id: row.id,
                    team_size,
                    mav_radius,
                    task,
                    channel: channel.clone(),
                    lobe_bearing,
                    filter: filter.clone(),
                    cone,
                    search,
                    t_max: row.t_max.unwrap_or(t_max),
                    avoidance: true,
                    start: StartLayout::Corners,
                    init_guess: row.init_guess.unwrap_or(init_guess),
                },
            });
        }
    }

    let mut circle = CircleConfig::default();
    if let Some(rc) = &raw.circle {
        if let Some(v) = rc.radius {
            circle.radius = v;
        }
        if let Some(v) = rc.speed {
            circle.speed = v;
        }
        if let Some(v) = rc.duration {
            circle.duration = v;
        }
        if let Some(v) = rc.realizations {
            circle.realizations = v;
        }
        if let Some(v) = rc.state_noise_sd {
            circle.state_noise_sd = v;
        }
        if let Some(v) = rc.rssi_sigma {
            circle.rssi_sigma = v;
        }
        if let Some(v) = rc.p_n {
            circle.p_n = v;
        }
        if let Some(v) = rc.gamma_l {
            circle.gamma_l = v;
        }
    }

    let experiment = Experiment {
        master_seed,
        trials,
        cells,
        circle,
    };
    experiment.validate()?;
    Ok(experiment)
}
