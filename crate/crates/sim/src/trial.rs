//! One deterministic trial: agents, broadcast rounds, filters, control, and
//! the records that come out of it.

use airprox_core::avoidance::{build_cone, ConeParams, ConeSet, SearchConfig};
use airprox_core::channel::{sample_rssi, ChannelParams};
use airprox_core::estimator::{
    FilterConfig, NeighborMeasurement, OwnMeasurement, RelativeEkf, OBS_DIM,
};
use airprox_core::geometry::{rotate2d, to_polar, wrap_angle, PlanarVec, RelativePose};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coverage::CoverageGrid;
use crate::world::{
    detect_collision, step_physics, task_controller, wall_distance, AgentState, ControlCondition,
    TaskConfig,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Where the agents start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartLayout {
    /// Distinct arena corners, offset inward by `d_safe`, aimed at the
    /// center. Two agents take opposite corners.
    Corners,
    /// Two agents facing each other across the arena mid-line.
    HeadOn,
}

/// Initial relative-position guess handed to each filter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitGuess {
    /// Towards the arena center, i.e. the initial flight direction.
    ArenaCenter,
    /// A fixed offset in the receiver's body frame.
    Offset { x: f64, y: f64 },
}

/// Which antenna's orientation drives the lobe gain of a link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LobeBearing {
    /// Bearing of the transmitter in the receiver's body frame.
    #[default]
    Receiver,
    /// Bearing of the receiver in the transmitter's body frame.
    Transmitter,
}

/// Everything one trial needs. Deterministic given a seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialConfig {
    pub config_id: u32,
    pub team_size: usize,
    /// Disc radius used for collision detection, m.
    pub mav_radius: f64,
    pub task: TaskConfig,
    pub channel: ChannelParams,
    /// Whose orientation the lobe model follows.
    pub lobe_bearing: LobeBearing,
    pub filter: FilterConfig,
    pub cone: ConeParams,
    pub search: SearchConfig,
    /// Trial cap, s.
    pub t_max: f64,
    pub avoidance: bool,
    pub start: StartLayout,
    pub init_guess: InitGuess,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(2..=3).contains(&self.team_size) {
            return Err(SimError::InvalidConfig(format!(
                "team_size must be 2 or 3, got {}",
                self.team_size
            )));
        }
        if self.start == StartLayout::HeadOn && self.team_size != 2 {
            return Err(SimError::InvalidConfig(
                "head-on starts require exactly 2 agents".into(),
            ));
        }
        if !(self.mav_radius > 0.0) {
            return Err(SimError::InvalidConfig("mav_radius must be > 0".into()));
        }
        if !(self.t_max > 0.0) {
            return Err(SimError::InvalidConfig("t_max must be > 0".into()));
        }
        self.task.validate().map_err(SimError::InvalidConfig)?;
        self.channel
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        self.cone
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        let density = self.density();
        if !(density > 0.0 && density < 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "airspace density {density:.4} must lie in (0, 1)"
            )));
        }
        Ok(())
    }

    /// Fraction of the arena area occupied by the agent discs.
    pub fn density(&self) -> f64 {
        airspace_density(self.team_size, self.mav_radius, self.task.arena_side)
    }
}

/// Airspace density: `m * pi * r^2 / s^2`.
pub fn airspace_density(team_size: usize, mav_radius: f64, arena_side: f64) -> f64 {
    team_size as f64 * std::f64::consts::PI * mav_radius * mav_radius / (arena_side * arena_side)
}

/// Trajectory sample at the control rate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrajSample {
    pub t: f64,
    pub agent: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub cmd_x: f64,
    pub cmd_y: f64,
    pub condition: ControlCondition,
}

/// Per-link filter diagnostics at the control rate: estimated pose against
/// ground truth plus the raw innovation.
#[derive(Clone, Debug, Serialize)]
pub struct LinkRecord {
    pub t: f64,
    /// Receiving (estimating) agent.
    pub rx: usize,
    /// Broadcasting (tracked) agent.
    pub tx: usize,
    pub est_range: f64,
    pub est_bearing: f64,
    pub true_range: f64,
    pub true_bearing: f64,
    pub innovation: [f64; OBS_DIM],
    pub range_clamped: bool,
}

/// How much per-step detail a trial keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordLevel {
    /// Scalar outcome only.
    Summary,
    /// Scalar outcome plus trajectory samples and link diagnostics.
    Full,
}

/// Outcome of one trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialResult {
    pub config_id: u32,
    pub team_size: usize,
    pub seed: u64,
    pub avoidance: bool,
    /// Time flown until collision, or the cap for censored trials, s.
    pub flight_time: f64,
    pub collided: bool,
    /// Reached `t_max` without a collision.
    pub censored: bool,
    pub collision_pair: Option<(usize, usize)>,
    pub collision_pos: Option<(f64, f64)>,
    /// Distance of the collision midpoint to the nearest border, m.
    pub collision_wall_distance: Option<f64>,
    /// Percentage of 0.2 m grid cells entered by any agent.
    pub coverage_pct: f64,
    /// RMS range estimation error across all links and rounds, m.
    pub range_rmse: Option<f64>,
    /// RMS bearing estimation error across all links and rounds, rad.
    pub bearing_rmse: Option<f64>,
    /// Fraction of control decisions spent in each condition.
    pub m1_fraction: f64,
    pub m2_fraction: f64,
    /// Escape searches that exhausted every candidate.
    pub exhausted_count: usize,
    /// Filter updates that hit the range clamp.
    pub range_clamp_count: usize,
    #[serde(skip)]
    pub traj: Vec<TrajSample>,
    #[serde(skip)]
    pub links: Vec<LinkRecord>,
}

const CORNER_SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)];

fn start_positions(cfg: &TrialConfig) -> Vec<PlanarVec> {
    let inset = cfg.task.arena_side / 2.0 - cfg.task.d_safe;
    match cfg.start {
        StartLayout::Corners => (0..cfg.team_size)
            .map(|k| {
                let (sx, sy) = CORNER_SIGNS[k];
                PlanarVec::new(sx * inset, sy * inset)
            })
            .collect(),
        StartLayout::HeadOn => vec![PlanarVec::new(-inset, 0.0), PlanarVec::new(inset, 0.0)],
    }
}

/// Gaussian draw helper so all state noise flows through one code path.
fn gauss<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    sigma * n
}

/// Relative pose of agent `tx` as seen from agent `rx`, from ground truth.
fn true_relative_pose(agents: &[AgentState], rx: usize, tx: usize) -> RelativePose {
    let rel_world = agents[tx].pos - agents[rx].pos;
    let rel_body = rotate2d(rel_world, -agents[rx].psi);
    let z_rel = agents[tx].z - agents[rx].z;
    let (rho, beta) = to_polar(rel_body, z_rel);
    RelativePose::new(rho, beta, z_rel, wrap_angle(agents[tx].psi - agents[rx].psi))
}

/// One broadcast as it arrived at a receiver.
#[derive(Clone, Debug)]
pub struct ReceivedBroadcast {
    /// Broadcasting agent.
    pub tx: usize,
    pub measurement: NeighborMeasurement,
    /// Ground-truth relative pose of the sender at reception, for
    /// diagnostics.
    pub truth: RelativePose,
}

/// Runs one slotted broadcast round: every agent broadcasts once, in id
/// order, and every other agent receives the sender's communicated state
/// (velocity, heading, height corrupted by the configured noise) plus an
/// RSSI sample drawn from the true geometry of the link.
///
/// Each agent measures its own state once per round; that measurement is
/// both broadcast and reused by the agent's own filters. Returns the
/// own-state measurements and, per receiver, the broadcasts it heard.
pub fn broadcast_round(
    agents: &[AgentState],
    task: &TaskConfig,
    channel: &ChannelParams,
    lobe_bearing: LobeBearing,
    own_rngs: &mut [ChaCha8Rng],
    link_rngs: &mut [ChaCha8Rng],
) -> Result<(Vec<OwnMeasurement>, Vec<Vec<ReceivedBroadcast>>), SimError> {
    let m = agents.len();
    let own_meas: Vec<OwnMeasurement> = agents
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let noise = &task.state_noise;
            let rng = &mut own_rngs[k];
            let vel_body = rotate2d(a.vel, -a.psi);
            OwnMeasurement {
                vel: PlanarVec::new(
                    vel_body.x + gauss(rng, noise.sigma_vel),
                    vel_body.y + gauss(rng, noise.sigma_vel),
                ),
                yaw: a.psi + gauss(rng, noise.sigma_yaw),
                height: a.z + gauss(rng, noise.sigma_height),
            }
        })
        .collect();

    let mut received: Vec<Vec<ReceivedBroadcast>> = vec![Vec::with_capacity(m - 1); m];
    for tx in 0..m {
        for rx in 0..m {
            if rx == tx {
                continue;
            }
            let truth = true_relative_pose(agents, rx, tx);
            let lobe_beta = match lobe_bearing {
                LobeBearing::Receiver => truth.beta,
                LobeBearing::Transmitter => true_relative_pose(agents, tx, rx).beta,
            };
            let rssi = sample_rssi(truth.rho, lobe_beta, channel, &mut link_rngs[tx * m + rx])
                .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
            received[rx].push(ReceivedBroadcast {
                tx,
                measurement: NeighborMeasurement {
                    rssi,
                    vel: own_meas[tx].vel,
                    yaw: own_meas[tx].yaw,
                    height: own_meas[tx].height,
                },
                truth,
            });
        }
    }
    Ok((own_meas, received))
}

/// Runs one trial to collision or the time cap.
///
/// Broadcast rounds happen every `dt_comm` starting at `t = dt_comm`; within
/// a round the agents broadcast in id order, every receiver fuses each
/// message (predict + update), and each agent then makes one control
/// decision. Physics integrates at `dt_physics` in between.
///
/// All randomness comes from per-purpose ChaCha streams derived from `seed`:
/// stream `k` carries agent `k`'s own-state measurement noise, stream
/// `m + tx * m + rx` the shadowing of the `tx -> rx` link. Identical seeds
/// therefore reproduce trials bit for bit regardless of parallelism.
pub fn run_trial(cfg: &TrialConfig, seed: u64, record: RecordLevel) -> Result<TrialResult, SimError> {
    cfg.validate()?;
    let m = cfg.team_size;
    let dt = cfg.task.dt_physics;
    let comm_every = cfg.task.comm_every();
    let n_steps = (cfg.t_max / dt).round() as usize;

    // Agents start at rest, commanded towards the arena center.
    let mut agents: Vec<AgentState> = start_positions(cfg)
        .into_iter()
        .map(|pos| {
            let mut a = AgentState::at_rest(pos);
            a.cmd_vel = (-pos).scaled_to(cfg.task.v_nominal);
            a
        })
        .collect();

    let mut own_rngs: Vec<ChaCha8Rng> = (0..m)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            rng
        })
        .collect();
    let mut link_rngs: Vec<ChaCha8Rng> = (0..m * m)
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((m + idx) as u64);
            rng
        })
        .collect();

    // filters[rx][tx] tracks agent tx from agent rx; the rx == tx slot stays
    // unused.
    let mut filters: Vec<Vec<Option<RelativeEkf>>> = (0..m)
        .map(|rx| {
            (0..m)
                .map(|tx| {
                    if rx == tx {
                        return None;
                    }
                    let guess = match cfg.init_guess {
                        InitGuess::ArenaCenter => rotate2d(-agents[rx].pos, -agents[rx].psi),
                        InitGuess::Offset { x, y } => PlanarVec::new(x, y),
                    };
                    let own = OwnMeasurement {
                        vel: rotate2d(agents[rx].vel, -agents[rx].psi),
                        yaw: agents[rx].psi,
                        height: agents[rx].z,
                    };
                    Some(RelativeEkf::new(&cfg.filter, guess, &own, None))
                })
                .collect()
        })
        .collect();

    let mut coverage = CoverageGrid::new(cfg.task.arena_side);
    for a in &agents {
        coverage.mark(a.pos, cfg.task.arena_side);
    }

    let mut traj = Vec::new();
    let mut links = Vec::new();
    if record == RecordLevel::Full {
        for (k, a) in agents.iter().enumerate() {
            traj.push(TrajSample {
                t: 0.0,
                agent: k,
                x: a.pos.x,
                y: a.pos.y,
                vx: a.vel.x,
                vy: a.vel.y,
                cmd_x: a.cmd_vel.x,
                cmd_y: a.cmd_vel.y,
                condition: ControlCondition::Cruise,
            });
        }
    }

    let mut sum_sq_range = 0.0;
    let mut sum_sq_bearing = 0.0;
    let mut err_samples = 0usize;
    let mut m1_count = 0usize;
    let mut m2_count = 0usize;
    let mut decision_count = 0usize;
    let mut exhausted_count = 0usize;
    let mut range_clamp_count = 0usize;

    let mut collided = false;
    let mut collision_pair = None;
    let mut collision_pos = None;
    let mut flight_time = cfg.t_max;

    for step in 0..n_steps {
        let t = step as f64 * dt;

        if step > 0 && step % comm_every == 0 {
            let (own_meas, received) = broadcast_round(
                &agents,
                &cfg.task,
                &cfg.channel,
                cfg.lobe_bearing,
                &mut own_rngs,
                &mut link_rngs,
            )?;

            for (rx, broadcasts) in received.iter().enumerate() {
                for broadcast in broadcasts {
                    let filter = filters[rx][broadcast.tx]
                        .as_mut()
                        .expect("off-diagonal filter");
                    filter.predict(cfg.task.dt_comm);
                    let report = filter.update(&own_meas[rx], &broadcast.measurement);
                    if report.range_clamped {
                        range_clamp_count += 1;
                    }

                    let est = filter.estimate();
                    let truth = &broadcast.truth;
                    sum_sq_range += (est.rho - truth.rho).powi(2);
                    sum_sq_bearing += wrap_angle(est.beta - truth.beta).powi(2);
                    err_samples += 1;

                    if record == RecordLevel::Full {
                        let mut innovation = [0.0; OBS_DIM];
                        for (dst, src) in innovation.iter_mut().zip(report.innovation.iter()) {
                            *dst = *src;
                        }
                        links.push(LinkRecord {
                            t,
                            rx,
                            tx: broadcast.tx,
                            est_range: est.rho,
                            est_bearing: est.beta,
                            true_range: truth.rho,
                            true_bearing: truth.beta,
                            innovation,
                            range_clamped: report.range_clamped,
                        });
                    }
                }
            }

            // Control acts once per round, after all slots.
            for k in 0..m {
                let mut cones = ConeSet::new();
                if cfg.avoidance {
                    // The k == k slot is None; every tracked neighbor
                    // contributes one cone.
                    for filter in filters[k].iter().flatten() {
                        let (cone, _) = build_cone(
                            &filter.estimate(),
                            filter.state().neighbor_vel(),
                            &cfg.cone,
                        );
                        cones.push(cone);
                    }
                }
                let decision =
                    task_controller(&agents[k], &cones, &cfg.task, &cfg.search, cfg.avoidance);
                agents[k].cmd_vel = decision.cmd;
                decision_count += 1;
                match decision.condition {
                    ControlCondition::M1 => m1_count += 1,
                    ControlCondition::M2 => m2_count += 1,
                    ControlCondition::Cruise => {}
                }
                if decision.exhausted {
                    exhausted_count += 1;
                }
                if record == RecordLevel::Full {
                    let a = &agents[k];
                    traj.push(TrajSample {
                        t,
                        agent: k,
                        x: a.pos.x,
                        y: a.pos.y,
                        vx: a.vel.x,
                        vy: a.vel.y,
                        cmd_x: a.cmd_vel.x,
                        cmd_y: a.cmd_vel.y,
                        condition: decision.condition,
                    });
                }
            }
        }

        for a in agents.iter_mut() {
            step_physics(a, dt, &cfg.task);
            coverage.mark(a.pos, cfg.task.arena_side);
        }

        let positions: Vec<PlanarVec> = agents.iter().map(|a| a.pos).collect();
        if let Some((i, j)) = detect_collision(&positions, cfg.mav_radius) {
            collided = true;
            collision_pair = Some((i, j));
            let mid = (positions[i] + positions[j]) * 0.5;
            collision_pos = Some(mid);
            flight_time = (step + 1) as f64 * dt;
            break;
        }
    }

    let denom = decision_count.max(1) as f64;
    Ok(TrialResult {
        config_id: cfg.config_id,
        team_size: m,
        seed,
        avoidance: cfg.avoidance,
        flight_time,
        collided,
        censored: !collided,
        collision_pair,
        collision_pos: collision_pos.map(|p| (p.x, p.y)),
        collision_wall_distance: collision_pos.map(|p| wall_distance(p, cfg.task.arena_side)),
        coverage_pct: coverage.percent(),
        range_rmse: (err_samples > 0).then(|| (sum_sq_range / err_samples as f64).sqrt()),
        bearing_rmse: (err_samples > 0).then(|| (sum_sq_bearing / err_samples as f64).sqrt()),
        m1_fraction: m1_count as f64 / denom,
        m2_fraction: m2_count as f64 / denom,
        exhausted_count,
        range_clamp_count,
        traj,
        links,
    })
}
