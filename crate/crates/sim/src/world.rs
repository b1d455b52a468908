//! The closed-loop world: kinematic agents in a square arena and the task
//! controller that keeps them flying through its center.
//!
//! The arena is centered on the origin. Agents are velocity-controlled
//! points with a disc radius used only for collision detection; the physics
//! is a first-order velocity response followed by Euler integration, a
//! deliberate stand-in for full rotorcraft dynamics that preserves the
//! reactive timescale of the task.

use airprox_core::avoidance::{escape_search, ConeSet, SearchConfig};
use airprox_core::geometry::{rotate2d, PlanarVec};
use serde::{Deserialize, Serialize};

/// Standard deviations of the noise applied to communicated (and own)
/// state measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateNoise {
    pub sigma_vel: f64,
    pub sigma_yaw: f64,
    pub sigma_height: f64,
}

impl Default for StateNoise {
    fn default() -> Self {
        Self {
            sigma_vel: 0.2,
            sigma_yaw: 0.2,
            sigma_height: 0.2,
        }
    }
}

/// Task and world timing parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    /// Cruise speed magnitude, m/s.
    pub v_nominal: f64,
    /// Wall safety distance that triggers condition M1, m.
    pub d_safe: f64,
    /// Side length of the square arena, m.
    pub arena_side: f64,
    /// Physics integration step, s.
    pub dt_physics: f64,
    /// Broadcast round period, s; must be an integer multiple of
    /// `dt_physics`. Control decisions happen at this rate.
    pub dt_comm: f64,
    /// Time constant of the first-order velocity response, s.
    pub vel_time_constant: f64,
    pub state_noise: StateNoise,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            v_nominal: 0.5,
            d_safe: 0.25,
            arena_side: 4.0,
            dt_physics: 0.02,
            dt_comm: 0.2,
            vel_time_constant: 0.5,
            state_noise: StateNoise::default(),
        }
    }
}

impl TaskConfig {
    /// Number of physics steps per broadcast round.
    pub fn comm_every(&self) -> usize {
        (self.dt_comm / self.dt_physics).round() as usize
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.v_nominal > 0.0) {
            return Err("task.v_nominal must be > 0".into());
        }
        if !(self.arena_side > 0.0) {
            return Err("task.arena_side must be > 0".into());
        }
        if !(self.dt_physics > 0.0) || !(self.dt_comm > 0.0) {
            return Err("task.dt_physics and task.dt_comm must be > 0".into());
        }
        let ratio = self.dt_comm / self.dt_physics;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 - 1e-9 {
            return Err("task.dt_comm must be an integer multiple of task.dt_physics".into());
        }
        if !(self.vel_time_constant > 0.0) {
            return Err("task.vel_time_constant must be > 0".into());
        }
        if !(self.d_safe >= 0.0 && self.d_safe < self.arena_side / 2.0) {
            return Err("task.d_safe must lie in [0, arena_side / 2)".into());
        }
        if !(self.state_noise.sigma_vel >= 0.0
            && self.state_noise.sigma_yaw >= 0.0
            && self.state_noise.sigma_height >= 0.0)
        {
            return Err("task.state_noise sigmas must be >= 0".into());
        }
        Ok(())
    }
}

/// One agent's true world state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState {
    /// World-frame position, m.
    pub pos: PlanarVec,
    /// World-frame velocity, m/s.
    pub vel: PlanarVec,
    /// Yaw, rad. The campaign flies with all yaws at zero.
    pub psi: f64,
    /// Height, m.
    pub z: f64,
    /// Commanded world-frame velocity, m/s.
    pub cmd_vel: PlanarVec,
}

impl AgentState {
    pub fn at_rest(pos: PlanarVec) -> Self {
        Self {
            pos,
            vel: PlanarVec::ZERO,
            psi: 0.0,
            z: 0.0,
            cmd_vel: PlanarVec::ZERO,
        }
    }
}

/// Advances one agent by `dt`: first-order velocity tracking towards the
/// command, then Euler position integration. Yaw and height are held (the
/// task is planar).
///
/// Positions are clamped to the arena box. The clamp is a kinematic cage
/// that backs up the M1 wall behavior; velocity is left untouched so that an
/// inward-pointing wall-approach rate is still observable at the border.
pub fn step_physics(agent: &mut AgentState, dt: f64, cfg: &TaskConfig) {
    debug_assert!(dt > 0.0);
    let alpha = (dt / cfg.vel_time_constant).min(1.0);
    agent.vel = agent.vel + (agent.cmd_vel - agent.vel) * alpha;
    agent.pos = agent.pos + agent.vel * dt;
    let half = cfg.arena_side / 2.0;
    agent.pos.x = agent.pos.x.clamp(-half, half);
    agent.pos.y = agent.pos.y.clamp(-half, half);
}

/// Distance from a position to the nearest arena border.
pub fn wall_distance(pos: PlanarVec, arena_side: f64) -> f64 {
    arena_side / 2.0 - pos.x.abs().max(pos.y.abs())
}

/// Time derivative of [`wall_distance`] along `vel` (negative when
/// approaching the nearest wall).
pub fn wall_distance_rate(pos: PlanarVec, vel: PlanarVec, _arena_side: f64) -> f64 {
    if pos.x.abs() >= pos.y.abs() {
        -pos.x.signum() * vel.x
    } else {
        -pos.y.signum() * vel.y
    }
}

/// Which controller branch produced a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlCondition {
    /// Keep the previous command.
    Cruise,
    /// Wall proximity: command rotated towards the arena center.
    M1,
    /// Current velocity inside the cone set: escape search engaged.
    M2,
}

impl ControlCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            ControlCondition::Cruise => "cruise",
            ControlCondition::M1 => "m1",
            ControlCondition::M2 => "m2",
        }
    }
}

/// A command plus bookkeeping about how it was chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlDecision {
    /// World-frame velocity command.
    pub cmd: PlanarVec,
    pub condition: ControlCondition,
    /// Escape search ran out of candidates and commanded hover.
    pub exhausted: bool,
}

/// The per-round task controller.
///
/// The default action keeps the previous command direction at `v_nominal`.
/// Condition M1 (closer than `d_safe` to a wall and approaching it)
/// overrides everything and points the command at the arena center, ignoring
/// the cones. Otherwise condition M2 (the current velocity lies inside the
/// cone set) hands the decision to the clockwise escape search.
///
/// `cones` live in the agent's body frame, as does the escape search; the
/// returned command is world-frame.
pub fn task_controller(
    agent: &AgentState,
    cones: &ConeSet,
    cfg: &TaskConfig,
    search: &SearchConfig,
    avoidance_enabled: bool,
) -> ControlDecision {
    // Previous command re-scaled to the nominal speed. After an exhausted
    // hover (zero command) the recovery direction is the arena center.
    let base = if agent.cmd_vel.norm() > 0.0 {
        agent.cmd_vel.scaled_to(cfg.v_nominal)
    } else {
        (-agent.pos).scaled_to(cfg.v_nominal)
    };

    if wall_distance(agent.pos, cfg.arena_side) < cfg.d_safe
        && wall_distance_rate(agent.pos, agent.vel, cfg.arena_side) < 0.0
    {
        return ControlDecision {
            cmd: (-agent.pos).scaled_to(cfg.v_nominal),
            condition: ControlCondition::M1,
            exhausted: false,
        };
    }

    if avoidance_enabled && !cones.is_empty() {
        let vel_body = rotate2d(agent.vel, -agent.psi);
        if cones.contains(vel_body) {
            let desired_body = rotate2d(base, -agent.psi);
            let escape = escape_search(desired_body, cones, search);
            return ControlDecision {
                cmd: rotate2d(escape.velocity, agent.psi),
                condition: ControlCondition::M2,
                exhausted: escape.exhausted,
            };
        }
    }

    ControlDecision {
        cmd: base,
        condition: ControlCondition::Cruise,
        exhausted: false,
    }
}

/// First pair of agents whose center distance is strictly below `2 * r_c`.
pub fn detect_collision(positions: &[PlanarVec], r_c: f64) -> Option<(usize, usize)> {
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            if (positions[i] - positions[j]).norm() < 2.0 * r_c {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use airprox_core::avoidance::Cone;
    use approx::assert_relative_eq;

    #[test]
    fn physics_first_order_response() {
        let cfg = TaskConfig::default();
        let mut agent = AgentState::at_rest(PlanarVec::ZERO);
        agent.cmd_vel = PlanarVec::new(0.5, 0.0);
        step_physics(&mut agent, 0.02, &cfg);
        assert_relative_eq!(agent.vel.x, 0.02, epsilon = 1e-15);
        assert_eq!(agent.vel.y, 0.0);
    }

    #[test]
    fn physics_reaches_command_when_tau_equals_dt() {
        let cfg = TaskConfig {
            vel_time_constant: 0.02,
            ..TaskConfig::default()
        };
        let mut agent = AgentState::at_rest(PlanarVec::ZERO);
        agent.cmd_vel = PlanarVec::new(0.5, -0.25);
        step_physics(&mut agent, 0.02, &cfg);
        assert_eq!(agent.vel, agent.cmd_vel);
    }

    #[test]
    fn physics_straight_line_when_settled() {
        let cfg = TaskConfig::default();
        let mut agent = AgentState::at_rest(PlanarVec::ZERO);
        agent.vel = PlanarVec::new(0.5, 0.0);
        agent.cmd_vel = agent.vel;
        step_physics(&mut agent, 0.02, &cfg);
        assert_relative_eq!(agent.pos.x, 0.01, epsilon = 1e-15);
        assert_eq!(agent.vel, agent.cmd_vel);
    }

    #[test]
    fn physics_clamps_to_arena() {
        let cfg = TaskConfig::default();
        let mut agent = AgentState::at_rest(PlanarVec::new(1.99, 0.0));
        agent.vel = PlanarVec::new(1.0, 0.0);
        agent.cmd_vel = agent.vel;
        for _ in 0..100 {
            step_physics(&mut agent, 0.02, &cfg);
            assert!(agent.pos.x <= 2.0);
        }
        assert_eq!(agent.pos.x, 2.0);
        // Velocity still points at the wall, so the approach rate stays
        // negative and M1 can fire.
        assert!(wall_distance_rate(agent.pos, agent.vel, 4.0) < 0.0);
    }

    #[test]
    fn wall_distance_examples() {
        assert_relative_eq!(wall_distance(PlanarVec::ZERO, 4.0), 2.0);
        assert_relative_eq!(wall_distance(PlanarVec::new(1.8, 0.3), 4.0), 0.2);
        assert!(wall_distance_rate(PlanarVec::new(1.8, 0.0), PlanarVec::new(0.5, 0.0), 4.0) < 0.0);
        assert!(wall_distance_rate(PlanarVec::new(1.8, 0.0), PlanarVec::new(-0.5, 0.0), 4.0) > 0.0);
    }

    #[test]
    fn controller_keeps_previous_command_mid_arena() {
        let cfg = TaskConfig::default();
        let search = SearchConfig::for_nominal_speed(cfg.v_nominal);
        let mut agent = AgentState::at_rest(PlanarVec::new(0.3, 0.2));
        agent.cmd_vel = PlanarVec::new(0.0, 0.5);
        let decision = task_controller(&agent, &ConeSet::new(), &cfg, &search, true);
        assert_eq!(decision.condition, ControlCondition::Cruise);
        assert_eq!(decision.cmd, PlanarVec::new(0.0, 0.5));
    }

    #[test]
    fn controller_m1_points_at_center() {
        let cfg = TaskConfig::default();
        let search = SearchConfig::for_nominal_speed(cfg.v_nominal);
        // 0.2 m from the +x wall, moving outward.
        let mut agent = AgentState::at_rest(PlanarVec::new(1.8, 0.0));
        agent.vel = PlanarVec::new(0.5, 0.0);
        agent.cmd_vel = agent.vel;
        // A cone that would block the centerward command: M1 ignores it.
        let mut cones = ConeSet::new();
        cones.push(Cone {
            apex: PlanarVec::ZERO,
            axis_bearing: std::f64::consts::PI,
            half_angle: 1.5,
        });
        let decision = task_controller(&agent, &cones, &cfg, &search, true);
        assert_eq!(decision.condition, ControlCondition::M1);
        assert_relative_eq!(decision.cmd.x, -0.5, epsilon = 1e-12);
        assert_relative_eq!(decision.cmd.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn controller_m2_deviates_clockwise() {
        let cfg = TaskConfig::default();
        let search = SearchConfig::for_nominal_speed(cfg.v_nominal);
        let mut agent = AgentState::at_rest(PlanarVec::ZERO);
        agent.vel = PlanarVec::new(0.5, 0.0);
        agent.cmd_vel = agent.vel;
        let mut cones = ConeSet::new();
        cones.push(Cone {
            apex: PlanarVec::ZERO,
            axis_bearing: 0.0,
            half_angle: 0.5,
        });
        let decision = task_controller(&agent, &cones, &cfg, &search, true);
        assert_eq!(decision.condition, ControlCondition::M2);
        // Clockwise = negative bearing.
        assert!(decision.cmd.bearing() < 0.0);
        assert!(!cones.contains(decision.cmd));
    }

    #[test]
    fn controller_ignores_cones_when_avoidance_disabled() {
        let cfg = TaskConfig::default();
        let search = SearchConfig::for_nominal_speed(cfg.v_nominal);
        let mut agent = AgentState::at_rest(PlanarVec::ZERO);
        agent.vel = PlanarVec::new(0.5, 0.0);
        agent.cmd_vel = agent.vel;
        let mut cones = ConeSet::new();
        cones.push(Cone {
            apex: PlanarVec::ZERO,
            axis_bearing: 0.0,
            half_angle: 0.5,
        });
        let decision = task_controller(&agent, &cones, &cfg, &search, false);
        assert_eq!(decision.condition, ControlCondition::Cruise);
    }

    #[test]
    fn collision_detection_thresholds() {
        let r_c = 0.25;
        let far = [PlanarVec::ZERO, PlanarVec::new(3.0, 0.0)];
        assert_eq!(detect_collision(&far, r_c), None);

        let close = [PlanarVec::ZERO, PlanarVec::new(0.49, 0.0)];
        assert_eq!(detect_collision(&close, r_c), Some((0, 1)));

        // Exactly at 2 * r_c: strict inequality, no collision.
        let boundary = [PlanarVec::ZERO, PlanarVec::new(0.5, 0.0)];
        assert_eq!(detect_collision(&boundary, r_c), None);
    }

    #[test]
    fn task_config_validation() {
        let cfg = TaskConfig {
            dt_comm: 0.03,
            ..TaskConfig::default()
        };
        assert!(cfg.validate().is_err());

        let cfg = TaskConfig {
            v_nominal: 0.0,
            ..TaskConfig::default()
        };
        assert!(cfg.validate().is_err());

        assert!(TaskConfig::default().validate().is_ok());
    }
}
