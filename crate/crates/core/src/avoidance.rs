//! Collision cones and the clockwise escape-velocity search.
//!
//! For every tracked neighbor, a cone in velocity space collects the own
//! velocities that would close in on that neighbor. The cone is centered on
//! the estimated bearing, widened as range shrinks, and translated by the
//! estimated neighbor velocity so that it accounts for a moving obstacle. The
//! per-neighbor cones are superimposed into a single forbidden set; when the
//! current velocity falls inside it, a new command is found by sweeping
//! candidate directions clockwise from the desired one.
//!
//! Search direction convention
//! ---------------------------
//!
//! Bearings follow the x-forward / y-right body frame. "Clockwise" means
//! candidates are enumerated at *decreasing* bearing angles:
//!
//! ```text
//!          +x (forward, bearing 0)
//!           ^
//!           |      candidate 1 at -step
//!  search   |     /
//!  order    |    /  candidate 2 at -2*step
//!   |       |   /
//!   v       |  /
//!  -y <-----+-----> +y (bearing +PI/2)
//! ```
//!
//! Every vehicle sweeping the same way is what breaks the symmetry of two
//! vehicles meeting head-on: each one bends to the same side relative to its
//! own heading, so they separate instead of mirroring each other's evasions
//! back and forth.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::{wrap_angle, PlanarVec, RelativePose};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

const TAU: f64 = 2.0 * PI;

/// Default cap on the expansion angle, just short of a half-plane-degenerate
/// cone. The raw formula tends to PI as the range goes to zero.
pub const DEFAULT_MAX_EXPANSION: f64 = PI - 0.01;

/// Range below which a cone is built from a clamped value instead.
const MIN_CONE_RANGE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AvoidanceError {
    /// Expansion angles are only defined for strictly positive ranges.
    NonPositiveRange,
    /// The requested equivalence angle is not above the asymptote.
    InvalidTuning { alpha_eq: f64, asymptote: f64 },
    /// Parameter validation failure.
    InvalidParams(&'static str),
}

impl fmt::Display for AvoidanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AvoidanceError::NonPositiveRange => write!(f, "range must be > 0"),
            AvoidanceError::InvalidTuning { alpha_eq, asymptote } => write!(
                f,
                "equivalence angle {alpha_eq} must lie in (asymptote, PI) with asymptote {asymptote}"
            ),
            AvoidanceError::InvalidParams(what) => write!(f, "invalid cone parameters: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AvoidanceError {}

/// Geometry and tuning of the per-neighbor cones.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeParams {
    /// Vehicle radius, m (vehicles are modeled as equal circles).
    pub radius: f64,
    /// Estimate-quality coefficient; larger values narrow the cone.
    pub kappa_alpha: f64,
    /// Extra margin, m. May be negative down to `-2 * radius`, which makes
    /// the expansion angle decay faster with distance (useful in small
    /// rooms).
    pub epsilon_alpha: f64,
    /// Upper clamp on the expansion angle, strictly below PI.
    pub max_expansion: f64,
}

impl ConeParams {
    pub fn new(radius: f64, kappa_alpha: f64, epsilon_alpha: f64) -> Result<Self, AvoidanceError> {
        let params = Self {
            radius,
            kappa_alpha,
            epsilon_alpha,
            max_expansion: DEFAULT_MAX_EXPANSION,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), AvoidanceError> {
        if !(self.radius > 0.0) {
            return Err(AvoidanceError::InvalidParams("radius must be > 0"));
        }
        if !(self.kappa_alpha >= 1.0) {
            return Err(AvoidanceError::InvalidParams("kappa_alpha must be >= 1"));
        }
        if !(self.epsilon_alpha >= -2.0 * self.radius) {
            return Err(AvoidanceError::InvalidParams(
                "epsilon_alpha must be >= -2 * radius",
            ));
        }
        if !(self.max_expansion > 0.0 && self.max_expansion < PI) {
            return Err(AvoidanceError::InvalidParams(
                "max_expansion must lie in (0, PI)",
            ));
        }
        Ok(())
    }

    /// Infimum of the expansion angle over all ranges: `2 * atan(1 / kappa)`.
    pub fn asymptote(&self) -> f64 {
        asymptote_angle(self.kappa_alpha)
    }
}

/// Lower bound of the expansion angle for a given quality coefficient.
pub fn asymptote_angle(kappa_alpha: f64) -> f64 {
    2.0 * (1.0 / kappa_alpha).atan()
}

/// Full opening angle of the cone at an estimated range.
///
/// `alpha = 2 * atan((2r + rho + eps) / (kappa * rho))`, clamped to
/// `(0, max_expansion]`. The angle widens as the range shrinks and decays
/// towards the asymptote as it grows.
pub fn expansion_angle(rho_est: f64, params: &ConeParams) -> Result<f64, AvoidanceError> {
    if !(rho_est > 0.0) {
        return Err(AvoidanceError::NonPositiveRange);
    }
    let numerator = 2.0 * params.radius + rho_est + params.epsilon_alpha;
    let alpha = 2.0 * (numerator / (params.kappa_alpha * rho_est)).atan();
    Ok(alpha.min(params.max_expansion))
}

/// Solves the margin that produces a desired expansion angle `alpha_eq` at a
/// reference range `rho_eq`:
///
/// `eps = kappa * rho_eq * tan(alpha_eq / 2) - 2r - rho_eq`
///
/// Substituting the result back into [`expansion_angle`] at `rho_eq` recovers
/// `alpha_eq` exactly. `alpha_eq` must lie strictly between the asymptote and
/// PI.
pub fn epsilon_from_pair(
    rho_eq: f64,
    alpha_eq: f64,
    radius: f64,
    kappa_alpha: f64,
) -> Result<f64, AvoidanceError> {
    if !(rho_eq > 0.0) {
        return Err(AvoidanceError::NonPositiveRange);
    }
    let asymptote = asymptote_angle(kappa_alpha);
    if !(alpha_eq > asymptote && alpha_eq < PI) {
        return Err(AvoidanceError::InvalidTuning { alpha_eq, asymptote });
    }
    Ok(kappa_alpha * rho_eq * (alpha_eq / 2.0).tan() - 2.0 * radius - rho_eq)
}

/// One neighbor's cone in the own velocity space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    /// Velocity-space translation: the estimated neighbor velocity in the
    /// own frame. A static neighbor leaves the apex at the origin.
    pub apex: PlanarVec,
    /// Direction of the cone axis: the estimated bearing to the neighbor.
    pub axis_bearing: f64,
    /// Half of the expansion angle; in `(0, PI/2)` given the clamp.
    pub half_angle: f64,
}

impl Cone {
    /// True iff `v` lies inside the cone (boundary inclusive).
    ///
    /// `v == apex` counts as inside: zero velocity relative to a neighbor is
    /// treated conservatively as a potential collision course.
    pub fn contains(&self, v: PlanarVec) -> bool {
        let w = v - self.apex;
        if w.x == 0.0 && w.y == 0.0 {
            return true;
        }
        wrap_angle(w.bearing() - self.axis_bearing).abs() <= self.half_angle
    }
}

/// Superposition of the per-neighbor cones; membership in any member blocks
/// a velocity.
#[derive(Clone, Debug, Default)]
pub struct ConeSet {
    pub cones: Vec<Cone>,
}

impl ConeSet {
    pub fn new() -> Self {
        Self { cones: Vec::new() }
    }

    pub fn push(&mut self, cone: Cone) {
        self.cones.push(cone);
    }

    pub fn contains(&self, v: PlanarVec) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }
}

/// Builds a neighbor's cone from the filter output.
///
/// Returns the cone plus a flag marking a degenerate (clamped) range
/// estimate.
pub fn build_cone(
    estimate: &RelativePose,
    neighbor_vel: PlanarVec,
    params: &ConeParams,
) -> (Cone, bool) {
    let clamped = estimate.rho < MIN_CONE_RANGE;
    let rho = if clamped { MIN_CONE_RANGE } else { estimate.rho };
    // expansion_angle only fails for rho <= 0, which the clamp rules out.
    let alpha = expansion_angle(rho, params).unwrap_or(params.max_expansion);
    (
        Cone {
            apex: neighbor_vel,
            axis_bearing: estimate.beta,
            half_angle: alpha / 2.0,
        },
        clamped,
    )
}

/// Tuning of the escape-velocity search.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    /// Angular increment between candidates, rad.
    pub angle_step: f64,
    /// Speed multiplier applied after a fully blocked revolution.
    pub speed_growth: f64,
    /// Hard speed ceiling, m/s.
    pub max_speed: f64,
}

impl SearchConfig {
    /// Defaults: 0.1 rad steps, 1.5x escalation, ceiling at twice the
    /// nominal speed.
    pub fn for_nominal_speed(v_nominal: f64) -> Self {
        Self {
            angle_step: 0.1,
            speed_growth: 1.5,
            max_speed: 2.0 * v_nominal,
        }
    }
}

/// Outcome of [`escape_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Escape {
    pub velocity: PlanarVec,
    /// No free velocity existed up to `max_speed`; `velocity` is zero and
    /// the caller should hover.
    pub exhausted: bool,
}

/// Finds the first velocity outside the cone set, sweeping clockwise
/// (decreasing bearing) from the desired direction in fixed angular steps at
/// the current speed. A fully blocked revolution raises the speed by
/// `speed_growth` and repeats, up to `max_speed`; total exhaustion commands
/// zero velocity.
pub fn escape_search(desired_v: PlanarVec, set: &ConeSet, config: &SearchConfig) -> Escape {
    debug_assert!(desired_v.norm() > 0.0, "desired velocity must be non-zero");
    let start_bearing = desired_v.bearing();
    let steps_per_rev = (TAU / config.angle_step).ceil() as usize;
    let mut speed = desired_v.norm();

    loop {
        for k in 0..steps_per_rev {
            let bearing = start_bearing - k as f64 * config.angle_step;
            let candidate = PlanarVec::from_bearing(bearing) * speed;
            if !set.contains(candidate) {
                return Escape {
                    velocity: candidate,
                    exhausted: false,
                };
            }
        }
        if speed >= config.max_speed {
            return Escape {
                velocity: PlanarVec::ZERO,
                exhausted: true,
            };
        }
        speed = (speed * config.speed_growth).min(config.max_speed);
    }
}
