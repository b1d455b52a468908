//! Discrete-time EKF that estimates where a neighbor is, relative to the own
//! body frame, from signal strength plus the neighbor's communicated states.
//!
//! One filter instance tracks one neighbor; a vehicle in a team of `m` runs
//! `m - 1` independent instances. The state vector holds ten scalars:
//!
//! ```text
//! [ x_rel, y_rel,            relative position of the neighbor (m)
//!   vx_own, vy_own,          own planar velocity, own body frame (m/s)
//!   vx_nb, vy_nb,            neighbor velocity rotated into the own frame
//!   psi_nb, psi_own,         yaw angles (rad)
//!   z_nb, z_own ]            heights (m)
//! ```
//!
//! The nine-dimensional observation stacks the RSSI (mapped through the
//! log-distance model at the state's range), the own velocity, the neighbor
//! velocity as communicated in the *neighbor's* frame, both yaws, and both
//! heights. Relative bearing itself is never measured; it becomes observable
//! through motion.

use nalgebra::{SMatrix, SVector};

use crate::channel::ChannelParams;
use crate::geometry::{rotate2d, wrap_angle, PlanarVec, RelativePose};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

pub const STATE_DIM: usize = 10;
pub const OBS_DIM: usize = 9;

pub type StateVec = SVector<f64, STATE_DIM>;
pub type StateMat = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type ObsVec = SVector<f64, OBS_DIM>;
pub type ObsMat = SMatrix<f64, OBS_DIM, STATE_DIM>;

// State vector indices.
const X_REL: usize = 0;
const Y_REL: usize = 1;
const VX_OWN: usize = 2;
const VY_OWN: usize = 3;
const VX_NB: usize = 4;
const VY_NB: usize = 5;
const PSI_NB: usize = 6;
const PSI_OWN: usize = 7;
const Z_NB: usize = 8;
const Z_OWN: usize = 9;

// Observation vector indices.
const OBS_RSSI: usize = 0;
const OBS_PSI_NB: usize = 5;
const OBS_PSI_OWN: usize = 6;

/// Assumed measurement standard deviations (diagonal R).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementNoise {
    /// RSSI, dB.
    pub sigma_rssi: f64,
    /// Velocities (own and communicated), m/s.
    pub sigma_vel: f64,
    /// Yaw measurements, rad.
    pub sigma_yaw: f64,
    /// Height measurements, m.
    pub sigma_height: f64,
}

impl Default for MeasurementNoise {
    fn default() -> Self {
        Self {
            sigma_rssi: 5.0,
            sigma_vel: 0.2,
            sigma_yaw: 0.2,
            sigma_height: 0.2,
        }
    }
}

impl MeasurementNoise {
    fn matrix(&self) -> SMatrix<f64, OBS_DIM, OBS_DIM> {
        let mut r = SMatrix::zeros();
        r[(0, 0)] = self.sigma_rssi * self.sigma_rssi;
        for k in 1..=4 {
            r[(k, k)] = self.sigma_vel * self.sigma_vel;
        }
        for k in 5..=6 {
            r[(k, k)] = self.sigma_yaw * self.sigma_yaw;
        }
        for k in 7..=8 {
            r[(k, k)] = self.sigma_height * self.sigma_height;
        }
        r
    }
}

/// Per-step process noise standard deviations (diagonal Q).
///
/// Position noise is deliberately small relative to the rest: trusting the
/// relative-position propagation is what lets the filter ride out the large
/// RSSI noise.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProcessNoise {
    pub sigma_pos: f64,
    pub sigma_vel: f64,
    pub sigma_yaw: f64,
    pub sigma_height: f64,
}

impl Default for ProcessNoise {
    fn default() -> Self {
        Self {
            sigma_pos: 0.1,
            sigma_vel: 0.5,
            sigma_yaw: 0.5,
            sigma_height: 0.5,
        }
    }
}

impl ProcessNoise {
    fn matrix(&self) -> StateMat {
        let mut q = StateMat::zeros();
        for k in 0..=1 {
            q[(k, k)] = self.sigma_pos * self.sigma_pos;
        }
        for k in 2..=5 {
            q[(k, k)] = self.sigma_vel * self.sigma_vel;
        }
        for k in 6..=7 {
            q[(k, k)] = self.sigma_yaw * self.sigma_yaw;
        }
        for k in 8..=9 {
            q[(k, k)] = self.sigma_height * self.sigma_height;
        }
        q
    }
}

/// A vehicle's measurement of its own state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OwnMeasurement {
    /// Own planar velocity in the own body frame.
    pub vel: PlanarVec,
    pub yaw: f64,
    pub height: f64,
}

/// One received broadcast: communicated states plus the RSSI of the message.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborMeasurement {
    pub rssi: f64,
    /// Neighbor velocity in the *neighbor's* body frame.
    pub vel: PlanarVec,
    pub yaw: f64,
    pub height: f64,
}

/// Filter tuning: noise matrices, the assumed log-distance model, and the
/// range clamp that guards the log singularity at zero range.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterConfig {
    pub measurement_noise: MeasurementNoise,
    pub process_noise: ProcessNoise,
    /// Assumed RSSI at 1 m, dB.
    pub p_n: f64,
    /// Assumed space-loss exponent.
    pub gamma_l: f64,
    /// Scales the whole initial covariance diagonal.
    pub init_cov_scale: f64,
    /// Minimum range at which the observation model is evaluated, m.
    pub epsilon_range: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            measurement_noise: MeasurementNoise::default(),
            process_noise: ProcessNoise::default(),
            p_n: -63.0,
            gamma_l: 2.0,
            init_cov_scale: 1.0,
            epsilon_range: 0.01,
        }
    }
}

impl FilterConfig {
    /// Copies the deterministic part of a channel model into the filter.
    pub fn with_channel(mut self, channel: &ChannelParams) -> Self {
        self.p_n = channel.p_n;
        self.gamma_l = channel.gamma_l;
        self
    }
}

/// Mean and covariance of the filter.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterState {
    pub x: StateVec,
    pub cov: StateMat,
}

impl FilterState {
    pub fn rel_pos(&self) -> PlanarVec {
        PlanarVec::new(self.x[X_REL], self.x[Y_REL])
    }

    pub fn own_vel(&self) -> PlanarVec {
        PlanarVec::new(self.x[VX_OWN], self.x[VY_OWN])
    }

    /// Estimated neighbor velocity expressed in the own body frame.
    pub fn neighbor_vel(&self) -> PlanarVec {
        PlanarVec::new(self.x[VX_NB], self.x[VY_NB])
    }

    pub fn neighbor_yaw(&self) -> f64 {
        self.x[PSI_NB]
    }

    pub fn own_yaw(&self) -> f64 {
        self.x[PSI_OWN]
    }

    pub fn height_diff(&self) -> f64 {
        self.x[Z_NB] - self.x[Z_OWN]
    }

    /// Largest absolute difference between `cov` and its transpose.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..STATE_DIM {
            for j in (i + 1)..STATE_DIM {
                worst = worst.max((self.cov[(i, j)] - self.cov[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_diag(&self) -> f64 {
        (0..STATE_DIM).fold(f64::INFINITY, |acc, k| acc.min(self.cov[(k, k)]))
    }
}

/// What happened during one measurement update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateReport {
    /// Measurement minus predicted observation, yaw rows wrapped.
    pub innovation: ObsVec,
    /// The predicted range was below `epsilon_range` and was clamped.
    pub range_clamped: bool,
    /// The innovation covariance was singular; the update was skipped.
    pub skipped: bool,
}

/// EKF tracking one neighbor's relative position.
#[derive(Clone, Debug)]
pub struct RelativeEkf {
    state: FilterState,
    q: StateMat,
    r: SMatrix<f64, OBS_DIM, OBS_DIM>,
    p_n: f64,
    gamma_l: f64,
    epsilon_range: f64,
}

impl RelativeEkf {
    /// Creates a filter from an initial position guess and whatever state
    /// information is at hand. Missing neighbor information starts at zero.
    pub fn new(
        config: &FilterConfig,
        initial_guess: PlanarVec,
        own: &OwnMeasurement,
        neighbor: Option<&NeighborMeasurement>,
    ) -> Self {
        debug_assert!(config.init_cov_scale > 0.0);
        let mut x = StateVec::zeros();
        x[X_REL] = initial_guess.x;
        x[Y_REL] = initial_guess.y;
        x[VX_OWN] = own.vel.x;
        x[VY_OWN] = own.vel.y;
        x[PSI_OWN] = wrap_angle(own.yaw);
        x[Z_OWN] = own.height;
        if let Some(nb) = neighbor {
            let psi_rel = wrap_angle(nb.yaw - own.yaw);
            let v_in_own = rotate2d(nb.vel, psi_rel);
            x[VX_NB] = v_in_own.x;
            x[VY_NB] = v_in_own.y;
            x[PSI_NB] = wrap_angle(nb.yaw);
            x[Z_NB] = nb.height;
        }

        let m = &config.measurement_noise;
        let mut cov = StateMat::zeros();
        let diag = [
            1.0,
            1.0,
            m.sigma_vel * m.sigma_vel,
            m.sigma_vel * m.sigma_vel,
            m.sigma_vel * m.sigma_vel,
            m.sigma_vel * m.sigma_vel,
            m.sigma_yaw * m.sigma_yaw,
            m.sigma_yaw * m.sigma_yaw,
            m.sigma_height * m.sigma_height,
            m.sigma_height * m.sigma_height,
        ];
        for (k, d) in diag.iter().enumerate() {
            cov[(k, k)] = d * config.init_cov_scale;
        }

        Self {
            state: FilterState { x, cov },
            q: config.process_noise.matrix(),
            r: config.measurement_noise.matrix(),
            p_n: config.p_n,
            gamma_l: config.gamma_l,
            epsilon_range: config.epsilon_range,
        }
    }

    pub fn state(&self) -> &FilterState {
        &self.state
    }

    /// Relative pose derived from the current state.
    pub fn estimate(&self) -> RelativePose {
        let z_rel = self.state.height_diff();
        let psi_rel = self.state.x[PSI_NB] - self.state.x[PSI_OWN];
        RelativePose::from_cartesian(self.state.rel_pos(), z_rel, psi_rel)
    }

    /// Propagates the state by `dt`. Only the relative position moves: it
    /// integrates the velocity difference, everything else is held constant.
    ///
    /// One process-noise increment is added per call, so a missed broadcast
    /// slot should be covered by a single predict with the accumulated `dt`.
    pub fn predict(&mut self, dt: f64) {
        debug_assert!(dt > 0.0);
        self.state.x = Self::predict_mean(&self.state.x, dt);
        let f = Self::process_jacobian(dt);
        self.state.cov = f * self.state.cov * f.transpose() + self.q;
        symmetrize(&mut self.state.cov);
    }

    /// Mean propagation of [`predict`](Self::predict), exposed for
    /// verification against numerical differentiation.
    pub fn predict_mean(x: &StateVec, dt: f64) -> StateVec {
        let mut out = *x;
        out[X_REL] += (x[VX_NB] - x[VX_OWN]) * dt;
        out[Y_REL] += (x[VY_NB] - x[VY_OWN]) * dt;
        out
    }

    /// Analytic Jacobian of [`predict_mean`](Self::predict_mean).
    pub fn process_jacobian(dt: f64) -> StateMat {
        let mut f = StateMat::identity();
        f[(X_REL, VX_OWN)] = -dt;
        f[(X_REL, VX_NB)] = dt;
        f[(Y_REL, VY_OWN)] = -dt;
        f[(Y_REL, VY_NB)] = dt;
        f
    }

    /// Predicted observation at state `x`; the flag reports range clamping.
    pub fn observation(&self, x: &StateVec) -> (ObsVec, bool) {
        let (rho, clamped) = self.clamped_range(x);
        let mut h = ObsVec::zeros();
        h[OBS_RSSI] = self.p_n - 10.0 * self.gamma_l * rho.log10();
        h[1] = x[VX_OWN];
        h[2] = x[VY_OWN];
        // The state's neighbor velocity lives in the own frame; the
        // communicated measurement is in the neighbor frame. Rotate back by
        // the predicted relative yaw.
        let psi_rel = x[PSI_NB] - x[PSI_OWN];
        let v_in_nb = rotate2d(PlanarVec::new(x[VX_NB], x[VY_NB]), -psi_rel);
        h[3] = v_in_nb.x;
        h[4] = v_in_nb.y;
        h[OBS_PSI_NB] = x[PSI_NB];
        h[OBS_PSI_OWN] = x[PSI_OWN];
        h[7] = x[Z_NB];
        h[8] = x[Z_OWN];
        (h, clamped)
    }

    /// Analytic Jacobian of [`observation`](Self::observation).
    ///
    /// Inside the range clamp the RSSI row is zero: a clamped range carries
    /// no position information.
    pub fn observation_jacobian(&self, x: &StateVec) -> (ObsMat, bool) {
        let (rho, clamped) = self.clamped_range(x);
        let mut jac = ObsMat::zeros();

        if !clamped {
            // d/dx of p_n - 10*gamma*log10(rho(x))
            let c = 10.0 * self.gamma_l / core::f64::consts::LN_10;
            let rho_sq = rho * rho;
            let z_rel = x[Z_NB] - x[Z_OWN];
            jac[(OBS_RSSI, X_REL)] = -c * x[X_REL] / rho_sq;
            jac[(OBS_RSSI, Y_REL)] = -c * x[Y_REL] / rho_sq;
            jac[(OBS_RSSI, Z_NB)] = -c * z_rel / rho_sq;
            jac[(OBS_RSSI, Z_OWN)] = c * z_rel / rho_sq;
        }

        jac[(1, VX_OWN)] = 1.0;
        jac[(2, VY_OWN)] = 1.0;

        let psi_rel = x[PSI_NB] - x[PSI_OWN];
        let (s, c) = psi_rel.sin_cos();
        let (vx, vy) = (x[VX_NB], x[VY_NB]);
        // h3 =  c*vx + s*vy, h4 = -s*vx + c*vy (rotation by -psi_rel)
        jac[(3, VX_NB)] = c;
        jac[(3, VY_NB)] = s;
        jac[(3, PSI_NB)] = -s * vx + c * vy;
        jac[(3, PSI_OWN)] = s * vx - c * vy;
        jac[(4, VX_NB)] = -s;
        jac[(4, VY_NB)] = c;
        jac[(4, PSI_NB)] = -c * vx - s * vy;
        jac[(4, PSI_OWN)] = c * vx + s * vy;

        jac[(OBS_PSI_NB, PSI_NB)] = 1.0;
        jac[(OBS_PSI_OWN, PSI_OWN)] = 1.0;
        jac[(7, Z_NB)] = 1.0;
        jac[(8, Z_OWN)] = 1.0;
        (jac, clamped)
    }

    /// Fuses one received broadcast together with the own-state measurement.
    ///
    /// Yaw innovations are wrapped to `(-PI, PI]` before the update. The
    /// covariance is maintained in Joseph form and re-symmetrized.
    pub fn update(&mut self, own: &OwnMeasurement, neighbor: &NeighborMeasurement) -> UpdateReport {
        let (h, clamped) = self.observation(&self.state.x);
        let (jac, _) = self.observation_jacobian(&self.state.x);

        let mut z = ObsVec::zeros();
        z[OBS_RSSI] = neighbor.rssi;
        z[1] = own.vel.x;
        z[2] = own.vel.y;
        z[3] = neighbor.vel.x;
        z[4] = neighbor.vel.y;
        z[OBS_PSI_NB] = neighbor.yaw;
        z[OBS_PSI_OWN] = own.yaw;
        z[7] = neighbor.height;
        z[8] = own.height;

        let mut innovation = z - h;
        innovation[OBS_PSI_NB] = wrap_angle(innovation[OBS_PSI_NB]);
        innovation[OBS_PSI_OWN] = wrap_angle(innovation[OBS_PSI_OWN]);

        let s = jac * self.state.cov * jac.transpose() + self.r;
        let Some(s_inv) = s.try_inverse() else {
            return UpdateReport {
                innovation,
                range_clamped: clamped,
                skipped: true,
            };
        };

        let gain = self.state.cov * jac.transpose() * s_inv;
        self.state.x += gain * innovation;
        self.state.x[PSI_NB] = wrap_angle(self.state.x[PSI_NB]);
        self.state.x[PSI_OWN] = wrap_angle(self.state.x[PSI_OWN]);

        let i_kh = StateMat::identity() - gain * jac;
        self.state.cov =
            i_kh * self.state.cov * i_kh.transpose() + gain * self.r * gain.transpose();
        symmetrize(&mut self.state.cov);

        UpdateReport {
            innovation,
            range_clamped: clamped,
            skipped: false,
        }
    }

    fn clamped_range(&self, x: &StateVec) -> (f64, bool) {
        let z_rel = x[Z_NB] - x[Z_OWN];
        let rho = (x[X_REL] * x[X_REL] + x[Y_REL] * x[Y_REL] + z_rel * z_rel).sqrt();
        if rho < self.epsilon_range {
            (self.epsilon_range, true)
        } else {
            (rho, false)
        }
    }
}

fn symmetrize(m: &mut StateMat) {
    *m = (*m + m.transpose()) * 0.5;
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn static_own() -> OwnMeasurement {
        OwnMeasurement {
            vel: PlanarVec::ZERO,
            yaw: 0.0,
            height: 0.0,
        }
    }

    fn filter_at(guess: PlanarVec) -> RelativeEkf {
        RelativeEkf::new(&FilterConfig::default(), guess, &static_own(), None)
    }

    #[test]
    fn init_sets_position_guess() {
        let ekf = filter_at(PlanarVec::new(1.0, 1.0));
        assert_eq!(ekf.state().rel_pos(), PlanarVec::new(1.0, 1.0));
        // Zero guess is degenerate but legal.
        let ekf = filter_at(PlanarVec::ZERO);
        assert_eq!(ekf.state().rel_pos(), PlanarVec::ZERO);
    }

    #[test]
    fn predict_static_and_matched_motion_leave_position() {
        let mut ekf = filter_at(PlanarVec::new(2.0, -1.0));
        ekf.predict(0.2);
        assert_eq!(ekf.state().rel_pos(), PlanarVec::new(2.0, -1.0));

        // Matched motion: equal velocities cancel in the propagation.
        let mut ekf = filter_at(PlanarVec::new(2.0, -1.0));
        ekf.state.x[VX_OWN] = 0.4;
        ekf.state.x[VY_OWN] = -0.3;
        ekf.state.x[VX_NB] = 0.4;
        ekf.state.x[VY_NB] = -0.3;
        ekf.predict(0.2);
        assert_eq!(ekf.state().rel_pos(), PlanarVec::new(2.0, -1.0));
    }

    #[test]
    fn predict_integrates_velocity_difference() {
        let mut ekf = filter_at(PlanarVec::new(1.0, 0.0));
        ekf.state.x[VX_NB] = 1.0;
        ekf.predict(0.2);
        assert_relative_eq!(ekf.state().rel_pos().x, 1.2, epsilon = 1e-15);
        assert_eq!(ekf.state().rel_pos().y, 0.0);
    }

    #[test]
    fn zero_innovation_is_a_fixed_point() {
        let mut ekf = filter_at(PlanarVec::new(1.3, -0.7));
        ekf.state.x[VX_OWN] = 0.1;
        ekf.state.x[VX_NB] = -0.2;
        ekf.state.x[PSI_NB] = 0.3;
        ekf.state.x[Z_NB] = 0.4;

        let (h, _) = ekf.observation(&ekf.state.x);
        let own = OwnMeasurement {
            vel: PlanarVec::new(h[1], h[2]),
            yaw: h[6],
            height: h[8],
        };
        let nb = NeighborMeasurement {
            rssi: h[0],
            vel: PlanarVec::new(h[3], h[4]),
            yaw: h[5],
            height: h[7],
        };

        let before = ekf.state().clone();
        let report = ekf.update(&own, &nb);
        assert!(!report.skipped);
        assert!(report.innovation.norm() < 1e-12);
        for k in 0..STATE_DIM {
            assert_relative_eq!(ekf.state().x[k], before.x[k], epsilon = 1e-12);
            // Measurements never increase the diagonal.
            assert!(ekf.state().cov[(k, k)] <= before.cov[(k, k)] + 1e-12);
        }
    }

    #[test]
    fn matched_motion_keeps_range_observation_constant() {
        // Both vehicles translating identically: the range never changes, so
        // the RSSI observation sequence carries no bearing information.
        let mut ekf = filter_at(PlanarVec::new(2.0, 1.0));
        ekf.state.x[VX_OWN] = 0.5;
        ekf.state.x[VX_NB] = 0.5;
        let (h0, _) = ekf.observation(&ekf.state.x);
        for _ in 0..50 {
            ekf.state.x = RelativeEkf::predict_mean(&ekf.state.x, 0.2);
            let (h, _) = ekf.observation(&ekf.state.x);
            assert_relative_eq!(h[OBS_RSSI], h0[OBS_RSSI], epsilon = 1e-12);
        }
    }

    #[test]
    fn yaw_innovation_wraps() {
        let mut ekf = filter_at(PlanarVec::new(1.0, 0.0));
        ekf.state.x[PSI_NB] = PI - 0.05;
        let own = static_own();
        let (h, _) = ekf.observation(&ekf.state.x);
        let nb = NeighborMeasurement {
            rssi: h[0],
            vel: PlanarVec::ZERO,
            yaw: -PI + 0.05, // 0.1 rad away across the wrap
            height: 0.0,
        };
        let report = ekf.update(&own, &nb);
        assert_relative_eq!(report.innovation[OBS_PSI_NB], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn near_zero_range_is_clamped_not_fatal() {
        let mut ekf = filter_at(PlanarVec::new(1e-4, 0.0));
        let own = static_own();
        let nb = NeighborMeasurement {
            rssi: -63.0,
            vel: PlanarVec::ZERO,
            yaw: 0.0,
            height: 0.0,
        };
        let report = ekf.update(&own, &nb);
        assert!(report.range_clamped);
        assert!(!report.skipped);
        assert!(ekf.state().x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn estimate_pose_examples() {
        let mut ekf = filter_at(PlanarVec::new(1.0, 0.0));
        let pose = ekf.estimate();
        assert_eq!(pose.rho, 1.0);
        assert_eq!(pose.beta, 0.0);

        ekf.state.x[X_REL] = 0.0;
        ekf.state.x[Y_REL] = 2.0;
        let pose = ekf.estimate();
        assert_relative_eq!(pose.beta, PI / 2.0, epsilon = 1e-15);

        ekf.state.x[X_REL] = 1.0;
        ekf.state.x[Y_REL] = 1.0;
        ekf.state.x[Z_NB] = 1.0;
        let pose = ekf.estimate();
        assert_relative_eq!(pose.rho, 3.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn covariance_stays_symmetric_over_random_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut ekf = filter_at(PlanarVec::new(1.5, 0.5));
        for _ in 0..10_000 {
            ekf.predict(0.2);
            let own = OwnMeasurement {
                vel: PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                yaw: rng.gen_range(-1.0..1.0),
                height: rng.gen_range(-0.5..0.5),
            };
            let nb = NeighborMeasurement {
                rssi: rng.gen_range(-90.0..-50.0),
                vel: PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                yaw: rng.gen_range(-1.0..1.0),
                height: rng.gen_range(-0.5..0.5),
            };
            let report = ekf.update(&own, &nb);
            assert!(!report.skipped);
            assert!(ekf.state().max_asymmetry() < 1e-9);
            assert!(ekf.state().min_diag() >= 0.0);
            assert!(ekf.state().x.iter().all(|v| v.is_finite()));
        }
    }
}
