//! Filter validation on a synthetic circular flight around a static
//! observer.
//!
//! A single vehicle circles a fixed receiver that estimates the vehicle's
//! relative position from RSSI plus the communicated (noise-corrupted)
//! velocity, heading, and height. The report compares the filter's range
//! error with the error of simply inverting the log-distance model on each
//! raw RSSI sample.

use airprox_core::channel::{sample_rssi, ChannelParams};
use airprox_core::estimator::{
    FilterConfig, NeighborMeasurement, OwnMeasurement, RelativeEkf,
};
use airprox_core::geometry::{wrap_angle, PlanarVec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Circle scenario parameters.
#[derive(Clone, Debug)]
pub struct CircleConfig {
    /// Circle radius, m.
    pub radius: f64,
    /// Tangential speed, m/s.
    pub speed: f64,
    /// Flight duration, s.
    pub duration: f64,
    /// Filter rate period, s.
    pub dt: f64,
    /// Number of independent noise realizations.
    pub realizations: usize,
    /// SD of the noise on communicated velocity/heading/height.
    pub state_noise_sd: f64,
    /// SD of the RSSI shadowing, dB.
    pub rssi_sigma: f64,
    pub p_n: f64,
    pub gamma_l: f64,
    /// Initial relative-position guess handed to the filter.
    pub init_guess: PlanarVec,
    /// Start of the steady-state window used for the bearing metric, s.
    pub tail_start: f64,
}

impl Default for CircleConfig {
    fn default() -> Self {
        Self {
            radius: 2.0,
            speed: 0.5,
            duration: 60.0,
            dt: 0.2,
            realizations: 50,
            state_noise_sd: 0.2,
            rssi_sigma: 5.0,
            p_n: -63.0,
            gamma_l: 2.0,
            init_guess: PlanarVec::new(1.0, 1.0),
            tail_start: 20.0,
        }
    }
}

impl CircleConfig {
    /// Noise-free variant used as the observability oracle.
    pub fn noiseless(mut self) -> Self {
        self.state_noise_sd = 0.0;
        self.rssi_sigma = 0.0;
        self.realizations = 1;
        self
    }
}

/// Mean absolute error traces over time, averaged across realizations.
#[derive(Clone, Debug, Serialize)]
pub struct CircleTrace {
    pub t: Vec<f64>,
    /// Filter range error, m.
    pub ekf_range_err: Vec<f64>,
    /// Range error of inverting the LD model on the raw RSSI, m.
    pub ld_range_err: Vec<f64>,
    /// Filter bearing error, rad.
    pub bearing_err: Vec<f64>,
    /// Filter position error (Euclidean, planar), m.
    pub pos_err: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleReport {
    pub realizations: usize,
    /// Time-averaged absolute range errors over the whole run.
    pub time_avg_ekf_range_err: f64,
    pub time_avg_ld_range_err: f64,
    /// Median absolute bearing error over the steady-state tail.
    pub median_bearing_err_tail: f64,
    /// Mean absolute position error at the final step, m.
    pub final_pos_err: f64,
    pub trace: CircleTrace,
}

/// Runs the circular-flight scenario.
pub fn scenario_circle(cfg: &CircleConfig, seed: u64) -> CircleReport {
    let steps = (cfg.duration / cfg.dt).round() as usize;
    let omega = cfg.speed / cfg.radius;
    let mut channel = ChannelParams::new(cfg.p_n, cfg.gamma_l, cfg.rssi_sigma)
        .expect("circle channel params are valid");
    channel.lobe = None;
    let filter_cfg = FilterConfig::default().with_channel(&channel);

    let mut ekf_range_sum = vec![0.0; steps];
    let mut ld_range_sum = vec![0.0; steps];
    let mut bearing_sum = vec![0.0; steps];
    let mut pos_sum = vec![0.0; steps];
    let mut tail_bearing_errors = Vec::new();
    let mut final_err_sum = 0.0;

    for realization in 0..cfg.realizations {
        let mut state_rng = ChaCha8Rng::seed_from_u64(seed);
        state_rng.set_stream(realization as u64);
        let mut rssi_rng = ChaCha8Rng::seed_from_u64(seed);
        rssi_rng.set_stream(1_000_000 + realization as u64);

        // The observer is static at the origin with exact knowledge of its
        // own (zero) state.
        let own = OwnMeasurement {
            vel: PlanarVec::ZERO,
            yaw: 0.0,
            height: 0.0,
        };
        let mut ekf = RelativeEkf::new(&filter_cfg, cfg.init_guess, &own, None);

        let gauss = |rng: &mut ChaCha8Rng, sigma: f64| -> f64 {
            let n: f64 = rng.sample(StandardNormal);
            sigma * n
        };

        for k in 0..steps {
            let t = (k + 1) as f64 * cfg.dt;
            let theta = omega * t;
            let true_pos = PlanarVec::new(cfg.radius * theta.cos(), cfg.radius * theta.sin());
            let true_vel = PlanarVec::new(
                -cfg.radius * omega * theta.sin(),
                cfg.radius * omega * theta.cos(),
            );
            let true_rho = true_pos.norm();
            let true_beta = true_pos.bearing();

            let rssi = sample_rssi(true_rho, true_beta, &channel, &mut rssi_rng)
                .expect("positive range on the circle");
            let neighbor = NeighborMeasurement {
                rssi,
                vel: PlanarVec::new(
                    true_vel.x + gauss(&mut state_rng, cfg.state_noise_sd),
                    true_vel.y + gauss(&mut state_rng, cfg.state_noise_sd),
                ),
                yaw: gauss(&mut state_rng, cfg.state_noise_sd),
                height: gauss(&mut state_rng, cfg.state_noise_sd),
            };

            ekf.predict(cfg.dt);
            ekf.update(&own, &neighbor);

            let est = ekf.estimate();
            let ekf_err = (est.rho - true_rho).abs();
            let ld_err = (airprox_core::channel::invert_ld(rssi, &channel) - true_rho).abs();
            let bearing_err = wrap_angle(est.beta - true_beta).abs();

            ekf_range_sum[k] += ekf_err;
            ld_range_sum[k] += ld_err;
            bearing_sum[k] += bearing_err;
            pos_sum[k] += (ekf.state().rel_pos() - true_pos).norm();
            if t >= cfg.tail_start {
                tail_bearing_errors.push(bearing_err);
            }
            if k == steps - 1 {
                final_err_sum += (ekf.state().rel_pos() - true_pos).norm();
            }
        }
    }

    let n = cfg.realizations as f64;
    let trace = CircleTrace {
        t: (0..steps).map(|k| (k + 1) as f64 * cfg.dt).collect(),
        ekf_range_err: ekf_range_sum.iter().map(|v| v / n).collect(),
        ld_range_err: ld_range_sum.iter().map(|v| v / n).collect(),
        bearing_err: bearing_sum.iter().map(|v| v / n).collect(),
        pos_err: pos_sum.iter().map(|v| v / n).collect(),
    };
    CircleReport {
        realizations: cfg.realizations,
        time_avg_ekf_range_err: crate::stats::mean(&trace.ekf_range_err),
        time_avg_ld_range_err: crate::stats::mean(&trace.ld_range_err),
        median_bearing_err_tail: crate::stats::median(&tail_bearing_errors),
        final_pos_err: final_err_sum / n,
        trace,
    }
}
