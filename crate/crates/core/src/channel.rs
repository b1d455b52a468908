//! Received-signal-strength model: log-distance path loss, bearing-dependent
//! antenna lobes, and Gaussian shadowing.
//!
//! The deterministic log-distance (LD) part doubles as the range observation
//! model inside the fusion filter; the full sampler generates synthetic
//! measurements from true geometry.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelError {
    /// Range must be strictly positive to evaluate the LD model.
    NonPositiveRange,
    /// Parameter validation failure; the message names the offending field.
    InvalidParams(&'static str),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NonPositiveRange => write!(f, "range must be > 0"),
            ChannelError::InvalidParams(what) => write!(f, "invalid channel parameters: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChannelError {}

/// Bearing-dependent gain deviation modeled as a Fourier series (in dB).
///
/// `gain(beta) = sum_n a_n cos(n w beta) + b_n sin(n w beta)` with
/// `w = 2*PI / fundamental_period`. The constant term is absorbed into the
/// nominal power of [`ChannelParams`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LobeModel {
    cosine_coeffs: Vec<f64>,
    sine_coeffs: Vec<f64>,
    fundamental_period: f64,
}

impl LobeModel {
    pub fn new(
        cosine_coeffs: Vec<f64>,
        sine_coeffs: Vec<f64>,
        fundamental_period: f64,
    ) -> Result<Self, ChannelError> {
        if cosine_coeffs.is_empty() || cosine_coeffs.len() != sine_coeffs.len() {
            return Err(ChannelError::InvalidParams(
                "lobe coefficient lists must be non-empty and of equal length",
            ));
        }
        if !(fundamental_period > 0.0) {
            return Err(ChannelError::InvalidParams("lobe period must be > 0"));
        }
        Ok(Self {
            cosine_coeffs,
            sine_coeffs,
            fundamental_period,
        })
    }

    /// Third-order series with every coefficient at 1 dB and period 2*PI.
    pub fn unit_third_order() -> Self {
        Self {
            cosine_coeffs: alloc::vec![1.0; 3],
            sine_coeffs: alloc::vec![1.0; 3],
            fundamental_period: 2.0 * PI,
        }
    }

    pub fn order(&self) -> usize {
        self.cosine_coeffs.len()
    }

    pub fn cosine_coeffs(&self) -> &[f64] {
        &self.cosine_coeffs
    }

    pub fn sine_coeffs(&self) -> &[f64] {
        &self.sine_coeffs
    }

    pub fn fundamental_period(&self) -> f64 {
        self.fundamental_period
    }
}

/// Everything needed to synthesize or invert an RSSI measurement.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelParams {
    /// RSSI at the nominal 1 m distance, in dB.
    pub p_n: f64,
    /// Space-loss exponent (2 in free space, up to ~6 indoors).
    pub gamma_l: f64,
    /// Standard deviation of the Gaussian shadowing term, in dB.
    pub sigma_shadow: f64,
    /// Optional bearing-dependent lobe deviation.
    pub lobe: Option<LobeModel>,
    /// Round emitted samples to whole dB, as integer-reporting radios do.
    pub quantize: bool,
}

impl ChannelParams {
    pub fn new(p_n: f64, gamma_l: f64, sigma_shadow: f64) -> Result<Self, ChannelError> {
        let params = Self {
            p_n,
            gamma_l,
            sigma_shadow,
            lobe: None,
            quantize: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_lobe(mut self, lobe: LobeModel) -> Self {
        self.lobe = Some(lobe);
        self
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !self.p_n.is_finite() {
            return Err(ChannelError::InvalidParams("p_n must be finite"));
        }
        if !(self.gamma_l > 0.0) {
            return Err(ChannelError::InvalidParams("gamma_l must be > 0"));
        }
        if !(self.sigma_shadow >= 0.0) {
            return Err(ChannelError::InvalidParams("sigma_shadow must be >= 0"));
        }
        Ok(())
    }
}

/// Deterministic log-distance model: `p_n - 10 * gamma_l * log10(rho)`.
pub fn ld_model(rho: f64, params: &ChannelParams) -> Result<f64, ChannelError> {
    if !(rho > 0.0) {
        return Err(ChannelError::NonPositiveRange);
    }
    Ok(ld_model_unchecked(rho, params))
}

/// LD model without the domain check; callers must guarantee `rho > 0`.
pub(crate) fn ld_model_unchecked(rho: f64, params: &ChannelParams) -> f64 {
    params.p_n - 10.0 * params.gamma_l * rho.log10()
}

/// Closed-form inverse of [`ld_model`]; any finite signal maps to a range.
pub fn invert_ld(rssi: f64, params: &ChannelParams) -> f64 {
    let exponent = (params.p_n - rssi) / (10.0 * params.gamma_l);
    10.0f64.powf(exponent)
}

/// Fourier-series lobe gain at a given relative bearing, in dB.
pub fn lobe_gain(beta: f64, lobe: &LobeModel) -> f64 {
    let w = 2.0 * PI / lobe.fundamental_period;
    let mut gain = 0.0;
    for (n, (a, b)) in lobe
        .cosine_coeffs
        .iter()
        .zip(lobe.sine_coeffs.iter())
        .enumerate()
    {
        let arg = (n + 1) as f64 * w * beta;
        gain += a * arg.cos() + b * arg.sin();
    }
    gain
}

/// Draws one RSSI sample for the given true geometry.
///
/// Composed of the LD mean, the lobe gain at the receiver-frame bearing to
/// the transmitter (when a lobe model is present), and one Gaussian shadowing
/// variate. Exactly one variate is consumed from `rng` even when
/// `sigma_shadow` is zero, so stream alignment does not depend on noise
/// settings.
pub fn sample_rssi<R: Rng + ?Sized>(
    true_rho: f64,
    true_beta: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    if !(true_rho > 0.0) {
        return Err(ChannelError::NonPositiveRange);
    }
    let mut rssi = ld_model_unchecked(true_rho, params);
    if let Some(lobe) = &params.lobe {
        rssi += lobe_gain(true_beta, lobe);
    }
    let noise: f64 = rng.sample(StandardNormal);
    rssi += params.sigma_shadow * noise;
    if params.quantize {
        rssi = rssi.round();
    }
    Ok(rssi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn free_space(p_n: f64) -> ChannelParams {
        ChannelParams::new(p_n, 2.0, 0.0).unwrap()
    }

    #[test]
    fn ld_model_reference_points() {
        let params = free_space(-63.0);
        assert_eq!(ld_model(1.0, &params).unwrap(), -63.0);
        assert_relative_eq!(ld_model(10.0, &params).unwrap(), -83.0, epsilon = 1e-12);

        let ardrone = free_space(-68.0);
        assert_relative_eq!(
            ld_model(2.5, &ardrone).unwrap(),
            -75.95880017344075,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ld_model_rejects_non_positive_range() {
        let params = free_space(-63.0);
        assert_eq!(ld_model(0.0, &params), Err(ChannelError::NonPositiveRange));
        assert_eq!(ld_model(-1.0, &params), Err(ChannelError::NonPositiveRange));
    }

    #[test]
    fn invert_ld_reference_points() {
        let params = free_space(-63.0);
        assert_relative_eq!(invert_ld(-63.0, &params), 1.0, epsilon = 1e-12);
        assert_relative_eq!(invert_ld(-83.0, &params), 10.0, epsilon = 1e-12);
        assert_relative_eq!(invert_ld(-70.0, &params), 2.2387211385683394, epsilon = 1e-12);
    }

    #[test]
    fn lobe_gain_null_model_is_zero() {
        let lobe = LobeModel::new(alloc::vec![0.0; 3], alloc::vec![0.0; 3], 2.0 * PI).unwrap();
        assert_eq!(lobe_gain(1.234, &lobe), 0.0);
    }

    #[test]
    fn lobe_gain_unit_third_order_at_zero() {
        // All sine terms vanish at beta = 0; the three cosines each give 1 dB.
        let lobe = LobeModel::unit_third_order();
        assert_relative_eq!(lobe_gain(0.0, &lobe), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sampler_noiseless_equals_ld_model() {
        let params = free_space(-63.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample_rssi(1.0, 0.3, &params, &mut rng).unwrap();
        assert_eq!(s, -63.0);
    }

    #[test]
    fn sampler_with_lobes_at_zero_bearing() {
        let params = free_space(-63.0).with_lobe(LobeModel::unit_third_order());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample_rssi(1.0, 0.0, &params, &mut rng).unwrap();
        assert_relative_eq!(s, -60.0, epsilon = 1e-12);
    }

    #[test]
    fn sampler_empirical_moments() {
        let mut params = free_space(-63.0);
        params.sigma_shadow = 5.0;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mean_model = ld_model(2.0, &params).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let s = sample_rssi(2.0, 0.9, &params, &mut rng).unwrap();
            let d = s - mean_model;
            sum += d;
            sum_sq += d * d;
        }
        let mean = sum / n as f64;
        let sd = (sum_sq / n as f64 - mean * mean).sqrt();
        // Mean within 3 standard errors of zero, SD within 0.1 dB of sigma.
        let se = params.sigma_shadow / (n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "sample mean {mean} exceeds 3 SE {se}");
        assert!((sd - 5.0).abs() < 0.1, "sample SD {sd} not within 0.1 of 5");
    }

    #[test]
    fn quantization_rounds_to_whole_db() {
        let mut params = free_space(-63.0);
        params.quantize = true;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample_rssi(2.5, 0.0, &params, &mut rng).unwrap();
        assert_eq!(s, s.round());
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(-63.0, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(-63.0, 2.0, -1.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 2.0, 1.0).is_err());
        assert!(LobeModel::new(alloc::vec![1.0], alloc::vec![1.0, 2.0], 2.0 * PI).is_err());
        assert!(LobeModel::new(alloc::vec![], alloc::vec![], 2.0 * PI).is_err());
    }

    proptest! {
        #[test]
        fn invert_round_trips(rho in 0.1f64..50.0, p_n in -90.0f64..-40.0, gamma in 0.5f64..6.0) {
            let params = ChannelParams::new(p_n, gamma, 0.0).unwrap();
            let rssi = ld_model(rho, &params).unwrap();
            let back = invert_ld(rssi, &params);
            prop_assert!(((back - rho) / rho).abs() < 1e-9);
        }

        #[test]
        fn ld_model_strictly_decreasing(rho in 0.1f64..50.0, step in 1e-3f64..10.0) {
            let params = free_space(-63.0);
            let near = ld_model(rho, &params).unwrap();
            let far = ld_model(rho + step, &params).unwrap();
            prop_assert!(far < near);
        }

        #[test]
        fn lobe_gain_periodic(beta in -10.0f64..10.0) {
            let lobe = LobeModel::unit_third_order();
            let a = lobe_gain(beta, &lobe);
            let b = lobe_gain(beta + 2.0 * PI, &lobe);
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
