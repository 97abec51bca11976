//! Uplink CSI estimation noise model.
//!
//! The network never sees the true uplink channel; it sees a pilot-based
//! estimate. We model that with element-wise LMMSE at a configured SNR: the
//! observation is y = h + n with circular complex Gaussian noise of per-element
//! variance σ² = channel_power / γ (γ the linear SNR), and the estimate is the
//! shrinkage ĥ = (γ/(1+γ))·y. A perfect-estimation bypass exists for ablation.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelVector;
use crate::error::{Error, Result};

/// Settings for [`estimate_uplink`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    /// Pilot SNR in dB.
    pub snr_db: f64,
    /// Average per-element squared channel magnitude, the prior variance of
    /// the LMMSE shrinkage. Computed from data by the dataset builder.
    pub channel_power: f64,
    /// If set, bypass the model entirely: the estimate equals the channel.
    pub perfect: bool,
}

impl EstimationConfig {
    fn validate(&self) -> Result<()> {
        if self.perfect {
            return Ok(());
        }
        if !(self.channel_power > 0.0) || !self.channel_power.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "channel power must be positive and finite, got {}",
                self.channel_power
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "SNR must be finite, got {} dB (use the perfect flag for noiseless estimation)",
                self.snr_db
            )));
        }
        Ok(())
    }

    /// Linear SNR γ = 10^(snr_db/10).
    pub fn gamma(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// LMMSE shrinkage factor γ/(1+γ).
    pub fn shrinkage(&self) -> f64 {
        let g = self.gamma();
        g / (1.0 + g)
    }
}

/// Produces the noisy LMMSE estimate of an uplink channel.
///
/// Noise draws come from `rng` in element order, real part before imaginary,
/// and are standard normals scaled by sqrt(σ²/2) — so the draws themselves do
/// not depend on the noise level, which keeps streams aligned across
/// configurations.
pub fn estimate_uplink<R: Rng>(
    h: &ChannelVector,
    cfg: &EstimationConfig,
    rng: &mut R,
) -> Result<ChannelVector> {
    cfg.validate()?;
    if cfg.perfect {
        return Ok(h.clone());
    }
    let sigma2 = cfg.channel_power / cfg.gamma();
    let component_std = (sigma2 / 2.0).sqrt();
    let shrink = cfg.shrinkage();
    let coefficients = h
        .coefficients
        .iter()
        .map(|c| {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            let y = c + Complex64::new(nr * component_std, ni * component_std);
            y * shrink
        })
        .collect();
    Ok(ChannelVector { carrier_frequency: h.carrier_frequency, coefficients })
}
