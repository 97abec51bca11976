//! Geometric multipath channel model for a uniform linear array.
//!
//! A channel realization is a sum of P plane-wave rays. Ray p carries an
//! attenuation α_p, a phase shift φ_p, a delay τ_p, and a direction of arrival
//! θ_p; at carrier frequency f the array observes
//!
//! ```text
//! h(f) = Σ_p α_p · exp(−j2πf·τ_p + jφ_p) · a(f, θ_p)
//! ```
//!
//! where `a` is the steering vector of the array: entry m (0-indexed) is
//! `exp(−j·χ·m·sin θ_p)` with `χ = 2πdf/c`. Uplink and downlink channels of
//! one environment share the identical ray set and differ only through `f`,
//! which is what makes the downlink predictable from the uplink.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};

/// Speed of light in meters per second.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

// ---- types ----

/// Uniform linear array geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    /// Number of antennas M.
    pub num_antennas: usize,
    /// Antenna spacing d in meters.
    pub antenna_spacing: f64,
}

impl ArrayConfig {
    /// Creates an array configuration, validating M ≥ 1 and d > 0.
    pub fn new(num_antennas: usize, antenna_spacing: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::InvalidConfiguration("array needs at least one antenna".into()));
        }
        if !(antenna_spacing > 0.0) || !antenna_spacing.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "antenna spacing must be positive and finite, got {antenna_spacing}"
            )));
        }
        Ok(Self { num_antennas, antenna_spacing })
    }

    /// Half-wavelength spacing at the given carrier: d = c / (2f).
    ///
    /// This is the conventional ULA default and makes χ = π at that carrier.
    pub fn half_wavelength(num_antennas: usize, f: f64) -> Result<Self> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "carrier frequency must be positive and finite, got {f}"
            )));
        }
        Self::new(num_antennas, SPEED_OF_LIGHT / (2.0 * f))
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    /// Attenuation α ≥ 0.
    pub attenuation: f64,
    /// Phase shift φ in [−π, π).
    pub phase: f64,
    /// Delay τ in seconds, ≥ 0.
    pub delay: f64,
    /// Direction of arrival θ_p in radians from array broadside.
    pub doa: f64,
}

/// A propagation environment: P rays clustered around a mean DOA.
///
/// The user distance is carried for fidelity to the mapping domain but does
/// not influence the synthetic ray statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rays: Vec<Ray>,
    /// Mean DOA θ in radians.
    pub mean_doa: f64,
    /// Angular spread Δθ in radians; every ray DOA lies in θ ± Δθ/2.
    pub angular_spread: f64,
    /// User distance in meters (stored, unused by the sampler).
    pub distance: f64,
}

/// A channel realization at one carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    /// Carrier frequency f in hertz.
    pub carrier_frequency: f64,
    /// Length-M complex coefficients.
    pub coefficients: Vec<Complex64>,
}

/// Distribution settings for [`sample_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    /// Number of paths P ≥ 1.
    pub path_count: usize,
    /// Angular spread Δθ in radians, ≥ 0.
    pub angular_spread: f64,
    /// Sector for the mean DOA, radians (inclusive-exclusive interval).
    pub mean_doa_range: (f64, f64),
    /// Upper end of the per-path delay range [0, delay_max] in seconds.
    pub delay_max: f64,
    /// User distance range in meters.
    pub distance_range: (f64, f64),
    /// Rayleigh scale σ for attenuations; `None` derives σ = sqrt(1/(2P)) so
    /// that E[α²] = 1/P and E[‖h‖²] stays independent of P.
    pub rayleigh_scale: Option<f64>,
}

impl ScenarioParams {
    /// The Rayleigh scale actually used for sampling.
    pub fn effective_rayleigh_scale(&self) -> f64 {
        self.rayleigh_scale
            .unwrap_or_else(|| (1.0 / (2.0 * self.path_count as f64)).sqrt())
    }

    fn validate(&self) -> Result<()> {
        if self.path_count == 0 {
            return Err(Error::InvalidParameters("path count P must be at least 1".into()));
        }
        if !(self.angular_spread >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "angular spread must be nonnegative, got {}",
                self.angular_spread
            )));
        }
        if !(self.delay_max >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "delay range must be nonnegative, got {}",
                self.delay_max
            )));
        }
        if self.mean_doa_range.1 < self.mean_doa_range.0 {
            return Err(Error::InvalidParameters("mean-DOA sector is reversed".into()));
        }
        if self.distance_range.1 < self.distance_range.0 {
            return Err(Error::InvalidParameters("distance range is reversed".into()));
        }
        if let Some(s) = self.rayleigh_scale {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameters(format!(
                    "rayleigh scale must be positive and finite, got {s}"
                )));
            }
        }
        Ok(())
    }
}

// ---- operations ----

/// Steering vector of the array at frequency `f` for a plane wave from `theta`.
///
/// Entry m equals `exp(−j·χ·m·sin θ)` with `χ = 2πdf/c`; entry 0 is exactly 1
/// and every entry has unit modulus.
pub fn steering_vector(cfg: &ArrayConfig, f: f64, theta: f64) -> Result<Vec<Complex64>> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::InvalidConfiguration(format!(
            "carrier frequency must be positive and finite, got {f}"
        )));
    }
    let chi = TWO_PI * cfg.antenna_spacing * f / SPEED_OF_LIGHT;
    let step = chi * theta.sin();
    Ok((0..cfg.num_antennas).map(|m| Complex64::cis(-(m as f64) * step)).collect())
}

/// Synthesizes the channel for one scenario at one carrier frequency.
pub fn synthesize_channel(cfg: &ArrayConfig, scenario: &Scenario, f: f64) -> Result<ChannelVector> {
    if scenario.rays.is_empty() {
        return Err(Error::InvalidScenario("scenario has no rays".into()));
    }
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::InvalidConfiguration(format!(
            "carrier frequency must be positive and finite, got {f}"
        )));
    }
    let chi = TWO_PI * cfg.antenna_spacing * f / SPEED_OF_LIGHT;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); cfg.num_antennas];
    for ray in &scenario.rays {
        // Per-ray complex gain α·exp(j(φ − 2πf·τ)); the huge absolute phase
        // 2πf·τ is reduced modulo 2π inside sin/cos in double precision.
        let gain = ray.attenuation * Complex64::cis(ray.phase - TWO_PI * f * ray.delay);
        let step = chi * ray.doa.sin();
        for (m, c) in coefficients.iter_mut().enumerate() {
            *c += gain * Complex64::cis(-(m as f64) * step);
        }
    }
    Ok(ChannelVector { carrier_frequency: f, coefficients })
}

/// Samples one scenario from the configured distributions.
///
/// Attenuations are Rayleigh, phases uniform on [−π, π), delays uniform on
/// [0, delay_max], DOAs uniform on θ ± Δθ/2 around a mean DOA drawn uniformly
/// from the sector. Each path draws from its own sub-stream (derived from a
/// value drawn off `rng`), so the first paths of two scenarios sampled with
/// identical streams but different P coincide.
pub fn sample_scenario<R: Rng>(rng: &mut R, params: &ScenarioParams) -> Result<Scenario> {
    params.validate()?;
    let (lo, hi) = params.mean_doa_range;
    let mean_doa = lo + rng.random::<f64>() * (hi - lo);
    let (d_lo, d_hi) = params.distance_range;
    let distance = d_lo + rng.random::<f64>() * (d_hi - d_lo);
    let path_master: u64 = rng.random();

    let sigma = params.effective_rayleigh_scale();
    let rays = (0..params.path_count)
        .map(|p| {
            let mut ps = stream(derive_seed(path_master, "path", p as u64));
            let doa = mean_doa + (ps.random::<f64>() - 0.5) * params.angular_spread;
            // Rayleigh via inverse CDF: α = σ·sqrt(−2·ln(1−u)), u ∈ [0, 1).
            let alpha = sigma * (-2.0 * (1.0 - ps.random::<f64>()).ln()).sqrt();
            let phase = -std::f64::consts::PI + ps.random::<f64>() * TWO_PI;
            let delay = ps.random::<f64>() * params.delay_max;
            Ray { attenuation: alpha, phase, delay, doa }
        })
        .collect();

    Ok(Scenario {
        rays,
        mean_doa,
        angular_spread: params.angular_spread,
        distance,
    })
}

/// Synthesizes the uplink/downlink pair of one environment.
///
/// Both channels come from the identical ray list; only the carrier differs.
pub fn channel_pair(
    cfg: &ArrayConfig,
    scenario: &Scenario,
    f_up: f64,
    f_down: f64,
) -> Result<(ChannelVector, ChannelVector)> {
    let up = synthesize_channel(cfg, scenario, f_up)?;
    let down = synthesize_channel(cfg, scenario, f_down)?;
    Ok((up, down))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_array(m: usize) -> ArrayConfig {
        ArrayConfig::half_wavelength(m, 2.5e9).unwrap()
    }

    fn test_params(p: usize) -> ScenarioParams {
        ScenarioParams {
            path_count: p,
            angular_spread: 10f64.to_radians(),
            mean_doa_range: (-std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_3),
            delay_max: 1e-4,
            distance_range: (10.0, 500.0),
            rayleigh_scale: None,
        }
    }

    #[test]
    fn test_half_wavelength_spacing() {
        let cfg = test_array(4);
        assert!((cfg.antenna_spacing - SPEED_OF_LIGHT / 5e9).abs() < 1e-18);
        // chi = 2 pi d f / c = pi exactly at the design carrier
        let chi = TWO_PI * cfg.antenna_spacing * 2.5e9 / SPEED_OF_LIGHT;
        assert!((chi - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn test_array_config_rejects_bad_inputs() {
        assert!(ArrayConfig::new(0, 0.06).is_err());
        assert!(ArrayConfig::new(4, 0.0).is_err());
        assert!(ArrayConfig::new(4, -1.0).is_err());
        assert!(ArrayConfig::half_wavelength(4, 0.0).is_err());
    }

    #[test]
    fn test_steering_broadside_is_all_ones() {
        let v = steering_vector(&test_array(8), 2.5e9, 0.0).unwrap();
        for c in v {
            assert_eq!(c, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn test_steering_endfire_two_antennas() {
        // M=2, chi=pi (half wavelength), theta=pi/2: [1, exp(-j*pi)] = [1, -1].
        let v = steering_vector(&test_array(2), 2.5e9, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((v[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn test_steering_entries_unit_modulus() {
        let mut rng = crate::rng::stream(7);
        for _ in 0..50 {
            let theta = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
            let f = 1e9 + rng.random::<f64>() * 5e9;
            let v = steering_vector(&test_array(16), f, theta).unwrap();
            assert_eq!(v[0], Complex64::new(1.0, 0.0), "entry 0 must be exactly 1");
            for c in &v {
                assert!((c.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn test_steering_rejects_nonpositive_frequency() {
        assert!(steering_vector(&test_array(4), 0.0, 0.1).is_err());
        assert!(steering_vector(&test_array(4), -2.5e9, 0.1).is_err());
    }

    #[test]
    fn test_steering_conjugate_symmetry() {
        // conj(a(theta)) = a(-theta), from the odd symmetry of sin.
        let mut rng = crate::rng::stream(8);
        for _ in 0..20 {
            let theta = (rng.random::<f64>() - 0.5) * 2.0;
            let a = steering_vector(&test_array(8), 3.1e9, theta).unwrap();
            let b = steering_vector(&test_array(8), 3.1e9, -theta).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x.conj() - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn test_single_unit_ray_equals_steering_vector() {
        let cfg = test_array(8);
        let scenario = Scenario {
            rays: vec![Ray { attenuation: 1.0, phase: 0.0, delay: 0.0, doa: 0.31 }],
            mean_doa: 0.31,
            angular_spread: 0.0,
            distance: 100.0,
        };
        let h = synthesize_channel(&cfg, &scenario, 2.5e9).unwrap();
        let a = steering_vector(&cfg, 2.5e9, 0.31).unwrap();
        for (x, y) in h.coefficients.iter().zip(&a) {
            assert_eq!(x, y, "unit ray with zero phase and delay must reproduce the steering vector");
        }
    }

    #[test]
    fn test_two_half_rays_equal_one_full_ray() {
        let cfg = test_array(6);
        let ray = |alpha| Ray { attenuation: alpha, phase: 0.7, delay: 3e-5, doa: -0.4 };
        let one = Scenario {
            rays: vec![ray(1.0)],
            mean_doa: -0.4,
            angular_spread: 0.0,
            distance: 50.0,
        };
        let two = Scenario { rays: vec![ray(0.5), ray(0.5)], ..one.clone() };
        let h1 = synthesize_channel(&cfg, &one, 2.62e9).unwrap();
        let h2 = synthesize_channel(&cfg, &two, 2.62e9).unwrap();
        for (x, y) in h1.coefficients.iter().zip(&h2.coefficients) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn test_synthesis_matches_scalar_reference() {
        // Brute-force per-antenna scalar evaluation, no shared subexpressions.
        let cfg = test_array(5);
        let mut rng = crate::rng::stream(11);
        let scenario = sample_scenario(&mut rng, &test_params(5)).unwrap();
        let f = 2.62e9;
        let h = synthesize_channel(&cfg, &scenario, f).unwrap();
        let chi = TWO_PI * cfg.antenna_spacing * f / SPEED_OF_LIGHT;
        for m in 0..cfg.num_antennas {
            let mut want = Complex64::new(0.0, 0.0);
            for ray in &scenario.rays {
                let gain = ray.attenuation * Complex64::cis(ray.phase - TWO_PI * f * ray.delay);
                want += gain * Complex64::cis(-(m as f64) * chi * ray.doa.sin());
            }
            assert!(
                (h.coefficients[m] - want).norm() < 1e-12,
                "antenna {m}: {} vs {}",
                h.coefficients[m],
                want
            );
        }
    }

    #[test]
    fn test_synthesis_rejects_empty_scenario() {
        let scenario = Scenario { rays: vec![], mean_doa: 0.0, angular_spread: 0.0, distance: 10.0 };
        assert!(matches!(
            synthesize_channel(&test_array(4), &scenario, 2.5e9),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn test_linearity_over_ray_concatenation() {
        let cfg = test_array(7);
        let mut rng = crate::rng::stream(13);
        let s1 = sample_scenario(&mut rng, &test_params(4)).unwrap();
        let s2 = sample_scenario(&mut rng, &test_params(3)).unwrap();
        let mut rays = s1.rays.clone();
        rays.extend(s2.rays.iter().copied());
        let joint = Scenario { rays, mean_doa: 0.0, angular_spread: 1.0, distance: 10.0 };
        let h1 = synthesize_channel(&cfg, &s1, 2.7e9).unwrap();
        let h2 = synthesize_channel(&cfg, &s2, 2.7e9).unwrap();
        let hj = synthesize_channel(&cfg, &joint, 2.7e9).unwrap();
        for m in 0..cfg.num_antennas {
            let sum = h1.coefficients[m] + h2.coefficients[m];
            assert!((hj.coefficients[m] - sum).norm() < 1e-12);
        }
    }

    #[test]
    fn test_attenuation_scaling_is_exact() {
        let cfg = test_array(4);
        let mut rng = crate::rng::stream(17);
        let scenario = sample_scenario(&mut rng, &test_params(3)).unwrap();
        let scaled = Scenario {
            rays: scenario
                .rays
                .iter()
                .map(|r| Ray { attenuation: r.attenuation * 2.0, ..*r })
                .collect(),
            ..scenario.clone()
        };
        let h = synthesize_channel(&cfg, &scenario, 2.5e9).unwrap();
        let hs = synthesize_channel(&cfg, &scaled, 2.5e9).unwrap();
        for m in 0..cfg.num_antennas {
            // x2 is a power of two: exact in floating point.
            assert_eq!(hs.coefficients[m], h.coefficients[m] * 2.0);
        }
    }

    #[test]
    fn test_sample_scenario_respects_bounds() {
        let params = test_params(200);
        let mut rng = crate::rng::stream(19);
        let s = sample_scenario(&mut rng, &params).unwrap();
        assert_eq!(s.rays.len(), 200);
        for ray in &s.rays {
            assert!(ray.attenuation >= 0.0);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&ray.phase));
            assert!((0.0..=params.delay_max).contains(&ray.delay));
            assert!(
                (ray.doa - s.mean_doa).abs() <= params.angular_spread / 2.0 + 1e-15,
                "DOA outside the spread interval"
            );
        }
        assert!((10.0..=500.0).contains(&s.distance));
    }

    #[test]
    fn test_sample_scenario_zero_spread_degenerates() {
        let params = ScenarioParams { angular_spread: 0.0, ..test_params(16) };
        let mut rng = crate::rng::stream(23);
        let s = sample_scenario(&mut rng, &params).unwrap();
        for ray in &s.rays {
            assert_eq!(ray.doa, s.mean_doa);
        }
    }

    #[test]
    fn test_sample_scenario_rejects_bad_params() {
        let mut rng = crate::rng::stream(29);
        let zero_paths = ScenarioParams { path_count: 0, ..test_params(1) };
        assert!(matches!(
            sample_scenario(&mut rng, &zero_paths),
            Err(Error::InvalidParameters(_))
        ));
        let negative_spread = ScenarioParams { angular_spread: -0.1, ..test_params(4) };
        assert!(sample_scenario(&mut rng, &negative_spread).is_err());
    }

    #[test]
    fn test_sample_scenario_is_reproducible() {
        let params = test_params(32);
        let s1 = sample_scenario(&mut crate::rng::stream(31), &params).unwrap();
        let s2 = sample_scenario(&mut crate::rng::stream(31), &params).unwrap();
        assert_eq!(s1, s2, "identical stream and params must give a bit-identical scenario");
    }

    #[test]
    fn test_path_substreams_nest_across_path_counts() {
        // With the same scenario stream, the first 25 rays of a P=50 draw
        // coincide with a P=25 draw up to the Rayleigh scale ratio.
        let p50 = test_params(50);
        let p25 = test_params(25);
        let a = sample_scenario(&mut crate::rng::stream(37), &p50).unwrap();
        let b = sample_scenario(&mut crate::rng::stream(37), &p25).unwrap();
        let ratio = (50f64 / 25.0).sqrt();
        for (ra, rb) in a.rays.iter().take(25).zip(&b.rays) {
            assert_eq!(ra.phase, rb.phase);
            assert_eq!(ra.delay, rb.delay);
            assert_eq!(ra.doa, rb.doa);
            assert!((rb.attenuation - ra.attenuation * ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn test_phase_distribution_uniformity() {
        // 1e5 sampled phases: mean near 0 and a 64-bin chi-square test at the
        // 1% level (critical value 92.0100 at dof 63).
        let params = test_params(100);
        let n_scen = 1000;
        let mut phases = Vec::with_capacity(n_scen * 100);
        for i in 0..n_scen as u64 {
            let mut rng = crate::rng::stream(crate::rng::derive_seed(41, "phase-test", i));
            let s = sample_scenario(&mut rng, &params).unwrap();
            phases.extend(s.rays.iter().map(|r| r.phase));
        }
        let mean = phases.iter().sum::<f64>() / phases.len() as f64;
        assert!(mean.abs() < 0.02, "phase mean {mean} too far from 0");
        let mut bins = [0usize; 64];
        for p in &phases {
            let u = (p + std::f64::consts::PI) / TWO_PI;
            bins[((u * 64.0) as usize).min(63)] += 1;
        }
        let expect = phases.len() as f64 / 64.0;
        let chi2: f64 = bins.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 92.0100236, "phase uniformity chi-square {chi2} exceeds critical value");
    }

    #[test]
    fn test_rayleigh_attenuation_moments() {
        // E[alpha^2] = 1/P by the default scale choice.
        let p = 64;
        let params = test_params(p);
        let mut total = 0.0;
        let mut count = 0usize;
        for i in 0..2000 {
            let mut rng = crate::rng::stream(crate::rng::derive_seed(43, "rayleigh-test", i));
            let s = sample_scenario(&mut rng, &params).unwrap();
            total += s.rays.iter().map(|r| r.attenuation * r.attenuation).sum::<f64>();
            count += s.rays.len();
        }
        let mean_sq = total / count as f64;
        let want = 1.0 / p as f64;
        assert!(
            (mean_sq / want - 1.0).abs() < 0.05,
            "E[alpha^2] = {mean_sq}, expected about {want}"
        );
    }

    #[test]
    fn test_channel_pair_shares_rays() {
        let cfg = test_array(8);
        let mut rng = crate::rng::stream(47);
        let s = sample_scenario(&mut rng, &test_params(10)).unwrap();
        let (up, down) = channel_pair(&cfg, &s, 2.5e9, 2.5e9).unwrap();
        assert_eq!(up.coefficients, down.coefficients, "equal carriers must give equal channels");
        let (a, b) = channel_pair(&cfg, &s, 2.5e9, 2.62e9).unwrap();
        let (c, d) = channel_pair(&cfg, &s, 2.62e9, 2.5e9).unwrap();
        assert_eq!(a.coefficients, d.coefficients);
        assert_eq!(b.coefficients, c.coefficients);
        assert_eq!(a.carrier_frequency, 2.5e9);
        assert_eq!(b.carrier_frequency, 2.62e9);
    }
}
