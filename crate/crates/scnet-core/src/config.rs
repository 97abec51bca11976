//! Run configuration: presets, TOML overlay files, validation, conversions.
//!
//! A [`RunConfig`] collects every tunable of the pipeline — array geometry,
//! scenario distribution, estimation, dataset size, architectures, training
//! hyperparameters and sweep grids — under a single master seed. Configs are
//! built from a [`Preset`] base (the full-scale reference setting or the
//! desk-scale one) and optionally overlaid with a TOML file that overrides any
//! subset of keys. Unknown keys are rejected, and parse errors carry line
//! numbers so a typo in a sweep file is caught before hours of training.
//!
//! File schema (all keys optional; anything omitted keeps the preset value):
//!
//! ```toml
//! master_seed = 1
//! workers = 4                        # thread count; default: machine parallelism
//!
//! [array]
//! num_antennas = 32
//! antenna_spacing_m = 0.05996        # default: half wavelength at f_up
//!
//! [scenario]
//! path_count = 50
//! angular_spread_deg = 10.0
//! mean_doa_range_deg = [-60.0, 60.0]
//! delay_max_s = 1e-10
//! distance_range_m = [10.0, 500.0]
//!
//! [estimation]
//! snr_db = 25.0
//! perfect = false                    # true bypasses estimation noise
//! noisy_labels = false               # true degrades labels the same way
//!
//! [dataset]
//! count = 9216
//! train_fraction = 0.8888888888888888
//! f_up_hz = 2.5e9
//! f_down_hz = 2.62e9
//!
//! [architecture]
//! scnet_hidden = [128, 64, 128]      # complex widths; in/out M are implied
//! fnn_hidden = [256, 128, 256]       # real widths; in/out 2M are implied
//!
//! [training]
//! epochs = 200
//! batch_size = 128
//! lr = 0.001
//! shuffle = true
//!
//! [sweep]
//! angular_spread_deg = [5.0, 25.0]
//! freq_diff_hz = [10e6, 120e6]
//! path_count = [25, 50, 100]
//! seeds_per_point = 3
//! include_baseline = true
//! deploy_eval_count = 4096
//! ```

use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::{ArrayConfig, ScenarioParams};
use crate::error::{Error, Result};
use crate::eval::{RunSettings, SweepControl, SweepSpec};
use crate::optim;

// ---- Presets ----

/// Base configuration to start from before file/flag overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Full-scale reference setting: 128 antennas, 200 paths, 102,400
    /// samples, 400 epochs. Hours of CPU time per training run.
    Paper,
    /// Reduced setting that keeps the full-scale hidden widths but shrinks
    /// the array and data so one training run takes minutes, not hours:
    /// 32 antennas, 50 paths, 9,216 samples, 200 epochs.
    Desk,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
        }
    }

    /// The full configuration this preset stands for.
    pub fn config(self) -> RunConfig {
        match self {
            Preset::Paper => RunConfig {
                master_seed: 1,
                workers: None,
                array: ArraySection { num_antennas: 128, antenna_spacing_m: None },
                scenario: ScenarioSection {
                    path_count: 200,
                    angular_spread_deg: 10.0,
                    mean_doa_range_deg: (-60.0, 60.0),
                    delay_max_s: 1e-4,
                    distance_range_m: (10.0, 500.0),
                },
                estimation: EstimationSection {
                    snr_db: 25.0,
                    perfect: false,
                    noisy_labels: false,
                },
                dataset: DatasetSection {
                    count: 102_400,
                    train_fraction: 0.9,
                    f_up_hz: 2.5e9,
                    f_down_hz: 2.62e9,
                },
                architecture: ArchitectureSection {
                    scnet_hidden: vec![128, 64, 128],
                    fnn_hidden: vec![256, 128, 256],
                },
                training: TrainingSection {
                    epochs: 400,
                    batch_size: 128,
                    lr: 0.001,
                    shuffle: true,
                },
                sweep: SweepSection {
                    angular_spread_deg: vec![5.0, 10.0, 15.0, 20.0, 25.0],
                    freq_diff_hz: (1..=12).map(|k| k as f64 * 10e6).collect(),
                    path_count: vec![50, 100, 150, 200, 250, 300],
                    seeds_per_point: 3,
                    include_baseline: true,
                    deploy_eval_count: 10_240,
                },
            },
            Preset::Desk => RunConfig {
                master_seed: 1,
                workers: None,
                array: ArraySection { num_antennas: 32, antenna_spacing_m: None },
                scenario: ScenarioSection {
                    path_count: 50,
                    angular_spread_deg: 10.0,
                    mean_doa_range_deg: (-60.0, 60.0),
                    delay_max_s: 1e-10,
                    distance_range_m: (10.0, 500.0),
                },
                estimation: EstimationSection {
                    snr_db: 25.0,
                    perfect: false,
                    noisy_labels: false,
                },
                dataset: DatasetSection {
                    count: 9216,
                    train_fraction: 8.0 / 9.0,
                    f_up_hz: 2.5e9,
                    f_down_hz: 2.62e9,
                },
                architecture: ArchitectureSection {
                    scnet_hidden: vec![128, 64, 128],
                    fnn_hidden: vec![256, 128, 256],
                },
                training: TrainingSection {
                    epochs: 200,
                    batch_size: 128,
                    lr: 0.001,
                    shuffle: true,
                },
                sweep: SweepSection {
                    angular_spread_deg: vec![5.0, 25.0],
                    freq_diff_hz: vec![10e6, 120e6],
                    path_count: vec![25, 50, 100],
                    seeds_per_point: 3,
                    include_baseline: true,
                    deploy_eval_count: 4096,
                },
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::InvalidConfiguration(format!(
                "unknown preset {other:?}; expected \"paper\" or \"desk\""
            ))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

// ---- Resolved configuration ----

/// Uniform linear array geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySection {
    pub num_antennas: usize,
    /// Spacing in meters; `None` means half a wavelength at `f_up_hz`.
    pub antenna_spacing_m: Option<f64>,
}

/// Multipath scenario distribution (angles in degrees, as written in files).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSection {
    pub path_count: usize,
    pub angular_spread_deg: f64,
    pub mean_doa_range_deg: (f64, f64),
    pub delay_max_s: f64,
    pub distance_range_m: (f64, f64),
}

/// Uplink estimation model and label treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationSection {
    pub snr_db: f64,
    /// Bypass estimation noise; inputs become the true uplink channel.
    pub perfect: bool,
    /// Degrade downlink labels with the same estimation model.
    pub noisy_labels: bool,
}

/// Dataset size, split, and carrier frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSection {
    pub count: usize,
    pub train_fraction: f64,
    pub f_up_hz: f64,
    pub f_down_hz: f64,
}

/// Hidden-layer widths of both models; in/out widths are implied by the array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureSection {
    pub scnet_hidden: Vec<usize>,
    pub fnn_hidden: Vec<usize>,
}

/// Training-loop hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub shuffle: bool,
}

/// Sweep grids and aggregation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub angular_spread_deg: Vec<f64>,
    pub freq_diff_hz: Vec<f64>,
    pub path_count: Vec<usize>,
    pub seeds_per_point: usize,
    pub include_baseline: bool,
    pub deploy_eval_count: usize,
}

/// Every tunable of the pipeline, fully resolved.
///
/// Built via [`Preset::config`] and optionally [`RunConfig::overlay_toml`];
/// [`RunConfig::load`] does both and validates. All randomness in a run flows
/// from `master_seed` through documented derivations, so two runs with equal
/// configs produce bit-identical artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub master_seed: u64,
    /// Worker threads; `None` defers to `SCNET_WORKERS` or machine parallelism.
    pub workers: Option<usize>,
    pub array: ArraySection,
    pub scenario: ScenarioSection,
    pub estimation: EstimationSection,
    pub dataset: DatasetSection,
    pub architecture: ArchitectureSection,
    pub training: TrainingSection,
    pub sweep: SweepSection,
}

// ---- File mirror (every key optional, unknown keys rejected) ----

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    master_seed: Option<u64>,
    workers: Option<usize>,
    array: Option<FileArray>,
    scenario: Option<FileScenario>,
    estimation: Option<FileEstimation>,
    dataset: Option<FileDataset>,
    architecture: Option<FileArchitecture>,
    training: Option<FileTraining>,
    sweep: Option<FileSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileArray {
    num_antennas: Option<usize>,
    antenna_spacing_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileScenario {
    path_count: Option<usize>,
    angular_spread_deg: Option<f64>,
    mean_doa_range_deg: Option<(f64, f64)>,
    delay_max_s: Option<f64>,
    distance_range_m: Option<(f64, f64)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEstimation {
    snr_db: Option<f64>,
    perfect: Option<bool>,
    noisy_labels: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDataset {
    count: Option<usize>,
    train_fraction: Option<f64>,
    f_up_hz: Option<f64>,
    f_down_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileArchitecture {
    scnet_hidden: Option<Vec<usize>>,
    fnn_hidden: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTraining {
    epochs: Option<usize>,
    batch_size: Option<usize>,
    lr: Option<f64>,
    shuffle: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    angular_spread_deg: Option<Vec<f64>>,
    freq_diff_hz: Option<Vec<f64>>,
    path_count: Option<Vec<usize>>,
    seeds_per_point: Option<usize>,
    include_baseline: Option<bool>,
    deploy_eval_count: Option<usize>,
}

/// Copies each present source field over the destination.
macro_rules! merge_fields {
    ($dst:expr, $src:expr; $($field:ident),+ $(,)?) => {
        $( if let Some(v) = $src.$field { $dst.$field = v; } )+
    };
}

impl RunConfig {
    /// Overrides any subset of keys from a TOML document.
    ///
    /// Unknown keys and type mismatches are rejected with the parser's
    /// line-numbered message. The merged config is validated afterwards.
    pub fn overlay_toml(mut self, text: &str) -> Result<RunConfig> {
        let file: FileConfig = toml::from_str(text)
            .map_err(|e| Error::InvalidConfiguration(format!("config error: {e}")))?;

        if let Some(seed) = file.master_seed {
            self.master_seed = seed;
        }
        if let Some(w) = file.workers {
            self.workers = Some(w);
        }
        if let Some(s) = file.array {
            merge_fields!(self.array, s; num_antennas);
            if let Some(d) = s.antenna_spacing_m {
                self.array.antenna_spacing_m = Some(d);
            }
        }
        if let Some(s) = file.scenario {
            merge_fields!(self.scenario, s;
                path_count, angular_spread_deg, mean_doa_range_deg, delay_max_s,
                distance_range_m);
        }
        if let Some(s) = file.estimation {
            merge_fields!(self.estimation, s; snr_db, perfect, noisy_labels);
        }
        if let Some(s) = file.dataset {
            merge_fields!(self.dataset, s; count, train_fraction, f_up_hz, f_down_hz);
        }
        if let Some(s) = file.architecture {
            merge_fields!(self.architecture, s; scnet_hidden, fnn_hidden);
        }
        if let Some(s) = file.training {
            merge_fields!(self.training, s; epochs, batch_size, lr, shuffle);
        }
        if let Some(s) = file.sweep {
            merge_fields!(self.sweep, s;
                angular_spread_deg, freq_diff_hz, path_count, seeds_per_point,
                include_baseline, deploy_eval_count);
        }
        self.validate()?;
        Ok(self)
    }

    /// Reads a TOML file over the given preset and validates the result.
    pub fn load(path: &Path, base: Preset) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        base.config().overlay_toml(&text)
    }

    /// Checks every field's range; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(msg));

        if let Some(w) = self.workers {
            if w == 0 {
                return bad("workers must be at least 1".into());
            }
        }
        if self.array.num_antennas == 0 {
            return bad("[array] num_antennas must be at least 1".into());
        }
        if let Some(d) = self.array.antenna_spacing_m {
            if !(d > 0.0) || !d.is_finite() {
                return bad(format!("[array] antenna_spacing_m must be positive and finite, got {d}"));
            }
        }

        let sc = &self.scenario;
        if sc.path_count == 0 {
            return bad("[scenario] path_count must be at least 1".into());
        }
        if !(sc.angular_spread_deg >= 0.0) || !sc.angular_spread_deg.is_finite() {
            return bad(format!(
                "[scenario] angular_spread_deg must be nonnegative and finite, got {}",
                sc.angular_spread_deg
            ));
        }
        let (lo, hi) = sc.mean_doa_range_deg;
        if !lo.is_finite() || !hi.is_finite() || lo > hi || lo < -90.0 || hi > 90.0 {
            return bad(format!(
                "[scenario] mean_doa_range_deg must satisfy -90 <= min <= max <= 90, got [{lo}, {hi}]"
            ));
        }
        if !(sc.delay_max_s >= 0.0) || !sc.delay_max_s.is_finite() {
            return bad(format!(
                "[scenario] delay_max_s must be nonnegative and finite, got {}",
                sc.delay_max_s
            ));
        }
        let (dlo, dhi) = sc.distance_range_m;
        if !(dlo > 0.0) || !(dhi >= dlo) || !dhi.is_finite() {
            return bad(format!(
                "[scenario] distance_range_m must satisfy 0 < min <= max, got [{dlo}, {dhi}]"
            ));
        }

        if !self.estimation.snr_db.is_finite() {
            return bad(format!("[estimation] snr_db must be finite, got {}", self.estimation.snr_db));
        }

        let ds = &self.dataset;
        if ds.count < 2 {
            return bad(format!("[dataset] count must be at least 2, got {}", ds.count));
        }
        if !(ds.train_fraction > 0.0 && ds.train_fraction < 1.0) {
            return bad(format!(
                "[dataset] train_fraction must lie strictly between 0 and 1, got {}",
                ds.train_fraction
            ));
        }
        for (key, f) in [("f_up_hz", ds.f_up_hz), ("f_down_hz", ds.f_down_hz)] {
            if !(f > 0.0) || !f.is_finite() {
                return bad(format!("[dataset] {key} must be positive and finite, got {f}"));
            }
        }

        for (key, widths) in [
            ("scnet_hidden", &self.architecture.scnet_hidden),
            ("fnn_hidden", &self.architecture.fnn_hidden),
        ] {
            if widths.iter().any(|&w| w == 0) {
                return bad(format!("[architecture] {key} widths must all be at least 1"));
            }
        }

        let tr = &self.training;
        if tr.epochs == 0 {
            return bad("[training] epochs must be at least 1".into());
        }
        if tr.batch_size == 0 {
            return bad("[training] batch_size must be at least 1".into());
        }
        if !(tr.lr >= 0.0) || !tr.lr.is_finite() {
            return bad(format!("[training] lr must be nonnegative and finite, got {}", tr.lr));
        }

        let sw = &self.sweep;
        for (key, n) in [
            ("angular_spread_deg", sw.angular_spread_deg.len()),
            ("freq_diff_hz", sw.freq_diff_hz.len()),
            ("path_count", sw.path_count.len()),
        ] {
            if n == 0 {
                return bad(format!("[sweep] {key} grid must not be empty"));
            }
        }
        if sw.angular_spread_deg.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return bad("[sweep] angular_spread_deg values must be nonnegative and finite".into());
        }
        if sw.freq_diff_hz.iter().any(|&df| !df.is_finite() || self.dataset.f_up_hz + df <= 0.0) {
            return bad("[sweep] freq_diff_hz values must keep f_up + diff positive".into());
        }
        if sw.path_count.iter().any(|&p| p == 0) {
            return bad("[sweep] path_count values must be at least 1".into());
        }
        if sw.seeds_per_point == 0 {
            return bad("[sweep] seeds_per_point must be at least 1".into());
        }
        if sw.deploy_eval_count == 0 {
            return bad("[sweep] deploy_eval_count must be at least 1".into());
        }
        Ok(())
    }

    // ---- Conversions into module-level parameter types ----

    /// Array geometry; spacing defaults to half a wavelength at `f_up_hz`.
    pub fn array(&self) -> Result<ArrayConfig> {
        match self.array.antenna_spacing_m {
            Some(d) => ArrayConfig::new(self.array.num_antennas, d),
            None => ArrayConfig::half_wavelength(self.array.num_antennas, self.dataset.f_up_hz),
        }
    }

    /// Scenario distribution with angles converted to radians.
    pub fn scenario_params(&self) -> ScenarioParams {
        let sc = &self.scenario;
        ScenarioParams {
            path_count: sc.path_count,
            angular_spread: sc.angular_spread_deg.to_radians(),
            mean_doa_range: (
                sc.mean_doa_range_deg.0.to_radians(),
                sc.mean_doa_range_deg.1.to_radians(),
            ),
            delay_max: sc.delay_max_s,
            distance_range: sc.distance_range_m,
            rayleigh_scale: None,
        }
    }

    /// Complex layer widths: `[M, hidden..., M]`.
    pub fn scnet_sizes(&self) -> Vec<usize> {
        let m = self.array.num_antennas;
        let mut sizes = Vec::with_capacity(self.architecture.scnet_hidden.len() + 2);
        sizes.push(m);
        sizes.extend_from_slice(&self.architecture.scnet_hidden);
        sizes.push(m);
        sizes
    }

    /// Real baseline widths: `[2M, hidden..., 2M]`.
    pub fn fnn_sizes(&self) -> Vec<usize> {
        let m2 = 2 * self.array.num_antennas;
        let mut sizes = Vec::with_capacity(self.architecture.fnn_hidden.len() + 2);
        sizes.push(m2);
        sizes.extend_from_slice(&self.architecture.fnn_hidden);
        sizes.push(m2);
        sizes
    }

    /// The full experiment protocol in one struct.
    pub fn run_settings(&self) -> Result<RunSettings> {
        Ok(RunSettings {
            array: self.array()?,
            scenario: self.scenario_params(),
            f_up: self.dataset.f_up_hz,
            f_down: self.dataset.f_down_hz,
            snr_db: self.estimation.snr_db,
            perfect_estimation: self.estimation.perfect,
            noisy_labels: self.estimation.noisy_labels,
            count: self.dataset.count,
            train_fraction: self.dataset.train_fraction,
            scnet_sizes: self.scnet_sizes(),
            fnn_sizes: self.fnn_sizes(),
            epochs: self.training.epochs,
            batch_size: self.training.batch_size,
            lr: self.training.lr,
            shuffle: self.training.shuffle,
        })
    }

    /// Selects a sweep grid by control name.
    ///
    /// Accepted names: `angular_spread` (alias `angular_spread_deg`),
    /// `freq_diff` (alias `freq_diff_hz`), `path_count`.
    pub fn sweep_control(&self, name: &str) -> Result<SweepControl> {
        match name {
            "angular_spread" | "angular_spread_deg" => {
                Ok(SweepControl::AngularSpreadDeg(self.sweep.angular_spread_deg.clone()))
            }
            "freq_diff" | "freq_diff_hz" => {
                Ok(SweepControl::FrequencyDiffHz(self.sweep.freq_diff_hz.clone()))
            }
            "path_count" => Ok(SweepControl::PathCount(self.sweep.path_count.clone())),
            other => Err(Error::InvalidConfiguration(format!(
                "unknown sweep control {other:?}; expected angular_spread, freq_diff, or path_count"
            ))),
        }
    }

    /// Sweep specification with per-seed runs at `master_seed, master_seed+1, …`.
    pub fn sweep_spec(&self, control: SweepControl) -> Result<SweepSpec> {
        Ok(SweepSpec {
            settings: self.run_settings()?,
            control,
            seeds: (0..self.sweep.seeds_per_point)
                .map(|i| self.master_seed.wrapping_add(i as u64))
                .collect(),
            include_baseline: self.sweep.include_baseline,
            deploy_eval_count: self.sweep.deploy_eval_count,
        })
    }

    /// Worker count for this run. The `SCNET_WORKERS` environment variable
    /// overrides the config key; with neither set, the machine decides.
    pub fn effective_workers(&self) -> Result<usize> {
        if std::env::var_os("SCNET_WORKERS").is_some() {
            optim::resolve_workers(None)
        } else {
            optim::resolve_workers(self.workers)
        }
    }
}
