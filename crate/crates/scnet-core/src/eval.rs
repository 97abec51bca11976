//! Evaluation metrics, cost accounting, and experiment sweeps.
//!
//! The quality metric is the normalized mean squared error: the average over
//! samples of ‖h − ĥ‖² / ‖h‖², with the expectation outside the ratio.
//! Samples whose label has exactly zero norm contribute an undefined ratio
//! and are excluded (and counted); labels merely close to zero participate
//! normally.
//!
//! Sweeps train models across a control grid with several seeds per point
//! and report mean and standard deviation per point. Every run derives its
//! dataset, initialization, and shuffle streams from the run seed alone, so
//! a sweep point whose control value equals the base configuration
//! reproduces a standalone training run exactly.

use num_complex::Complex64;
use rayon::ThreadPool;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::baseline::FnnModel;
use crate::channel::ScenarioParams;
use crate::cvnn::{complex_param_total, ComplexNetwork, COMPLEX_WEIGHTS_MAGIC};
use crate::dataset::{generate, generate_with, Dataset, GenOverrides, GenParams};
use crate::error::{Error, Result};
use crate::optim::{train, GradientModel, TrainConfig, TrainReport};
use crate::realnet::REAL_WEIGHTS_MAGIC;
use crate::rng::{derive_seed, stream};

// ---- NMSE ----

/// Outcome of an NMSE evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmseReport {
    /// Mean of per-sample relative squared errors.
    pub nmse: f64,
    /// Samples that entered the average.
    pub used: usize,
    /// Samples excluded for having a zero-norm label.
    pub excluded: usize,
}

#[derive(Default)]
struct NmseAccum {
    sum: f64,
    used: usize,
    excluded: usize,
}

impl NmseAccum {
    fn add(&mut self, err_sq: f64, label_sq: f64) {
        if label_sq == 0.0 {
            self.excluded += 1;
        } else {
            self.sum += err_sq / label_sq;
            self.used += 1;
        }
    }

    fn finish(self) -> Result<NmseReport> {
        if self.used == 0 {
            return Err(Error::InvalidParameters(
                "every label has zero norm; NMSE is undefined".into(),
            ));
        }
        if self.excluded > 0 {
            eprintln!(
                "warning: excluded {} of {} samples with zero-norm labels from the NMSE average",
                self.excluded,
                self.excluded + self.used
            );
        }
        Ok(NmseReport { nmse: self.sum / self.used as f64, used: self.used, excluded: self.excluded })
    }
}

/// NMSE of flat prediction/label buffers holding `len / dim` samples.
pub fn nmse_report(preds: &[Complex64], labels: &[Complex64], dim: usize) -> Result<NmseReport> {
    if dim == 0 || preds.len() != labels.len() || preds.len() % dim != 0 || preds.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "prediction/label buffers of {} and {} entries do not form samples of dimension {dim}",
            preds.len(),
            labels.len()
        )));
    }
    let mut accum = NmseAccum::default();
    for s in 0..preds.len() / dim {
        let p = &preds[s * dim..(s + 1) * dim];
        let l = &labels[s * dim..(s + 1) * dim];
        let err_sq: f64 = p.iter().zip(l).map(|(a, b)| (a - b).norm_sqr()).sum();
        let label_sq: f64 = l.iter().map(|b| b.norm_sqr()).sum();
        accum.add(err_sq, label_sq);
    }
    accum.finish()
}

/// NMSE of a model's predictions over a dataset.
pub fn dataset_nmse<M: GradientModel>(model: &M, ds: &Dataset) -> Result<NmseReport> {
    let dim = ds.dim();
    let mut pred = vec![Complex64::new(0.0, 0.0); dim];
    let mut accum = NmseAccum::default();
    for i in 0..ds.len() {
        let label = ds.label(i);
        let label_sq: f64 = label.iter().map(|b| b.norm_sqr()).sum();
        if label_sq == 0.0 {
            accum.add(0.0, 0.0);
            continue;
        }
        model.predict_into(ds.input(i), &mut pred)?;
        let err_sq: f64 = pred.iter().zip(label).map(|(a, b)| (a - b).norm_sqr()).sum();
        accum.add(err_sq, label_sq);
    }
    accum.finish()
}

// ---- Computational cost ----

/// Real multiplications of one forward pass through a real dense network.
pub fn real_flops(sizes: &[usize]) -> u64 {
    sizes.windows(2).map(|w| (w[0] * w[1]) as u64).sum()
}

/// Real multiplications of one forward pass through a complex dense network:
/// each complex multiply costs four real ones.
pub fn complex_flops(sizes: &[usize]) -> u64 {
    4 * real_flops(sizes)
}

// ---- Trained models ----

/// Either of the two trainable model families, unified for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Scnet(ComplexNetwork),
    Fnn(FnnModel),
}

impl TrainedModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TrainedModel::Scnet(_) => "scnet",
            TrainedModel::Fnn(_) => "fnn",
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        match self {
            TrainedModel::Scnet(net) => net.save(path),
            TrainedModel::Fnn(model) => model.save(path),
        }
    }

    /// Loads either weight format, dispatching on the file magic.
    pub fn load_auto(path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        let mut magic = [0u8; 8];
        crate::realnet::read_exact_or_truncated(&mut file, &mut magic, "magic")?;
        drop(file);
        if &magic == COMPLEX_WEIGHTS_MAGIC {
            Ok(TrainedModel::Scnet(ComplexNetwork::load(path)?))
        } else if &magic == REAL_WEIGHTS_MAGIC {
            Ok(TrainedModel::Fnn(FnnModel::load(path)?))
        } else {
            Err(Error::BadMagic {
                expected: format!(
                    "{} or {}",
                    String::from_utf8_lossy(COMPLEX_WEIGHTS_MAGIC),
                    String::from_utf8_lossy(REAL_WEIGHTS_MAGIC)
                ),
                found: String::from_utf8_lossy(&magic).into_owned(),
            })
        }
    }
}

impl GradientModel for TrainedModel {
    fn param_count(&self) -> usize {
        match self {
            TrainedModel::Scnet(net) => GradientModel::param_count(net),
            TrainedModel::Fnn(model) => GradientModel::param_count(model),
        }
    }

    fn read_params(&self, out: &mut [f64]) {
        match self {
            TrainedModel::Scnet(net) => GradientModel::read_params(net, out),
            TrainedModel::Fnn(model) => GradientModel::read_params(model, out),
        }
    }

    fn write_params(&mut self, src: &[f64]) {
        match self {
            TrainedModel::Scnet(net) => GradientModel::write_params(net, src),
            TrainedModel::Fnn(model) => GradientModel::write_params(model, src),
        }
    }

    fn batch_loss_and_grad(
        &self,
        ds: &Dataset,
        idx: &[usize],
        grad_out: &mut [f64],
        pool: &ThreadPool,
    ) -> Result<f64> {
        match self {
            TrainedModel::Scnet(net) => net.batch_loss_and_grad(ds, idx, grad_out, pool),
            TrainedModel::Fnn(model) => model.batch_loss_and_grad(ds, idx, grad_out, pool),
        }
    }

    fn predict_into(&self, input: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            TrainedModel::Scnet(net) => net.predict_into(input, out),
            TrainedModel::Fnn(model) => model.predict_into(input, out),
        }
    }
}

// ---- Standard runs ----

/// Which model family to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Scnet,
    Fnn,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Scnet => "scnet",
            ModelKind::Fnn => "fnn",
        }
    }
}

/// Everything a training run needs besides the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub array: crate::channel::ArrayConfig,
    pub scenario: ScenarioParams,
    pub f_up: f64,
    pub f_down: f64,
    pub snr_db: f64,
    pub perfect_estimation: bool,
    pub noisy_labels: bool,
    pub count: usize,
    pub train_fraction: f64,
    pub scnet_sizes: Vec<usize>,
    pub fnn_sizes: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub shuffle: bool,
}

impl RunSettings {
    /// Generation parameters for a given master seed.
    pub fn gen_params(&self, master_seed: u64) -> GenParams {
        GenParams {
            count: self.count,
            array: self.array,
            scenario: self.scenario.clone(),
            f_up: self.f_up,
            f_down: self.f_down,
            snr_db: self.snr_db,
            perfect_estimation: self.perfect_estimation,
            noisy_labels: self.noisy_labels,
            master_seed,
        }
    }

    /// Checks that both architectures open and close at the array width.
    pub fn validate(&self) -> Result<()> {
        let m = self.array.num_antennas;
        let ends = |sizes: &[usize]| (sizes.first().copied(), sizes.last().copied());
        if ends(&self.scnet_sizes) != (Some(m), Some(m)) {
            return Err(Error::InvalidArchitecture(format!(
                "complex network sizes {:?} must start and end at the antenna count {m}",
                self.scnet_sizes
            )));
        }
        if ends(&self.fnn_sizes) != (Some(2 * m), Some(2 * m)) {
            return Err(Error::InvalidArchitecture(format!(
                "baseline sizes {:?} must start and end at twice the antenna count ({})",
                self.fnn_sizes,
                2 * m
            )));
        }
        Ok(())
    }
}

/// A completed training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub model: TrainedModel,
    pub report: TrainReport,
    /// Evaluation NMSE of the freshly initialized model, before training.
    pub untrained_nmse: f64,
    /// Normalization divisor of the training dataset.
    pub train_scale: f64,
    /// Estimator prior measured on the training dataset.
    pub channel_power: f64,
}

/// Generates data, initializes, and trains one model.
///
/// All randomness derives from `run_seed`: the dataset master, the
/// initialization stream, and the shuffle seed each use their own derived
/// stream, so a run is reproducible from (settings, seed) alone.
pub fn run_model(
    settings: &RunSettings,
    kind: ModelKind,
    run_seed: u64,
    pool: &ThreadPool,
) -> Result<RunOutcome> {
    settings.validate()?;
    let gen = generate(&settings.gen_params(derive_seed(run_seed, "dataset", 0)))?;
    let (tr, ev) = gen.dataset.split(settings.train_fraction)?;
    let (model, report, untrained_nmse) = train_split(settings, kind, run_seed, &tr, &ev, pool)?;
    Ok(RunOutcome {
        model,
        report,
        untrained_nmse,
        train_scale: gen.dataset.meta.scale,
        channel_power: gen.channel_power,
    })
}

/// Initializes and trains one model on an already split dataset.
///
/// Uses the same seed derivations as [`run_model`], so training a dataset
/// file generated under `run_seed` reproduces the in-process run bit for
/// bit. Returns the model, the per-epoch report, and the untrained NMSE.
pub fn train_split(
    settings: &RunSettings,
    kind: ModelKind,
    run_seed: u64,
    tr: &Dataset,
    ev: &Dataset,
    pool: &ThreadPool,
) -> Result<(TrainedModel, TrainReport, f64)> {
    settings.validate()?;
    let mut init_rng = stream(derive_seed(run_seed, "init", 0));
    let mut model = match kind {
        ModelKind::Scnet => {
            TrainedModel::Scnet(ComplexNetwork::init(&settings.scnet_sizes, &mut init_rng)?)
        }
        ModelKind::Fnn => TrainedModel::Fnn(FnnModel::init(
            &settings.fnn_sizes,
            2 * complex_param_total(&settings.scnet_sizes),
            &mut init_rng,
        )?),
    };
    let untrained_nmse = dataset_nmse(&model, ev)?.nmse;
    let cfg = TrainConfig {
        epochs: settings.epochs,
        batch_size: settings.batch_size,
        lr: settings.lr,
        seed: derive_seed(run_seed, "train", 0),
        shuffle: settings.shuffle,
    };
    let report = train(&mut model, tr, ev, &cfg, pool)?;
    Ok((model, report, untrained_nmse))
}

/// Evaluates a trained model on a freshly generated deployment set with a
/// different path count, preprocessed exactly as the training data was:
/// the training run's normalization scale and estimator prior are reused.
pub fn deployment_nmse<M: GradientModel>(
    model: &M,
    settings: &RunSettings,
    path_count: usize,
    deploy_master: u64,
    count: usize,
    train_scale: f64,
    channel_power: f64,
) -> Result<f64> {
    let mut params = settings.gen_params(deploy_master);
    params.scenario.path_count = path_count;
    params.count = count;
    let ds = generate_with(
        &params,
        &GenOverrides { scale: Some(train_scale), channel_power: Some(channel_power) },
    )?
    .dataset;
    Ok(dataset_nmse(model, &ds)?.nmse)
}

// ---- Sweeps ----

/// The controlled variable of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepControl {
    /// Angular spread in degrees; each point retrains on matching data.
    AngularSpreadDeg(Vec<f64>),
    /// Downlink offset in Hz (f_down = f_up + Δf); each point retrains.
    FrequencyDiffHz(Vec<f64>),
    /// Deployment path counts; each seed trains once at the configured path
    /// count and is evaluated on a matched deployment set per value.
    PathCount(Vec<usize>),
}

impl SweepControl {
    pub fn name(&self) -> &'static str {
        match self {
            SweepControl::AngularSpreadDeg(_) => "angular_spread_deg",
            SweepControl::FrequencyDiffHz(_) => "freq_diff_hz",
            SweepControl::PathCount(_) => "path_count",
        }
    }
}

/// Settings for [`run_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub settings: RunSettings,
    pub control: SweepControl,
    /// Run seeds; points are averaged across them.
    pub seeds: Vec<u64>,
    /// Also train and evaluate the FNN baseline at every point.
    pub include_baseline: bool,
    /// Samples per deployment evaluation set (path-count sweeps).
    pub deploy_eval_count: usize,
}

/// One aggregated sweep row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub control_name: String,
    pub control_value: f64,
    pub model: String,
    pub mean_nmse: f64,
    pub std_nmse: f64,
    pub n_seeds: usize,
}

/// One seed's result at one point, kept for the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerSeedNmse {
    pub control_value: f64,
    pub model: String,
    pub seed: u64,
    pub nmse: f64,
}

/// Aggregated rows plus raw per-seed values and divergence notes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub per_seed: Vec<PerSeedNmse>,
    pub notes: Vec<String>,
}

fn aggregate_row(name: &str, value: f64, model: &str, vals: &[f64]) -> SweepRow {
    let n = vals.len();
    let mean = if n == 0 { f64::NAN } else { vals.iter().sum::<f64>() / n as f64 };
    let std = if n >= 2 {
        (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    SweepRow {
        control_name: name.to_string(),
        control_value: value,
        model: model.to_string(),
        mean_nmse: mean,
        std_nmse: std,
        n_seeds: n,
    }
}

/// Runs the sweep. Seeds whose training diverges are dropped from the
/// affected rows (with a note); `n_seeds` records how many survived.
pub fn run_sweep(spec: &SweepSpec, pool: &ThreadPool) -> Result<SweepResult> {
    if spec.seeds.is_empty() {
        return Err(Error::InvalidConfiguration("sweep needs at least one seed".into()));
    }
    let kinds: &[ModelKind] = if spec.include_baseline {
        &[ModelKind::Scnet, ModelKind::Fnn]
    } else {
        &[ModelKind::Scnet]
    };
    let name = spec.control.name();
    let mut result = SweepResult { rows: vec![], per_seed: vec![], notes: vec![] };

    match &spec.control {
        SweepControl::AngularSpreadDeg(values) | SweepControl::FrequencyDiffHz(values) => {
            for &value in values {
                let mut settings = spec.settings.clone();
                match spec.control {
                    SweepControl::AngularSpreadDeg(_) => {
                        settings.scenario.angular_spread = value.to_radians();
                    }
                    SweepControl::FrequencyDiffHz(_) => {
                        settings.f_down = settings.f_up + value;
                    }
                    SweepControl::PathCount(_) => unreachable!(),
                }
                for &kind in kinds {
                    let mut vals = Vec::with_capacity(spec.seeds.len());
                    for &seed in &spec.seeds {
                        match run_model(&settings, kind, seed, pool) {
                            Ok(outcome) => {
                                let nmse = outcome.report.final_eval_nmse;
                                vals.push(nmse);
                                result.per_seed.push(PerSeedNmse {
                                    control_value: value,
                                    model: kind.name().to_string(),
                                    seed,
                                    nmse,
                                });
                            }
                            Err(Error::TrainingDiverged { epoch }) => {
                                result.notes.push(format!(
                                    "{} training diverged at epoch {epoch} (seed {seed}, {name} = {value}); seed dropped from this row",
                                    kind.name()
                                ));
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    result.rows.push(aggregate_row(name, value, kind.name(), &vals));
                }
            }
        }
        SweepControl::PathCount(values) => {
            for &kind in kinds {
                let mut collected: Vec<Vec<f64>> = vec![Vec::new(); values.len()];
                for &seed in &spec.seeds {
                    match run_model(&spec.settings, kind, seed, pool) {
                        Ok(outcome) => {
                            // One deployment master per seed, shared by every
                            // path count: deployment sets are then coupled,
                            // so differences between rows reflect the path
                            // count rather than fresh sampling noise.
                            let deploy_master = derive_seed(seed, "deploy", 0);
                            for (pi, &p) in values.iter().enumerate() {
                                let nmse = deployment_nmse(
                                    &outcome.model,
                                    &spec.settings,
                                    p,
                                    deploy_master,
                                    spec.deploy_eval_count,
                                    outcome.train_scale,
                                    outcome.channel_power,
                                )?;
                                collected[pi].push(nmse);
                                result.per_seed.push(PerSeedNmse {
                                    control_value: p as f64,
                                    model: kind.name().to_string(),
                                    seed,
                                    nmse,
                                });
                            }
                        }
                        Err(Error::TrainingDiverged { epoch }) => {
                            result.notes.push(format!(
                                "{} training diverged at epoch {epoch} (seed {seed}); seed dropped from all path-count rows",
                                kind.name()
                            ));
                        }
                        Err(e) => return Err(e),
                    }
                }
                for (pi, &p) in values.iter().enumerate() {
                    result.rows.push(aggregate_row(name, p as f64, kind.name(), &collected[pi]));
                }
            }
        }
    }
    Ok(result)
}

/// Writes sweep rows as CSV with the standard header.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "control_name,control_value,model,mean_nmse,std_nmse,n_seeds")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.control_name, r.control_value, r.model, r.mean_nmse, r.std_nmse, r.n_seeds
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV plus a JSON sidecar (`<csv path>.meta.json`) holding the
/// per-seed values and notes.
pub fn write_sweep_outputs(csv_path: &Path, result: &SweepResult) -> Result<()> {
    write_sweep_csv(csv_path, &result.rows)?;
    let sidecar = PathBuf::from(format!("{}.meta.json", csv_path.display()));
    let file = std::fs::File::create(sidecar)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), result)
        .map_err(|e| Error::Io(e.into()))?;
    Ok(())
}
