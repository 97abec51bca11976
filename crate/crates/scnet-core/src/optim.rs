//! Loss, component-wise ADAM, and the mini-batch training loop.
//!
//! ADAM treats every parameter as an independent real scalar; the complex
//! network exposes its weights as a flat float64 vector of (re, im)
//! components, so one optimizer serves both the complex and real models.
//!
//! Training is deterministic for a fixed seed regardless of the worker
//! count: batch gradients are accumulated over fixed-size sample chunks
//! that are computed in parallel but summed in index order.

use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;
use std::io::Write;
use std::path::Path;

use crate::cvnn::{ComplexBackwardScratch, ComplexNetwork, ForwardTape, GradientSet};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval;
use crate::rng::{derive_seed, stream};

/// Samples per parallel gradient chunk; chunk sums are reduced in index
/// order so results do not depend on thread scheduling.
const GRAD_CHUNK: usize = 8;
/// Samples per parallel block; bounds how many chunk accumulators are alive.
const GRAD_BLOCK: usize = 1024;

/// Mean squared error over complex entries: (1/(V·N)) Σ ‖pred − label‖²
/// for V stacked samples of length N.
pub fn mse(pred: &[Complex64], labels: &[Complex64]) -> f64 {
    assert_eq!(pred.len(), labels.len());
    if pred.is_empty() {
        return 0.0;
    }
    let total: f64 = pred.iter().zip(labels).map(|(p, l)| (p - l).norm_sqr()).sum();
    total / pred.len() as f64
}

// ---- ADAM ----

/// ADAM hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 0.001, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self { lr, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "learning rate must be nonnegative and finite, got {}",
                self.lr
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::InvalidConfiguration(format!(
                    "{name} must lie in [0, 1), got {b}"
                )));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Per-component first and second moment estimates.
#[derive(Debug, Clone)]
pub struct AdamState {
    cfg: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(param_count: usize, cfg: AdamConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0 })
    }

    /// One bias-corrected update; ε is added after the square root.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let c1 = 1.0 - self.cfg.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.cfg.beta2.powi(self.t as i32);
        for j in 0..params.len() {
            let g = grads[j];
            self.m[j] = self.cfg.beta1 * self.m[j] + (1.0 - self.cfg.beta1) * g;
            self.v[j] = self.cfg.beta2 * self.v[j] + (1.0 - self.cfg.beta2) * g * g;
            let m_hat = self.m[j] / c1;
            let v_hat = self.v[j] / c2;
            params[j] -= self.cfg.lr * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
        }
    }
}

// ---- Trainable models ----

/// A model trainable by [`train`]: flat real parameters plus a batched
/// loss/gradient evaluation.
pub trait GradientModel {
    fn param_count(&self) -> usize;
    fn read_params(&self, out: &mut [f64]);
    fn write_params(&mut self, src: &[f64]);
    /// Mean loss over the indexed samples; writes ∂loss/∂params into
    /// `grad_out` (overwriting it).
    fn batch_loss_and_grad(
        &self,
        ds: &Dataset,
        idx: &[usize],
        grad_out: &mut [f64],
        pool: &ThreadPool,
    ) -> Result<f64>;
    /// Predicts one sample; `out` has the dataset's complex dimension.
    fn predict_into(&self, input: &[Complex64], out: &mut [Complex64]) -> Result<()>;
}

impl GradientModel for ComplexNetwork {
    fn param_count(&self) -> usize {
        self.param_count()
    }

    fn read_params(&self, out: &mut [f64]) {
        ComplexNetwork::read_params(self, out)
    }

    fn write_params(&mut self, src: &[f64]) {
        ComplexNetwork::write_params(self, src)
    }

    fn batch_loss_and_grad(
        &self,
        ds: &Dataset,
        idx: &[usize],
        grad_out: &mut [f64],
        pool: &ThreadPool,
    ) -> Result<f64> {
        let m = ds.dim();
        if self.input_dim() != m || self.output_dim() != m {
            return Err(Error::ShapeMismatch(format!(
                "network maps {} -> {} but the dataset has dimension {m}",
                self.input_dim(),
                self.output_dim()
            )));
        }
        if idx.is_empty() {
            return Err(Error::InvalidParameters("empty batch".into()));
        }
        // δ = (2 / (V·N)) (pred − label), the loss gradient at the output.
        let err_scale = 2.0 / (idx.len() * m) as f64;

        let mut total_sq = 0.0;
        let mut accum = GradientSet::zeros_like(self);
        for block in idx.chunks(GRAD_BLOCK) {
            let partials: Result<Vec<(f64, GradientSet)>> = pool.install(|| {
                block
                    .par_chunks(GRAD_CHUNK)
                    .map(|chunk| {
                        let mut tape = ForwardTape::for_network(self);
                        let mut scratch = ComplexBackwardScratch::for_network(self);
                        let mut grads = GradientSet::zeros_like(self);
                        let mut x_re = vec![0.0; m];
                        let mut x_im = vec![0.0; m];
                        let mut err_re = vec![0.0; m];
                        let mut err_im = vec![0.0; m];
                        let mut sq = 0.0;
                        for &i in chunk {
                            crate::cvnn::split_complex(ds.input(i), &mut x_re, &mut x_im);
                            self.forward_into(&x_re, &x_im, &mut tape)?;
                            let label = ds.label(i);
                            for k in 0..m {
                                let dr = tape.output_re()[k] - label[k].re;
                                let di = tape.output_im()[k] - label[k].im;
                                sq += dr * dr + di * di;
                                err_re[k] = err_scale * dr;
                                err_im[k] = err_scale * di;
                            }
                            self.backward_accumulate(
                                &tape, &err_re, &err_im, &mut grads, &mut scratch,
                            )?;
                        }
                        Ok((sq, grads))
                    })
                    .collect()
            });
            for (sq, grads) in partials? {
                total_sq += sq;
                accum.add_assign(&grads);
            }
        }
        accum.flatten_into(grad_out);
        Ok(total_sq / (idx.len() * m) as f64)
    }

    fn predict_into(&self, input: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let (y, _) = self.forward(input)?;
        out.copy_from_slice(&y);
        Ok(())
    }
}

// ---- Training loop ----

/// Settings for [`train`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Seed for the per-epoch shuffles.
    pub seed: u64,
    pub shuffle: bool,
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfiguration("batch size must be at least 1".into()));
        }
        AdamConfig::with_lr(self.lr).validate()
    }
}

/// One row of the training trace; epochs are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub eval_nmse: f64,
}

/// Outcome of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochMetrics>,
    /// NMSE on the evaluation set after the last epoch (before the first,
    /// when training ran for zero epochs).
    pub final_eval_nmse: f64,
}

fn shuffled_indices<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Trains with mini-batch ADAM.
///
/// Each epoch visits every training sample once, in a freshly shuffled order
/// (Fisher–Yates on a stream derived from the seed and epoch number); a
/// trailing partial batch is kept. The reported train loss is the
/// sample-weighted mean of the batch losses; the evaluation NMSE is computed
/// after each epoch. A non-finite loss or NMSE aborts with
/// [`Error::TrainingDiverged`].
pub fn train<M: GradientModel>(
    model: &mut M,
    train_ds: &Dataset,
    eval_ds: &Dataset,
    cfg: &TrainConfig,
    pool: &ThreadPool,
) -> Result<TrainReport> {
    cfg.validate()?;
    if train_ds.is_empty() || eval_ds.is_empty() {
        return Err(Error::InvalidParameters("training and evaluation sets must be non-empty".into()));
    }
    let n = train_ds.len();
    let mut params = vec![0.0; model.param_count()];
    let mut grads = vec![0.0; model.param_count()];
    model.read_params(&mut params);
    let mut adam = AdamState::new(params.len(), AdamConfig::with_lr(cfg.lr))?;

    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut final_eval_nmse = f64::NAN;
    for epoch in 1..=cfg.epochs {
        let order = if cfg.shuffle {
            let mut rng = stream(derive_seed(cfg.seed, "shuffle", epoch as u64 - 1));
            shuffled_indices(n, &mut rng)
        } else {
            (0..n).collect()
        };
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let loss = model.batch_loss_and_grad(train_ds, batch, &mut grads, pool)?;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            loss_sum += loss * batch.len() as f64;
            adam.step(&mut params, &grads);
            model.write_params(&params);
        }
        let train_loss = loss_sum / n as f64;
        let eval_nmse = eval::dataset_nmse(model, eval_ds)?.nmse;
        if !eval_nmse.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        epochs.push(EpochMetrics { epoch, train_loss, eval_nmse });
        final_eval_nmse = eval_nmse;
    }
    if cfg.epochs == 0 {
        final_eval_nmse = eval::dataset_nmse(model, eval_ds)?.nmse;
    }
    Ok(TrainReport { epochs, final_eval_nmse })
}

/// Writes the per-epoch trace as CSV with an `epoch,train_loss,eval_nmse`
/// header line.
pub fn write_metrics_csv(path: &Path, epochs: &[EpochMetrics]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "epoch,train_loss,eval_nmse")?;
    for e in epochs {
        writeln!(w, "{},{},{}", e.epoch, e.train_loss, e.eval_nmse)?;
    }
    w.flush()?;
    Ok(())
}

// ---- Worker pools ----

/// Worker count precedence: explicit setting, then the SCNET_WORKERS
/// environment variable, then the machine's available parallelism.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    let validate = |w: usize, origin: &str| {
        if w == 0 {
            Err(Error::InvalidConfiguration(format!("{origin} must be at least 1")))
        } else {
            Ok(w)
        }
    };
    if let Some(w) = explicit {
        return validate(w, "worker count");
    }
    if let Ok(raw) = std::env::var("SCNET_WORKERS") {
        let w = raw.trim().parse::<usize>().map_err(|_| {
            Error::InvalidConfiguration(format!("SCNET_WORKERS must be a positive integer, got {raw:?}"))
        })?;
        return validate(w, "SCNET_WORKERS");
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Builds a rayon pool with exactly `workers` threads.
pub fn make_pool(workers: usize) -> Result<ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidConfiguration("worker count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfiguration(format!("failed to build worker pool: {e}")))
}
