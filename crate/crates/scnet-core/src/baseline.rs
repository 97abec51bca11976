//! Real-valued FNN baseline operating on stacked (re, im) vectors.
//!
//! The baseline sees the same data as the complex network, packed as a real
//! vector of twice the length: real parts first, then imaginary parts. Its
//! loss divides by the number of complex label entries, so its value is
//! numerically identical to the complex network's mean squared error on the
//! same predictions. To keep comparisons fair, construction can enforce that
//! the baseline spends at least as many real parameters as the complex
//! network it is measured against.

use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::optim::GradientModel;
use crate::realnet::{BackwardScratch, RealGradients, RealNetwork, RealTape};

/// Samples per parallel gradient chunk; matches the complex trainer so both
/// models accumulate deterministically.
const GRAD_CHUNK: usize = 8;
const GRAD_BLOCK: usize = 1024;

/// Stacks a complex vector as [re..., im...].
pub fn pack_complex(z: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    out.extend(z.iter().map(|c| c.re));
    out.extend(z.iter().map(|c| c.im));
    out
}

/// Inverse of [`pack_complex`].
pub fn unpack_complex(v: &[f64]) -> Result<Vec<Complex64>> {
    if v.len() % 2 != 0 {
        return Err(Error::ShapeMismatch(format!(
            "packed vector length {} is odd; expected [re..., im...] halves",
            v.len()
        )));
    }
    let m = v.len() / 2;
    Ok((0..m).map(|k| Complex64::new(v[k], v[m + k])).collect())
}

/// The baseline model: a plain real network plus the packing convention.
#[derive(Debug, Clone, PartialEq)]
pub struct FnnModel {
    net: RealNetwork,
}

impl FnnModel {
    /// Initializes the network and enforces the fairness floor: the real
    /// parameter count must be at least `min_real_params` (pass 0 to skip,
    /// e.g. when no complex counterpart exists).
    pub fn init<R: rand::Rng>(
        sizes: &[usize],
        min_real_params: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let net = RealNetwork::init(sizes, rng)?;
        if net.param_count() < min_real_params {
            return Err(Error::InvalidArchitecture(format!(
                "baseline has {} real parameters but fairness requires at least {min_real_params}",
                net.param_count()
            )));
        }
        Ok(Self { net })
    }

    /// Wraps an existing network (used when loading weights from disk).
    pub fn from_network(net: RealNetwork) -> Self {
        Self { net }
    }

    pub fn network(&self) -> &RealNetwork {
        &self.net
    }

    pub fn sizes(&self) -> &[usize] {
        self.net.sizes()
    }

    /// Complex vector length this model consumes and produces.
    pub fn complex_dim(&self) -> usize {
        self.net.input_dim() / 2
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.net.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self { net: RealNetwork::load(path)? })
    }
}

impl GradientModel for FnnModel {
    fn param_count(&self) -> usize {
        self.net.param_count()
    }

    fn read_params(&self, out: &mut [f64]) {
        self.net.read_params(out)
    }

    fn write_params(&mut self, src: &[f64]) {
        self.net.write_params(src)
    }

    fn batch_loss_and_grad(
        &self,
        ds: &Dataset,
        idx: &[usize],
        grad_out: &mut [f64],
        pool: &ThreadPool,
    ) -> Result<f64> {
        let m = ds.dim();
        if self.net.input_dim() != 2 * m || self.net.output_dim() != 2 * m {
            return Err(Error::ShapeMismatch(format!(
                "baseline maps {} -> {} but the packed dataset dimension is {}",
                self.net.input_dim(),
                self.net.output_dim(),
                2 * m
            )));
        }
        if idx.is_empty() {
            return Err(Error::InvalidParameters("empty batch".into()));
        }
        // The loss divides by the complex entry count V·M, so δ = 2/(V·M)
        // per real component — identical scaling to the complex model.
        let err_scale = 2.0 / (idx.len() * m) as f64;

        let mut total_sq = 0.0;
        let mut accum = RealGradients::zeros_like(&self.net);
        for block in idx.chunks(GRAD_BLOCK) {
            let partials: Result<Vec<(f64, RealGradients)>> = pool.install(|| {
                block
                    .par_chunks(GRAD_CHUNK)
                    .map(|chunk| {
                        let mut tape = RealTape::for_network(&self.net);
                        let mut scratch = BackwardScratch::for_network(&self.net);
                        let mut grads = RealGradients::zeros_like(&self.net);
                        let mut x = vec![0.0; 2 * m];
                        let mut err = vec![0.0; 2 * m];
                        let mut sq = 0.0;
                        for &i in chunk {
                            for (k, c) in ds.input(i).iter().enumerate() {
                                x[k] = c.re;
                                x[m + k] = c.im;
                            }
                            self.net.forward_into(&x, &mut tape)?;
                            let y = tape.output();
                            for (k, c) in ds.label(i).iter().enumerate() {
                                let dr = y[k] - c.re;
                                let di = y[m + k] - c.im;
                                sq += dr * dr + di * di;
                                err[k] = err_scale * dr;
                                err[m + k] = err_scale * di;
                            }
                            self.net.backward_accumulate(&tape, &err, &mut grads, &mut scratch)?;
                        }
                        Ok((sq, grads))
                    })
                    .collect()
            });
            for (sq, grads) in partials? {
                total_sq += sq;
                for l in 0..accum.gw.len() {
                    for (d, s) in accum.gw[l].iter_mut().zip(&grads.gw[l]) {
                        *d += s;
                    }
                    for (d, s) in accum.gb[l].iter_mut().zip(&grads.gb[l]) {
                        *d += s;
                    }
                }
            }
        }
        self.net.flatten_grads(&accum, grad_out);
        Ok(total_sq / (idx.len() * m) as f64)
    }

    fn predict_into(&self, input: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let packed = pack_complex(input);
        let (y, _) = self.net.forward(&packed)?;
        let unpacked = unpack_complex(&y)?;
        out.copy_from_slice(&unpacked);
        Ok(())
    }
}
