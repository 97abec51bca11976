//! Complex-valued dense network with split-ReLU activations.
//!
//! Layers compute g(Wx + b) where W, b, and x are complex and g clamps the
//! real and imaginary parts independently at zero; the final layer is affine.
//! Weights are stored as separate real/imaginary planes so the hot loops run
//! on contiguous float64 rows.
//!
//! Gradients follow the packed convention: every complex parameter is two
//! independent real degrees of freedom, and the returned gradient for a
//! parameter a + jb packs (∂L/∂a) + j(∂L/∂b). This makes backward exactly
//! equivalent to ordinary real backprop through the doubled real network
//! produced by [`ComplexNetwork::real_composite_oracle`], with the tied
//! block entries of that network summed back into each complex parameter.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::realnet::{
    read_exact_or_truncated, validate_sizes, RealDenseLayer, RealGradients, RealNetwork,
};

/// Magic bytes of the complex-network weight file.
pub const COMPLEX_WEIGHTS_MAGIC: &[u8; 8] = b"SCNETW01";
const COMPLEX_WEIGHTS_VERSION: u32 = 1;

/// Split ReLU: clamps real and imaginary parts at zero independently.
pub fn crelu(z: &[Complex64]) -> Vec<Complex64> {
    z.iter().map(|c| Complex64::new(c.re.max(0.0), c.im.max(0.0))).collect()
}

/// Complex parameters (weights plus biases) of a dense architecture.
pub fn complex_param_total(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Copies a complex slice into separate real/imaginary planes.
pub fn split_complex(z: &[Complex64], re: &mut [f64], im: &mut [f64]) {
    assert_eq!(z.len(), re.len());
    assert_eq!(z.len(), im.len());
    for (i, c) in z.iter().enumerate() {
        re[i] = c.re;
        im[i] = c.im;
    }
}

/// Rebuilds a complex vector from real/imaginary planes.
pub fn merge_complex(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    assert_eq!(re.len(), im.len());
    re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
}

/// One complex dense layer, stored as real/imaginary planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major out_dim × in_dim real parts of W.
    pub w_re: Vec<f64>,
    /// Row-major out_dim × in_dim imaginary parts of W.
    pub w_im: Vec<f64>,
    pub b_re: Vec<f64>,
    pub b_im: Vec<f64>,
    pub has_activation: bool,
}

impl ComplexDenseLayer {
    pub fn weight(&self, i: usize, k: usize) -> Complex64 {
        let at = i * self.in_dim + k;
        Complex64::new(self.w_re[at], self.w_im[at])
    }

    pub fn set_weight(&mut self, i: usize, k: usize, w: Complex64) {
        let at = i * self.in_dim + k;
        self.w_re[at] = w.re;
        self.w_im[at] = w.im;
    }

    pub fn bias(&self, i: usize) -> Complex64 {
        Complex64::new(self.b_re[i], self.b_im[i])
    }

    pub fn set_bias(&mut self, i: usize, b: Complex64) {
        self.b_re[i] = b.re;
        self.b_im[i] = b.im;
    }

    /// y = Wx + b on split planes: Re y = Wre·xre − Wim·xim + bre and
    /// Im y = Wre·xim + Wim·xre + bim.
    fn forward_into(&self, x_re: &[f64], x_im: &[f64], y_re: &mut [f64], y_im: &mut [f64]) {
        for i in 0..self.out_dim {
            let wr = &self.w_re[i * self.in_dim..(i + 1) * self.in_dim];
            let wi = &self.w_im[i * self.in_dim..(i + 1) * self.in_dim];
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for k in 0..self.in_dim {
                acc_re += wr[k] * x_re[k] - wi[k] * x_im[k];
                acc_im += wr[k] * x_im[k] + wi[k] * x_re[k];
            }
            y_re[i] = acc_re + self.b_re[i];
            y_im[i] = acc_im + self.b_im[i];
        }
    }
}

/// Feedforward complex network.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexNetwork {
    layers: Vec<ComplexDenseLayer>,
    sizes: Vec<usize>,
}

/// Activations and pre-activations retained by a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTape {
    /// acts[l] is the input to layer l; the last entry is the network output.
    acts_re: Vec<Vec<f64>>,
    acts_im: Vec<Vec<f64>>,
    /// pre[l] is the pre-activation output of layer l.
    pre_re: Vec<Vec<f64>>,
    pre_im: Vec<Vec<f64>>,
}

impl ForwardTape {
    pub fn for_network(net: &ComplexNetwork) -> Self {
        let acts_re: Vec<Vec<f64>> = net.sizes.iter().map(|&n| vec![0.0; n]).collect();
        let pre_re: Vec<Vec<f64>> = net.sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Self { acts_im: acts_re.clone(), pre_im: pre_re.clone(), acts_re, pre_re }
    }

    pub fn output_re(&self) -> &[f64] {
        self.acts_re.last().unwrap()
    }

    pub fn output_im(&self) -> &[f64] {
        self.acts_im.last().unwrap()
    }

    pub fn output_complex(&self) -> Vec<Complex64> {
        merge_complex(self.output_re(), self.output_im())
    }
}

/// Parameter gradients shaped like the network's planes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub gw_re: Vec<Vec<f64>>,
    pub gw_im: Vec<Vec<f64>>,
    pub gb_re: Vec<Vec<f64>>,
    pub gb_im: Vec<Vec<f64>>,
}

impl GradientSet {
    pub fn zeros_like(net: &ComplexNetwork) -> Self {
        Self {
            gw_re: net.layers.iter().map(|l| vec![0.0; l.w_re.len()]).collect(),
            gw_im: net.layers.iter().map(|l| vec![0.0; l.w_im.len()]).collect(),
            gb_re: net.layers.iter().map(|l| vec![0.0; l.b_re.len()]).collect(),
            gb_im: net.layers.iter().map(|l| vec![0.0; l.b_im.len()]).collect(),
        }
    }

    pub fn clear(&mut self) {
        for plane in self
            .gw_re
            .iter_mut()
            .chain(self.gw_im.iter_mut())
            .chain(self.gb_re.iter_mut())
            .chain(self.gb_im.iter_mut())
        {
            plane.fill(0.0);
        }
    }

    /// Elementwise sum, used when merging per-chunk accumulators.
    pub fn add_assign(&mut self, other: &GradientSet) {
        let pairs = [
            (&mut self.gw_re, &other.gw_re),
            (&mut self.gw_im, &other.gw_im),
            (&mut self.gb_re, &other.gb_re),
            (&mut self.gb_im, &other.gb_im),
        ];
        for (dst, src) in pairs {
            for (d, s) in dst.iter_mut().zip(src) {
                for (dv, sv) in d.iter_mut().zip(s) {
                    *dv += sv;
                }
            }
        }
    }

    /// Packed complex gradient of weight (i, k) in layer l.
    pub fn weight_grad(&self, l: usize, i: usize, k: usize, in_dim: usize) -> Complex64 {
        let at = i * in_dim + k;
        Complex64::new(self.gw_re[l][at], self.gw_im[l][at])
    }

    /// Flattens into the parameter-vector order: per layer W row-major then
    /// b, each entry as (re, im).
    pub fn flatten_into(&self, out: &mut [f64]) {
        let mut at = 0;
        for l in 0..self.gw_re.len() {
            for (r, i) in self.gw_re[l].iter().zip(&self.gw_im[l]) {
                out[at] = *r;
                out[at + 1] = *i;
                at += 2;
            }
            for (r, i) in self.gb_re[l].iter().zip(&self.gb_im[l]) {
                out[at] = *r;
                out[at + 1] = *i;
                at += 2;
            }
        }
        assert_eq!(at, out.len());
    }
}

/// Scratch buffers for [`ComplexNetwork::backward_accumulate`].
#[derive(Debug, Clone)]
pub struct ComplexBackwardScratch {
    d_re: Vec<f64>,
    d_im: Vec<f64>,
    e_re: Vec<f64>,
    e_im: Vec<f64>,
}

impl ComplexBackwardScratch {
    pub fn for_network(net: &ComplexNetwork) -> Self {
        let widest = net.sizes.iter().copied().max().unwrap();
        Self {
            d_re: vec![0.0; widest],
            d_im: vec![0.0; widest],
            e_re: vec![0.0; widest],
            e_im: vec![0.0; widest],
        }
    }
}

impl ComplexNetwork {
    /// Initializes weights from a circular Gaussian with E|w|² = 1/fan_in
    /// (each real component has variance 1/(2·fan_in)); biases start at zero.
    /// Hidden layers get the split-ReLU activation, the last layer is affine.
    pub fn init<R: Rng>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        validate_sizes(sizes)?;
        let n_layers = sizes.len() - 1;
        let layers = (0..n_layers)
            .map(|l| {
                let (in_dim, out_dim) = (sizes[l], sizes[l + 1]);
                let std = (1.0 / (2.0 * in_dim as f64)).sqrt();
                let mut w_re = vec![0.0; in_dim * out_dim];
                let mut w_im = vec![0.0; in_dim * out_dim];
                for at in 0..in_dim * out_dim {
                    w_re[at] = rng.sample::<f64, _>(StandardNormal) * std;
                    w_im[at] = rng.sample::<f64, _>(StandardNormal) * std;
                }
                ComplexDenseLayer {
                    in_dim,
                    out_dim,
                    w_re,
                    w_im,
                    b_re: vec![0.0; out_dim],
                    b_im: vec![0.0; out_dim],
                    has_activation: l < n_layers - 1,
                }
            })
            .collect();
        Ok(Self { layers, sizes: sizes.to_vec() })
    }

    /// Builds a network from explicit layers.
    pub fn from_layers(layers: Vec<ComplexDenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArchitecture("network needs at least one layer".into()));
        }
        let mut sizes = vec![layers[0].in_dim];
        for (i, layer) in layers.iter().enumerate() {
            if layer.in_dim != sizes[i] {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {i} expects {} inputs but the previous layer outputs {}",
                    layer.in_dim, sizes[i]
                )));
            }
            let n = layer.in_dim * layer.out_dim;
            if layer.w_re.len() != n
                || layer.w_im.len() != n
                || layer.b_re.len() != layer.out_dim
                || layer.b_im.len() != layer.out_dim
            {
                return Err(Error::ShapeMismatch(format!(
                    "layer {i} parameter planes do not match its dimensions"
                )));
            }
            sizes.push(layer.out_dim);
        }
        Ok(Self { layers, sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> &[ComplexDenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Forward pass on split planes, writing into a reusable tape.
    pub fn forward_into(&self, x_re: &[f64], x_im: &[f64], tape: &mut ForwardTape) -> Result<()> {
        if x_re.len() != self.input_dim() || x_im.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "input length {} does not match network input {}",
                x_re.len(),
                self.input_dim()
            )));
        }
        tape.acts_re[0].copy_from_slice(x_re);
        tape.acts_im[0].copy_from_slice(x_im);
        for (l, layer) in self.layers.iter().enumerate() {
            let (head_re, tail_re) = tape.acts_re.split_at_mut(l + 1);
            let (head_im, tail_im) = tape.acts_im.split_at_mut(l + 1);
            layer.forward_into(&head_re[l], &head_im[l], &mut tape.pre_re[l], &mut tape.pre_im[l]);
            let out_re = &mut tail_re[0];
            let out_im = &mut tail_im[0];
            if layer.has_activation {
                for (o, &p) in out_re.iter_mut().zip(&tape.pre_re[l]) {
                    *o = p.max(0.0);
                }
                for (o, &p) in out_im.iter_mut().zip(&tape.pre_im[l]) {
                    *o = p.max(0.0);
                }
            } else {
                out_re.copy_from_slice(&tape.pre_re[l]);
                out_im.copy_from_slice(&tape.pre_im[l]);
            }
        }
        Ok(())
    }

    /// Convenience forward on a complex slice.
    pub fn forward(&self, x: &[Complex64]) -> Result<(Vec<Complex64>, ForwardTape)> {
        let mut tape = ForwardTape::for_network(self);
        let mut x_re = vec![0.0; x.len()];
        let mut x_im = vec![0.0; x.len()];
        split_complex(x, &mut x_re, &mut x_im);
        self.forward_into(&x_re, &x_im, &mut tape)?;
        Ok((tape.output_complex(), tape))
    }

    /// Backward pass accumulating packed gradients into `grads`.
    ///
    /// `err_re`/`err_im` hold ∂L/∂Re(output) and ∂L/∂Im(output). Per layer,
    /// with packed error δ and stored input a: the weight gradient is
    /// δ ⊗ conj(a), the bias gradient δ, and the propagated error Wᴴδ masked
    /// by the previous layer's split-ReLU (each part passes only where its
    /// pre-activation was strictly positive).
    pub fn backward_accumulate(
        &self,
        tape: &ForwardTape,
        err_re: &[f64],
        err_im: &[f64],
        grads: &mut GradientSet,
        scratch: &mut ComplexBackwardScratch,
    ) -> Result<()> {
        if err_re.len() != self.output_dim() || err_im.len() != self.output_dim() {
            return Err(Error::ShapeMismatch(format!(
                "output error length {} does not match network output {}",
                err_re.len(),
                self.output_dim()
            )));
        }
        scratch.d_re[..err_re.len()].copy_from_slice(err_re);
        scratch.d_im[..err_im.len()].copy_from_slice(err_im);
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let (ni, no) = (layer.in_dim, layer.out_dim);
            let a_re = &tape.acts_re[l];
            let a_im = &tape.acts_im[l];
            for i in 0..no {
                let dr = scratch.d_re[i];
                let di = scratch.d_im[i];
                let g_re = &mut grads.gw_re[l][i * ni..(i + 1) * ni];
                for k in 0..ni {
                    g_re[k] += dr * a_re[k] + di * a_im[k];
                }
                let g_im = &mut grads.gw_im[l][i * ni..(i + 1) * ni];
                for k in 0..ni {
                    g_im[k] += di * a_re[k] - dr * a_im[k];
                }
                grads.gb_re[l][i] += dr;
                grads.gb_im[l][i] += di;
            }
            if l > 0 {
                let e_re = &mut scratch.e_re[..ni];
                let e_im = &mut scratch.e_im[..ni];
                e_re.fill(0.0);
                e_im.fill(0.0);
                for i in 0..no {
                    let dr = scratch.d_re[i];
                    let di = scratch.d_im[i];
                    let wr = &layer.w_re[i * ni..(i + 1) * ni];
                    let wi = &layer.w_im[i * ni..(i + 1) * ni];
                    for k in 0..ni {
                        e_re[k] += wr[k] * dr + wi[k] * di;
                        e_im[k] += wr[k] * di - wi[k] * dr;
                    }
                }
                debug_assert!(self.layers[l - 1].has_activation);
                let pre_re = &tape.pre_re[l - 1];
                let pre_im = &tape.pre_im[l - 1];
                for k in 0..ni {
                    scratch.d_re[k] = if pre_re[k] > 0.0 { e_re[k] } else { 0.0 };
                    scratch.d_im[k] = if pre_im[k] > 0.0 { e_im[k] } else { 0.0 };
                }
            }
        }
        Ok(())
    }

    /// Convenience backward from a complex output error.
    pub fn backward(&self, tape: &ForwardTape, out_err: &[Complex64]) -> Result<GradientSet> {
        let mut err_re = vec![0.0; out_err.len()];
        let mut err_im = vec![0.0; out_err.len()];
        split_complex(out_err, &mut err_re, &mut err_im);
        let mut grads = GradientSet::zeros_like(self);
        let mut scratch = ComplexBackwardScratch::for_network(self);
        self.backward_accumulate(tape, &err_re, &err_im, &mut grads, &mut scratch)?;
        Ok(grads)
    }

    /// Number of complex parameters.
    pub fn complex_param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w_re.len() + l.b_re.len()).sum()
    }

    /// Number of real degrees of freedom (two per complex parameter); this is
    /// the length of the flat parameter vector.
    pub fn param_count(&self) -> usize {
        2 * self.complex_param_count()
    }

    /// Copies parameters into `out`: per layer W row-major then b, each
    /// entry as (re, im).
    pub fn read_params(&self, out: &mut [f64]) {
        assert_eq!(out.len(), self.param_count());
        let mut at = 0;
        for layer in &self.layers {
            for (r, i) in layer.w_re.iter().zip(&layer.w_im) {
                out[at] = *r;
                out[at + 1] = *i;
                at += 2;
            }
            for (r, i) in layer.b_re.iter().zip(&layer.b_im) {
                out[at] = *r;
                out[at + 1] = *i;
                at += 2;
            }
        }
    }

    /// Overwrites parameters from `src` (same order as [`read_params`]).
    pub fn write_params(&mut self, src: &[f64]) {
        assert_eq!(src.len(), self.param_count());
        let mut at = 0;
        for layer in &mut self.layers {
            for idx in 0..layer.w_re.len() {
                layer.w_re[idx] = src[at];
                layer.w_im[idx] = src[at + 1];
                at += 2;
            }
            for idx in 0..layer.b_re.len() {
                layer.b_re[idx] = src[at];
                layer.b_im[idx] = src[at + 1];
                at += 2;
            }
        }
    }

    /// Builds the doubled real network that computes the same map on stacked
    /// (re, im) vectors: each complex weight matrix A + jB becomes the block
    /// matrix [[A, −B], [B, A]], biases stack as [re; im], and split-ReLU
    /// becomes plain ReLU on the stacked halves.
    pub fn real_composite_oracle(&self) -> RealNetwork {
        let layers = self
            .layers
            .iter()
            .map(|cl| {
                let (ni, no) = (cl.in_dim, cl.out_dim);
                let stride = 2 * ni;
                let mut w = vec![0.0; 4 * ni * no];
                for i in 0..no {
                    for k in 0..ni {
                        let a = cl.w_re[i * ni + k];
                        let b = cl.w_im[i * ni + k];
                        w[i * stride + k] = a;
                        w[i * stride + ni + k] = -b;
                        w[(no + i) * stride + k] = b;
                        w[(no + i) * stride + ni + k] = a;
                    }
                }
                let mut bias = vec![0.0; 2 * no];
                bias[..no].copy_from_slice(&cl.b_re);
                bias[no..].copy_from_slice(&cl.b_im);
                RealDenseLayer {
                    in_dim: 2 * ni,
                    out_dim: 2 * no,
                    w,
                    b: bias,
                    has_activation: cl.has_activation,
                }
            })
            .collect();
        RealNetwork::from_layers(layers).expect("composite of a valid network is valid")
    }

    /// Folds gradients of the composite network back onto the complex
    /// parameters: each complex entry appears in two tied blocks, so its
    /// packed gradient is the sum of both partials.
    pub fn project_composite_grads(&self, grads: &RealGradients) -> GradientSet {
        let mut out = GradientSet::zeros_like(self);
        for (l, layer) in self.layers.iter().enumerate() {
            let (ni, no) = (layer.in_dim, layer.out_dim);
            let stride = 2 * ni;
            let gw = &grads.gw[l];
            for i in 0..no {
                for k in 0..ni {
                    out.gw_re[l][i * ni + k] =
                        gw[i * stride + k] + gw[(no + i) * stride + ni + k];
                    out.gw_im[l][i * ni + k] =
                        gw[(no + i) * stride + k] - gw[i * stride + ni + k];
                }
            }
            out.gb_re[l].copy_from_slice(&grads.gb[l][..no]);
            out.gb_im[l].copy_from_slice(&grads.gb[l][no..]);
        }
        out
    }

    /// Writes the weight file: magic, version, layer sizes, then the flat
    /// parameter vector as little-endian float64.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(COMPLEX_WEIGHTS_MAGIC)?;
        w.write_u32::<LittleEndian>(COMPLEX_WEIGHTS_VERSION)?;
        w.write_u32::<LittleEndian>(self.sizes.len() as u32)?;
        for &n in &self.sizes {
            w.write_u32::<LittleEndian>(n as u32)?;
        }
        let mut params = vec![0.0; self.param_count()];
        self.read_params(&mut params);
        for v in params {
            w.write_f64::<LittleEndian>(v)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a weight file written by [`save`].
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        read_exact_or_truncated(&mut r, &mut magic, "magic")?;
        if &magic != COMPLEX_WEIGHTS_MAGIC {
            return Err(Error::BadMagic {
                expected: String::from_utf8_lossy(COMPLEX_WEIGHTS_MAGIC).into_owned(),
                found: String::from_utf8_lossy(&magic).into_owned(),
            });
        }
        let version = r
            .read_u32::<LittleEndian>()
            .map_err(|_| Error::Truncated("missing version field".into()))?;
        if version != COMPLEX_WEIGHTS_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: COMPLEX_WEIGHTS_VERSION,
            });
        }
        let n_sizes = r
            .read_u32::<LittleEndian>()
            .map_err(|_| Error::Truncated("missing layer-count field".into()))?
            as usize;
        if n_sizes < 2 {
            return Err(Error::Corrupt(format!("weight file declares {n_sizes} layer sizes")));
        }
        let mut sizes = Vec::with_capacity(n_sizes);
        for _ in 0..n_sizes {
            let n = r
                .read_u32::<LittleEndian>()
                .map_err(|_| Error::Truncated("size list ends early".into()))?
                as usize;
            if n == 0 {
                return Err(Error::Corrupt("zero layer size in weight file".into()));
            }
            sizes.push(n);
        }
        let n_layers = n_sizes - 1;
        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            let (in_dim, out_dim) = (sizes[l], sizes[l + 1]);
            let n = in_dim * out_dim;
            let mut layer = ComplexDenseLayer {
                in_dim,
                out_dim,
                w_re: vec![0.0; n],
                w_im: vec![0.0; n],
                b_re: vec![0.0; out_dim],
                b_im: vec![0.0; out_dim],
                has_activation: l < n_layers - 1,
            };
            for idx in 0..n + out_dim {
                let re = r
                    .read_f64::<LittleEndian>()
                    .map_err(|_| Error::Truncated(format!("layer {l} payload ends early")))?;
                let im = r
                    .read_f64::<LittleEndian>()
                    .map_err(|_| Error::Truncated(format!("layer {l} payload ends early")))?;
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Corrupt(format!("non-finite parameter in layer {l}")));
                }
                if idx < n {
                    layer.w_re[idx] = re;
                    layer.w_im[idx] = im;
                } else {
                    layer.b_re[idx - n] = re;
                    layer.b_im[idx - n] = im;
                }
            }
            layers.push(layer);
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Corrupt("trailing bytes after weight payload".into()));
        }
        Self::from_layers(layers)
    }
}
