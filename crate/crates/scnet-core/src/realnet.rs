//! Real-valued dense network with ReLU hidden activations.
//!
//! Used twice: as the FNN baseline operating on stacked real/imaginary parts,
//! and as the doubled-dimension real-composite oracle that validates the
//! complex network's forward and backward passes. Weight matrices are stored
//! row-major; layer l maps `sizes[l]` inputs to `sizes[l+1]` outputs, with
//! ReLU on every layer except the last.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Magic bytes of the real-network weight file.
pub const REAL_WEIGHTS_MAGIC: &[u8; 8] = b"SCNETW0R";
const REAL_WEIGHTS_VERSION: u32 = 1;

/// One dense layer: y = Wx + b, optionally followed by ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major out_dim × in_dim weights.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub has_activation: bool,
}

impl RealDenseLayer {
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.out_dim {
            let row = &self.w[i * self.in_dim..(i + 1) * self.in_dim];
            let mut acc = 0.0;
            for k in 0..self.in_dim {
                acc += row[k] * x[k];
            }
            out[i] = acc + self.b[i];
        }
    }
}

/// Feedforward real network.
#[derive(Debug, Clone, PartialEq)]
pub struct RealNetwork {
    layers: Vec<RealDenseLayer>,
    sizes: Vec<usize>,
}

/// Pre-activations and layer inputs retained by a forward pass for backward.
#[derive(Debug, Clone)]
pub struct RealTape {
    /// acts[l] is the input to layer l (acts[0] is the network input).
    acts: Vec<Vec<f64>>,
    /// pre[l] is the pre-activation output of layer l.
    pre: Vec<Vec<f64>>,
}

impl RealTape {
    /// Allocates buffers matching the network's layer sizes.
    pub fn for_network(net: &RealNetwork) -> Self {
        let acts = net.sizes.iter().map(|&n| vec![0.0; n]).collect();
        let pre = net.sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Self { acts, pre }
    }

    /// Network output after the forward pass that filled this tape.
    pub fn output(&self) -> &[f64] {
        self.acts.last().unwrap()
    }
}

/// Per-layer parameter gradients, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGradients {
    pub gw: Vec<Vec<f64>>,
    pub gb: Vec<Vec<f64>>,
}

impl RealGradients {
    pub fn zeros_like(net: &RealNetwork) -> Self {
        Self {
            gw: net.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            gb: net.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }

    pub fn clear(&mut self) {
        for g in self.gw.iter_mut().chain(self.gb.iter_mut()) {
            g.fill(0.0);
        }
    }
}

pub(crate) fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidArchitecture(format!(
            "need at least input and output sizes, got {sizes:?}"
        )));
    }
    if sizes.iter().any(|&n| n == 0) {
        return Err(Error::InvalidArchitecture(format!("zero-sized layer in {sizes:?}")));
    }
    Ok(())
}

impl RealNetwork {
    /// Initializes with N(0, 1/fan_in) weights and zero biases; ReLU on all
    /// but the last layer.
    pub fn init<R: Rng>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        validate_sizes(sizes)?;
        let n_layers = sizes.len() - 1;
        let layers = (0..n_layers)
            .map(|l| {
                let (in_dim, out_dim) = (sizes[l], sizes[l + 1]);
                let std = (1.0 / in_dim as f64).sqrt();
                let w = (0..in_dim * out_dim)
                    .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
                    .collect();
                RealDenseLayer {
                    in_dim,
                    out_dim,
                    w,
                    b: vec![0.0; out_dim],
                    has_activation: l < n_layers - 1,
                }
            })
            .collect();
        Ok(Self { layers, sizes: sizes.to_vec() })
    }

    /// Builds a network from explicit layers (used by the oracle construction).
    pub fn from_layers(layers: Vec<RealDenseLayer>) -> Result<Self> {
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
            if layer.w.len() != layer.in_dim * layer.out_dim || layer.b.len() != layer.out_dim {
                return Err(Error::ShapeMismatch(format!(
                    "layer {i} parameter buffers do not match its dimensions"
                )));
            }
            sizes.push(layer.out_dim);
        }
        Ok(Self { layers, sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> &[RealDenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Forward pass writing into a reusable tape.
    pub fn forward_into(&self, x: &[f64], tape: &mut RealTape) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "input length {} does not match network input {}",
                x.len(),
                self.input_dim()
            )));
        }
        tape.acts[0].copy_from_slice(x);
        for (l, layer) in self.layers.iter().enumerate() {
            let (before, after) = tape.acts.split_at_mut(l + 1);
            layer.forward_into(&before[l], &mut tape.pre[l]);
            let out = &mut after[0];
            if layer.has_activation {
                for (o, &p) in out.iter_mut().zip(&tape.pre[l]) {
                    *o = p.max(0.0);
                }
            } else {
                out.copy_from_slice(&tape.pre[l]);
            }
        }
        Ok(())
    }

    /// Convenience forward returning the output and a fresh tape.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, RealTape)> {
        let mut tape = RealTape::for_network(self);
        self.forward_into(x, &mut tape)?;
        Ok((tape.output().to_vec(), tape))
    }

    /// Backward pass accumulating parameter gradients into `grads`.
    ///
    /// `out_err` is ∂Loss/∂output; ReLU passes error only where the
    /// pre-activation is strictly positive (subgradient 0 at 0). The error
    /// buffers are scratch space sized to the widest layer.
    pub fn backward_accumulate(
        &self,
        tape: &RealTape,
        out_err: &[f64],
        grads: &mut RealGradients,
        scratch: &mut BackwardScratch,
    ) -> Result<()> {
        if out_err.len() != self.output_dim() {
            return Err(Error::ShapeMismatch(format!(
                "output error length {} does not match network output {}",
                out_err.len(),
                self.output_dim()
            )));
        }
        let delta = &mut scratch.delta;
        let prev = &mut scratch.prev;
        delta[..out_err.len()].copy_from_slice(out_err);
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let d = &delta[..layer.out_dim];
            let a = &tape.acts[l];
            let gw = &mut grads.gw[l];
            for i in 0..layer.out_dim {
                let di = d[i];
                let grow = &mut gw[i * layer.in_dim..(i + 1) * layer.in_dim];
                for k in 0..layer.in_dim {
                    grow[k] += di * a[k];
                }
                grads.gb[l][i] += di;
            }
            if l > 0 {
                // e = W^T d, then mask by the previous layer's ReLU.
                let e = &mut prev[..layer.in_dim];
                e.fill(0.0);
                for i in 0..layer.out_dim {
                    let di = d[i];
                    let row = &layer.w[i * layer.in_dim..(i + 1) * layer.in_dim];
                    for k in 0..layer.in_dim {
                        e[k] += row[k] * di;
                    }
                }
                let pre_prev = &tape.pre[l - 1];
                debug_assert!(self.layers[l - 1].has_activation);
                for k in 0..layer.in_dim {
                    delta[k] = if pre_prev[k] > 0.0 { e[k] } else { 0.0 };
                }
            }
        }
        Ok(())
    }

    /// Convenience backward returning fresh gradients.
    pub fn backward(&self, tape: &RealTape, out_err: &[f64]) -> Result<RealGradients> {
        let mut grads = RealGradients::zeros_like(self);
        let mut scratch = BackwardScratch::for_network(self);
        self.backward_accumulate(tape, out_err, &mut grads, &mut scratch)?;
        Ok(grads)
    }

    /// Number of real parameters (weights and biases).
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Copies all parameters into `out` (per layer: W row-major, then b).
    pub fn read_params(&self, out: &mut [f64]) {
        assert_eq!(out.len(), self.param_count());
        let mut at = 0;
        for layer in &self.layers {
            out[at..at + layer.w.len()].copy_from_slice(&layer.w);
            at += layer.w.len();
            out[at..at + layer.b.len()].copy_from_slice(&layer.b);
            at += layer.b.len();
        }
    }

    /// Overwrites all parameters from `src` (same order as [`read_params`]).
    pub fn write_params(&mut self, src: &[f64]) {
        assert_eq!(src.len(), self.param_count());
        let mut at = 0;
        for layer in &mut self.layers {
            let nw = layer.w.len();
            layer.w.copy_from_slice(&src[at..at + nw]);
            at += nw;
            let nb = layer.b.len();
            layer.b.copy_from_slice(&src[at..at + nb]);
            at += nb;
        }
    }

    /// Copies gradients into a flat buffer in the [`read_params`] order.
    pub fn flatten_grads(&self, grads: &RealGradients, out: &mut [f64]) {
        assert_eq!(out.len(), self.param_count());
        let mut at = 0;
        for (l, layer) in self.layers.iter().enumerate() {
            out[at..at + layer.w.len()].copy_from_slice(&grads.gw[l]);
            at += layer.w.len();
            out[at..at + layer.b.len()].copy_from_slice(&grads.gb[l]);
            at += layer.b.len();
        }
    }

    /// Writes the weight file: magic, version, sizes, then per-layer W and b
    /// as little-endian float64.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(REAL_WEIGHTS_MAGIC)?;
        w.write_u32::<LittleEndian>(REAL_WEIGHTS_VERSION)?;
        w.write_u32::<LittleEndian>(self.sizes.len() as u32)?;
        for &n in &self.sizes {
            w.write_u32::<LittleEndian>(n as u32)?;
        }
        for layer in &self.layers {
            for &v in layer.w.iter().chain(&layer.b) {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a weight file written by [`save`].
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        read_exact_or_truncated(&mut r, &mut magic, "magic")?;
        if &magic != REAL_WEIGHTS_MAGIC {
            return Err(Error::BadMagic {
                expected: String::from_utf8_lossy(REAL_WEIGHTS_MAGIC).into_owned(),
                found: String::from_utf8_lossy(&magic).into_owned(),
            });
        }
        let version = r
            .read_u32::<LittleEndian>()
            .map_err(|_| Error::Truncated("missing version field".into()))?;
        if version != REAL_WEIGHTS_VERSION {
            return Err(Error::UnsupportedVersion { found: version, supported: REAL_WEIGHTS_VERSION });
        }
        let n_sizes = r
            .read_u32::<LittleEndian>()
            .map_err(|_| Error::Truncated("missing layer-count field".into()))? as usize;
        if n_sizes < 2 {
            return Err(Error::Corrupt(format!("weight file declares {n_sizes} layer sizes")));
        }
        let mut sizes = Vec::with_capacity(n_sizes);
        for _ in 0..n_sizes {
            let n = r
                .read_u32::<LittleEndian>()
                .map_err(|_| Error::Truncated("size list ends early".into()))? as usize;
            if n == 0 {
                return Err(Error::Corrupt("zero layer size in weight file".into()));
            }
            sizes.push(n);
        }
        let n_layers = n_sizes - 1;
        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            let (in_dim, out_dim) = (sizes[l], sizes[l + 1]);
            let mut w = vec![0.0; in_dim * out_dim];
            let mut b = vec![0.0; out_dim];
            for v in w.iter_mut().chain(b.iter_mut()) {
                *v = r
                    .read_f64::<LittleEndian>()
                    .map_err(|_| Error::Truncated(format!("layer {l} payload ends early")))?;
                if !v.is_finite() {
                    return Err(Error::Corrupt(format!("non-finite parameter in layer {l}")));
                }
            }
            layers.push(RealDenseLayer {
                in_dim,
                out_dim,
                w,
                b,
                has_activation: l < n_layers - 1,
            });
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Corrupt("trailing bytes after weight payload".into()));
        }
        Self::from_layers(layers)
    }
}

/// Scratch buffers for [`RealNetwork::backward_accumulate`].
#[derive(Debug, Clone)]
pub struct BackwardScratch {
    delta: Vec<f64>,
    prev: Vec<f64>,
}

impl BackwardScratch {
    pub fn for_network(net: &RealNetwork) -> Self {
        let widest = net.sizes.iter().copied().max().unwrap();
        Self { delta: vec![0.0; widest], prev: vec![0.0; widest] }
    }
}

pub(crate) fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    let mut filled = 0;
    while filled < buf.len() {
        let n = r.read(&mut buf[filled..])?;
        if n == 0 {
            return Err(Error::Truncated(format!("{what}: expected {} bytes, got {filled}", buf.len())));
        }
        filled += n;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn test_init_shapes_and_biases() {
        let net = RealNetwork::init(&[6, 8, 4], &mut stream(1)).unwrap();
        assert_eq!(net.sizes(), &[6, 8, 4]);
        assert_eq!(net.layers().len(), 2);
        assert!(net.layers()[0].has_activation);
        assert!(!net.layers()[1].has_activation);
        for layer in net.layers() {
            assert!(layer.b.iter().all(|&b| b == 0.0), "biases must start at zero");
        }
        assert_eq!(net.param_count(), 6 * 8 + 8 + 8 * 4 + 4);
    }

    #[test]
    fn test_init_rejects_bad_sizes() {
        assert!(RealNetwork::init(&[4], &mut stream(1)).is_err());
        assert!(RealNetwork::init(&[4, 0, 4], &mut stream(1)).is_err());
    }

    #[test]
    fn test_forward_identity_single_layer() {
        // W = I, b = 0, no activation on the (only) last layer.
        let layer = RealDenseLayer {
            in_dim: 3,
            out_dim: 3,
            w: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            b: vec![0.0; 3],
            has_activation: false,
        };
        let net = RealNetwork::from_layers(vec![layer]).unwrap();
        let (y, _) = net.forward(&[1.5, -2.0, 0.25]).unwrap();
        assert_eq!(y, vec![1.5, -2.0, 0.25]);
    }

    #[test]
    fn test_relu_applies_on_hidden_layers_only() {
        // Two chained 1x1 identity layers: hidden ReLU clamps the negative.
        let id = |act| RealDenseLayer {
            in_dim: 1,
            out_dim: 1,
            w: vec![1.0],
            b: vec![0.0],
            has_activation: act,
        };
        let net = RealNetwork::from_layers(vec![id(true), id(false)]).unwrap();
        assert_eq!(net.forward(&[-3.0]).unwrap().0, vec![0.0]);
        assert_eq!(net.forward(&[2.0]).unwrap().0, vec![2.0]);
    }

    #[test]
    fn test_forward_rejects_wrong_input_length() {
        let net = RealNetwork::init(&[4, 3], &mut stream(2)).unwrap();
        assert!(net.forward(&[0.0; 5]).is_err());
    }

    #[test]
    fn test_backward_matches_finite_differences() {
        // Squared-error loss on a small random net; central differences.
        let mut net = RealNetwork::init(&[5, 7, 4, 3], &mut stream(3)).unwrap();
        let mut rng = stream(4);
        let x: Vec<f64> = (0..5).map(|_| rng.random::<f64>() - 0.5).collect();
        let target: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();

        let loss_of = |net: &RealNetwork| {
            let (y, _) = net.forward(&x).unwrap();
            y.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };

        let (y, tape) = net.forward(&x).unwrap();
        let out_err: Vec<f64> = y.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect();
        let grads = net.backward(&tape, &out_err).unwrap();
        let mut flat = vec![0.0; net.param_count()];
        net.flatten_grads(&grads, &mut flat);

        let n = net.param_count();
        let mut params = vec![0.0; n];
        net.read_params(&mut params);
        let step = 1e-6;
        for j in 0..n {
            let orig = params[j];
            params[j] = orig + step;
            net.write_params(&params);
            let up = loss_of(&net);
            params[j] = orig - step;
            net.write_params(&params);
            let down = loss_of(&net);
            params[j] = orig;
            net.write_params(&params);
            let numeric = (up - down) / (2.0 * step);
            let denom = flat[j].abs().max(numeric.abs()).max(1e-2);
            assert!(
                ((flat[j] - numeric) / denom).abs() < 1e-6,
                "param {j}: analytic {} vs numeric {numeric}",
                flat[j]
            );
        }
    }

    #[test]
    fn test_param_roundtrip() {
        let mut net = RealNetwork::init(&[3, 5, 2], &mut stream(5)).unwrap();
        let mut params = vec![0.0; net.param_count()];
        net.read_params(&mut params);
        let bumped: Vec<f64> = params.iter().map(|p| p + 1.0).collect();
        net.write_params(&bumped);
        let mut back = vec![0.0; net.param_count()];
        net.read_params(&mut back);
        assert_eq!(back, bumped);
    }

    #[test]
    fn test_save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fnn.bin");
        let net = RealNetwork::init(&[4, 6, 4], &mut stream(6)).unwrap();
        net.save(&path).unwrap();
        let loaded = RealNetwork::load(&path).unwrap();
        assert_eq!(net, loaded);
    }

    #[test]
    fn test_load_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOTMAGIC\x01\x00\x00\x00").unwrap();
        assert!(matches!(RealNetwork::load(&path), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn test_load_rejects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cut.bin");
        let net = RealNetwork::init(&[4, 6, 4], &mut stream(7)).unwrap();
        net.save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(RealNetwork::load(&path), Err(Error::Truncated(_))));
    }
}
