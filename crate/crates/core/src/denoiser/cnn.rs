//! Small residual convolutional denoiser.
//!
//! The network works on rescaled log-intensities (see [`AffineRange`]) and
//! predicts the noise component: `output = input - net(input)`. Layers are
//! `kernel x kernel` convolutions with replication padding, separated by
//! `tanh`. The first layer maps 1 channel to `channels`, the last maps
//! `channels` back to 1.
//!
//! Parameters are laid out layer after layer, each layer holding its
//! weights indexed `[out][in][ky][kx]` followed by its `out` biases. The same
//! order is used by the model file format.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::LogImage;
use crate::rng::RngSeed;
use crate::speckle::LooksCount;

use super::{rescale, unrescale, AffineRange, Denoiser};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Architecture {
    pub layers: usize,
    pub channels: usize,
    pub kernel_size: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            layers: 5,
            channels: 32,
            kernel_size: 3,
        }
    }
}

impl Architecture {
    pub fn new(layers: usize, channels: usize, kernel_size: usize) -> Result<Self> {
        let arch = Self {
            layers,
            channels,
            kernel_size,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.channels == 0 {
            return Err(Error::Config(format!("invalid architecture {self:?}")));
        }
        if self.kernel_size % 2 == 0 {
            return Err(Error::Config(format!(
                "kernel size must be odd, got {}",
                self.kernel_size
            )));
        }
        Ok(())
    }

    /// `(in_channels, out_channels)` of layer `l`.
    pub fn layer_shape(&self, l: usize) -> (usize, usize) {
        let cin = if l == 0 { 1 } else { self.channels };
        let cout = if l + 1 == self.layers { 1 } else { self.channels };
        (cin, cout)
    }

    fn layer_len(&self, l: usize) -> usize {
        let (cin, cout) = self.layer_shape(l);
        cout * cin * self.kernel_size * self.kernel_size + cout
    }

    pub fn param_count(&self) -> usize {
        (0..self.layers).map(|l| self.layer_len(l)).sum()
    }

    /// Side of the square input region that influences one output pixel.
    pub fn receptive_field(&self) -> usize {
        self.layers * (self.kernel_size - 1) + 1
    }

    /// Offset of layer `l` in the flat parameter vector.
    fn offset(&self, l: usize) -> usize {
        (0..l).map(|i| self.layer_len(i)).sum()
    }
}

fn pad_replicate(src: &[f64], channels: usize, h: usize, w: usize, p: usize) -> Vec<f64> {
    let (ph, pw) = (h + 2 * p, w + 2 * p);
    let mut out = vec![0.0; channels * ph * pw];
    for c in 0..channels {
        let plane = &src[c * h * w..(c + 1) * h * w];
        let dst = &mut out[c * ph * pw..(c + 1) * ph * pw];
        for py in 0..ph {
            let y = py.saturating_sub(p).min(h - 1);
            let row = &plane[y * w..(y + 1) * w];
            let drow = &mut dst[py * pw..(py + 1) * pw];
            drow[..p].fill(row[0]);
            drow[p..p + w].copy_from_slice(row);
            drow[p + w..].fill(row[w - 1]);
        }
    }
    out
}

/// Adds the gradient of a padded plane back onto the pixels it replicates.
fn fold_padding(dpad: &[f64], h: usize, w: usize, p: usize, dst: &mut [f64]) {
    let pw = w + 2 * p;
    for py in 0..h + 2 * p {
        let y = py.saturating_sub(p).min(h - 1);
        for px in 0..pw {
            let x = px.saturating_sub(p).min(w - 1);
            dst[y * w + x] += dpad[py * pw + px];
        }
    }
}

struct LayerView<'a> {
    cin: usize,
    cout: usize,
    k: usize,
    weights: &'a [f64],
    bias: &'a [f64],
}

impl LayerView<'_> {
    fn weight(&self, o: usize, i: usize, ky: usize, kx: usize) -> f64 {
        self.weights[((o * self.cin + i) * self.k + ky) * self.k + kx]
    }

    fn forward(&self, padded: &[f64], h: usize, w: usize) -> Vec<f64> {
        let p = self.k / 2;
        let (ph, pw) = (h + 2 * p, w + 2 * p);
        let planes: Vec<Vec<f64>> = (0..self.cout)
            .into_par_iter()
            .map(|o| {
                let mut out = vec![self.bias[o]; h * w];
                for i in 0..self.cin {
                    let src = &padded[i * ph * pw..(i + 1) * ph * pw];
                    for ky in 0..self.k {
                        for kx in 0..self.k {
                            let wt = self.weight(o, i, ky, kx);
                            for y in 0..h {
                                let s = &src[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                                let d = &mut out[y * w..(y + 1) * w];
                                d.iter_mut().zip(s).for_each(|(d, s)| *d += wt * s);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        planes.concat()
    }

    /// Returns `(d weights, d bias, d input)`; the input gradient is only
    /// computed when requested.
    fn backward(
        &self,
        padded: &[f64],
        d_out: &[f64],
        h: usize,
        w: usize,
        want_input: bool,
    ) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
        let (k, p) = (self.k, self.k / 2);
        let (ph, pw) = (h + 2 * p, w + 2 * p);
        let per_out: Vec<(Vec<f64>, f64)> = (0..self.cout)
            .into_par_iter()
            .map(|o| {
                let g = &d_out[o * h * w..(o + 1) * h * w];
                let mut dw = vec![0.0; self.cin * k * k];
                for i in 0..self.cin {
                    let src = &padded[i * ph * pw..(i + 1) * ph * pw];
                    for ky in 0..k {
                        for kx in 0..k {
                            let mut acc = 0.0;
                            for y in 0..h {
                                let s = &src[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                                acc += s.iter().zip(&g[y * w..(y + 1) * w]).map(|(a, b)| a * b).sum::<f64>();
                            }
                            dw[(i * k + ky) * k + kx] = acc;
                        }
                    }
                }
                (dw, g.iter().sum())
            })
            .collect();
        let mut d_weights = Vec::with_capacity(self.weights.len());
        let mut d_bias = Vec::with_capacity(self.cout);
        for (dw, db) in per_out {
            d_weights.extend(dw);
            d_bias.push(db);
        }
        let d_input = want_input.then(|| {
            let planes: Vec<Vec<f64>> = (0..self.cin)
                .into_par_iter()
                .map(|i| {
                    let mut dpad = vec![0.0; ph * pw];
                    for o in 0..self.cout {
                        let g = &d_out[o * h * w..(o + 1) * h * w];
                        for ky in 0..k {
                            for kx in 0..k {
                                let wt = self.weight(o, i, ky, kx);
                                for y in 0..h {
                                    let d = &mut dpad[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                                    d.iter_mut()
                                        .zip(&g[y * w..(y + 1) * w])
                                        .for_each(|(d, g)| *d += wt * g);
                                }
                            }
                        }
                    }
                    let mut plane = vec![0.0; h * w];
                    fold_padding(&dpad, h, w, p, &mut plane);
                    plane
                })
                .collect();
            planes.concat()
        });
        (d_weights, d_bias, d_input)
    }
}

/// Intermediate values of a forward pass, needed for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    width: usize,
    height: usize,
    /// Padded input of every layer.
    padded: Vec<Vec<f64>>,
    /// `tanh` outputs of every hidden layer.
    activations: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

/// Network with `f64` parameters, used for training and inference.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvNet {
    arch: Architecture,
    params: Vec<f64>,
}

impl ConvNet {
    pub fn zeros(arch: Architecture) -> Result<Self> {
        arch.validate()?;
        Ok(Self {
            arch,
            params: vec![0.0; arch.param_count()],
        })
    }

    pub fn from_params(arch: Architecture, params: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        if params.len() != arch.param_count() {
            return Err(Error::Config(format!(
                "{} parameters given, architecture needs {}",
                params.len(),
                arch.param_count()
            )));
        }
        Ok(Self { arch, params })
    }

    /// Glorot-uniform weights, zero biases; the last layer is scaled down
    /// by 10 so that an untrained network stays close to the identity.
    pub fn init(arch: Architecture, seed: RngSeed) -> Result<Self> {
        let mut net = Self::zeros(arch)?;
        let mut rng = seed.rng();
        let k2 = arch.kernel_size * arch.kernel_size;
        for l in 0..arch.layers {
            let (cin, cout) = arch.layer_shape(l);
            let mut bound = (6.0 / ((cin + cout) * k2) as f64).sqrt();
            if l + 1 == arch.layers {
                bound *= 0.1;
            }
            let start = arch.offset(l);
            for p in &mut net.params[start..start + cout * cin * k2] {
                *p = rng.gen_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer(&self, l: usize) -> LayerView<'_> {
        let (cin, cout) = self.arch.layer_shape(l);
        let k = self.arch.kernel_size;
        let start = self.arch.offset(l);
        let nw = cout * cin * k * k;
        LayerView {
            cin,
            cout,
            k,
            weights: &self.params[start..start + nw],
            bias: &self.params[start + nw..start + nw + cout],
        }
    }

    /// Residual output for a single-channel `w x h` input.
    pub fn forward(&self, input: &[f64], w: usize, h: usize) -> Vec<f64> {
        self.forward_cached(input, w, h).output
    }

    pub fn forward_cached(&self, input: &[f64], w: usize, h: usize) -> ForwardCache {
        assert_eq!(input.len(), w * h, "input does not match {w}x{h}");
        let p = self.arch.kernel_size / 2;
        let mut padded = Vec::with_capacity(self.arch.layers);
        let mut activations = Vec::with_capacity(self.arch.layers.saturating_sub(1));
        let mut current = input.to_vec();
        for l in 0..self.arch.layers {
            let layer = self.layer(l);
            let pad = pad_replicate(&current, layer.cin, h, w, p);
            let mut z = layer.forward(&pad, h, w);
            padded.push(pad);
            if l + 1 < self.arch.layers {
                z.iter_mut().for_each(|v| *v = v.tanh());
                activations.push(z.clone());
            }
            current = z;
        }
        let output = input.iter().zip(&current).map(|(x, n)| x - n).collect();
        ForwardCache {
            width: w,
            height: h,
            padded,
            activations,
            output,
        }
    }

    /// Parameter gradient of a scalar loss given `d loss / d output`.
    pub fn backward(&self, cache: &ForwardCache, d_output: &[f64]) -> Vec<f64> {
        let (w, h) = (cache.width, cache.height);
        let mut grad = vec![0.0; self.params.len()];
        // output = input - z_last
        let mut dz: Vec<f64> = d_output.iter().map(|g| -g).collect();
        for l in (0..self.arch.layers).rev() {
            let layer = self.layer(l);
            let (dw, db, d_in) = layer.backward(&cache.padded[l], &dz, h, w, l > 0);
            let start = self.arch.offset(l);
            grad[start..start + dw.len()].copy_from_slice(&dw);
            grad[start + dw.len()..start + dw.len() + db.len()].copy_from_slice(&db);
            if let Some(mut da) = d_in {
                let act = &cache.activations[l - 1];
                da.iter_mut().zip(act).for_each(|(g, a)| *g *= 1.0 - a * a);
                dz = da;
            }
        }
        grad
    }
}

/// Trained denoiser as stored on disk: architecture, `f32` parameters, the
/// log-range used for rescaling and the looks count of the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiserModel {
    architecture: Architecture,
    params: Vec<f32>,
    range: AffineRange,
    trained_looks: LooksCount,
}

impl DenoiserModel {
    pub fn new(
        architecture: Architecture,
        params: Vec<f32>,
        range: AffineRange,
        trained_looks: LooksCount,
    ) -> Result<Self> {
        architecture.validate()?;
        if params.len() != architecture.param_count() {
            return Err(Error::Config(format!(
                "{} parameters given, architecture needs {}",
                params.len(),
                architecture.param_count()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        AffineRange::new(range.min, range.max)?;
        Ok(Self {
            architecture,
            params,
            range,
            trained_looks,
        })
    }

    pub fn from_net(net: &ConvNet, range: AffineRange, trained_looks: LooksCount) -> Result<Self> {
        Self::new(
            net.arch,
            net.params.iter().map(|&p| p as f32).collect(),
            range,
            trained_looks,
        )
    }

    pub fn to_net(&self) -> ConvNet {
        ConvNet {
            arch: self.architecture,
            params: self.params.iter().map(|&p| p as f64).collect(),
        }
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn params(&self) -> &[f32] {
        &self.params
    }

    pub fn range(&self) -> AffineRange {
        self.range
    }

    pub fn trained_looks(&self) -> LooksCount {
        self.trained_looks
    }
}

/// Runs the model on a log image: rescale, residual network, unrescale.
pub fn cnn_forward(model: &DenoiserModel, y: &LogImage) -> Result<LogImage> {
    let rf = model.architecture.receptive_field();
    if y.width() < rf || y.height() < rf {
        return Err(Error::Dimension(format!(
            "{}x{} image is smaller than the {rf}x{rf} receptive field",
            y.width(),
            y.height()
        )));
    }
    let scaled = rescale(y, &model.range)?;
    let out = model.to_net().forward(scaled.data(), y.width(), y.height());
    unrescale(&LogImage::new(y.width(), y.height(), out)?, &model.range)
}

impl Denoiser for DenoiserModel {
    fn denoise(&self, y: &LogImage, _looks: LooksCount) -> Result<LogImage> {
        cnn_forward(self, y)
    }
}
