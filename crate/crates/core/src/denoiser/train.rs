//! Self-supervised training on a co-registered stack.
//!
//! Each sample is an ordered pair of distinct dates `(i, j)` and a patch
//! location: the network sees the log-intensity patch of date `i` and is
//! scored with the log-speckle likelihood against the same patch at date
//! `j`. Averaged over pairs this is an unbiased estimate of the double sum
//! over `i != j`. Temporal changes are not compensated, so the stack must be
//! change free.
//!
//! The bottom `validation_fraction` of the rows is held out and scored with
//! every ordered pair after each epoch.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::LogImage;
use crate::rng::RngSeed;
use crate::speckle::{to_log, DEFAULT_EPS};
use crate::stack::Stack;

use super::loss::accumulate;
use super::{AffineRange, Architecture, ConvNet, DenoiserModel};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Side of the square training patches.
    pub patch_size: usize,
    pub learning_rate: f64,
    /// Heavy-ball momentum, `0` for plain SGD.
    pub momentum: f64,
    /// Rescales a batch gradient whose L2 norm exceeds this value.
    pub clip_norm: Option<f64>,
    pub seed: RngSeed,
    /// Fraction of image rows (taken from the bottom) held out, in `[0, 1)`.
    pub validation_fraction: f64,
    pub architecture: Architecture,
    /// Patches per epoch; by default one pass of non-overlapping patches
    /// over the training rows for every ordered date pair.
    pub samples_per_epoch: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 4,
            patch_size: 32,
            learning_rate: 1e-3,
            momentum: 0.9,
            clip_norm: Some(1.0),
            seed: RngSeed(0),
            validation_fraction: 0.25,
            architecture: Architecture::default(),
            samples_per_epoch: None,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let positive = self.epochs > 0 && self.batch_size > 0 && self.patch_size > 0;
        if !positive {
            return Err(Error::Config(
                "epochs, batch size and patch size must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!("momentum {} not in [0, 1)", self.momentum)));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation fraction {} not in [0, 1)",
                self.validation_fraction
            )));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(Error::Config(format!("clip norm must be > 0, got {c}")));
            }
        }
        self.architecture.validate()
    }
}

/// Loss curves. Index 0 holds the value before the first update, index `e`
/// the value after epoch `e`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    /// All-pairs loss over the training rows.
    pub train_loss: Vec<f64>,
    /// All-pairs loss over the held-out rows (empty without validation).
    pub validation_loss: Vec<f64>,
}

struct Band {
    y0: usize,
    rows: usize,
}

struct Sample {
    input: usize,
    target: usize,
    x0: usize,
    y0: usize,
}

fn extract(img: &LogImage, x0: usize, y0: usize, w: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        out.extend_from_slice(&img.data()[y * img.width() + x0..y * img.width() + x0 + w]);
    }
    out
}

/// Mean likelihood loss over every ordered pair of distinct dates on a band
/// of full-width rows.
fn band_loss(net: &ConvNet, logs: &[LogImage], range: &AffineRange, band: &Band) -> f64 {
    let width = logs[0].width();
    let span = range.span();
    let targets: Vec<Vec<f64>> = logs
        .iter()
        .map(|y| extract(y, 0, band.y0, width, band.rows))
        .collect();
    let outputs: Vec<Vec<f64>> = targets
        .par_iter()
        .map(|t| {
            let scaled: Vec<f64> = t.iter().map(|v| (v - range.min) / span).collect();
            net.forward(&scaled, width, band.rows)
                .into_iter()
                .map(|v| v * span + range.min)
                .collect()
        })
        .collect();
    let n = width * band.rows;
    let mut scratch = vec![0.0; n];
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (i, f) in outputs.iter().enumerate() {
        for (j, x) in targets.iter().enumerate() {
            if i != j {
                total += accumulate(f, x, 0.0, &mut scratch) / n as f64;
                pairs += 1;
            }
        }
    }
    total / pairs as f64
}

/// Trains a denoiser on `stack`; see [`train_with_history`].
pub fn train_self_supervised(stack: &Stack, config: &TrainConfig) -> Result<DenoiserModel> {
    train_with_history(stack, config).map(|(model, _)| model)
}

/// Trains a denoiser by minibatch SGD and returns it with its loss curves.
///
/// The rescaling range is the extent of the log-intensities of the whole
/// stack. Training is deterministic given the configuration: per-sample
/// gradients are computed in parallel but summed in sample order.
pub fn train_with_history(
    stack: &Stack,
    config: &TrainConfig,
) -> Result<(DenoiserModel, TrainHistory)> {
    config.validate()?;
    if stack.len() < 2 {
        return Err(Error::Config("self-supervised training needs >= 2 dates".into()));
    }
    let (width, height) = stack.dims();
    let val_rows = if config.validation_fraction > 0.0 {
        ((height as f64 * config.validation_fraction).round() as usize).max(1)
    } else {
        0
    };
    let train_rows = height - val_rows.min(height);
    let patch = config.patch_size;
    if patch > width || patch > train_rows {
        return Err(Error::Config(format!(
            "patch size {patch} exceeds the {width}x{train_rows} training area"
        )));
    }

    let logs: Vec<LogImage> = stack
        .images()
        .iter()
        .map(|img| to_log(img, DEFAULT_EPS))
        .collect::<Result<_>>()?;
    let range = AffineRange::spanning(&logs)?;
    let span = range.span();
    let scaled: Vec<LogImage> = logs.iter().map(|y| y.map(|v| (v - range.min) / span)).collect();

    let mut net = ConvNet::init(config.architecture, config.seed.derive(0))?;
    let mut rng = config.seed.derive(1).rng();
    let mut velocity = vec![0.0; net.params().len()];

    let dates = stack.len();
    let train_band = Band {
        y0: 0,
        rows: train_rows,
    };
    let val_band = (val_rows > 0).then_some(Band {
        y0: train_rows,
        rows: val_rows,
    });
    let samples_per_epoch = config.samples_per_epoch.unwrap_or_else(|| {
        let tiles = ((width / patch) * (train_rows / patch)).max(1);
        dates * (dates - 1) * tiles
    });
    let steps = samples_per_epoch.div_ceil(config.batch_size).max(1);
    let weight = span / (config.batch_size * patch * patch) as f64;

    let mut history = TrainHistory::default();
    let record = |net: &ConvNet, history: &mut TrainHistory| {
        history.train_loss.push(band_loss(net, &logs, &range, &train_band));
        if let Some(b) = &val_band {
            history.validation_loss.push(band_loss(net, &logs, &range, b));
        }
    };
    record(&net, &mut history);

    for _ in 0..config.epochs {
        for _ in 0..steps {
            let batch: Vec<Sample> = (0..config.batch_size)
                .map(|_| {
                    let input = rng.gen_range(0..dates);
                    let mut target = rng.gen_range(0..dates - 1);
                    if target >= input {
                        target += 1;
                    }
                    Sample {
                        input,
                        target,
                        x0: rng.gen_range(0..=width - patch),
                        y0: rng.gen_range(0..=train_rows - patch),
                    }
                })
                .collect();
            let grads: Vec<Vec<f64>> = batch
                .par_iter()
                .map(|s| {
                    let x = extract(&scaled[s.input], s.x0, s.y0, patch, patch);
                    let target = extract(&logs[s.target], s.x0, s.y0, patch, patch);
                    let cache = net.forward_cached(&x, patch, patch);
                    let f: Vec<f64> = cache.output().iter().map(|v| v * span + range.min).collect();
                    let mut d_out = vec![0.0; f.len()];
                    accumulate(&f, &target, weight, &mut d_out);
                    net.backward(&cache, &d_out)
                })
                .collect();
            let mut grad = vec![0.0; net.params().len()];
            for g in &grads {
                grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
            }
            if let Some(limit) = config.clip_norm {
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > limit {
                    let s = limit / norm;
                    grad.iter_mut().for_each(|g| *g *= s);
                }
            }
            for ((p, v), g) in net.params_mut().iter_mut().zip(&mut velocity).zip(&grad) {
                *v = config.momentum * *v + g;
                *p -= config.learning_rate * *v;
            }
        }
        record(&net, &mut history);
    }

    if net.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("training diverged to non-finite parameters".into()));
    }
    let model = DenoiserModel::from_net(&net, range, stack.looks())?;
    Ok((model, history))
}
