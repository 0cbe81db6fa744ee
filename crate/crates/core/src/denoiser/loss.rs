//! Negative log-likelihood of log-speckle, `f - x + exp(x - f)` per pixel.

use crate::error::Result;
use crate::image::LogImage;
use crate::speckle::ensure_same_dims;

/// Mean over pixels of `f - x + exp(x - f)`. Always `>= 1`, with equality
/// iff `f == x` everywhere.
pub fn loss_likelihood(f: &LogImage, x: &LogImage) -> Result<f64> {
    ensure_same_dims(f, x)?;
    let sum: f64 = f
        .data()
        .iter()
        .zip(x.data())
        .map(|(f, x)| (f - x) + (x - f).exp())
        .sum();
    Ok(sum / f.len() as f64)
}

/// Gradient of [`loss_likelihood`] with respect to `f`:
/// `(1 - exp(x - f)) / N`.
pub fn loss_gradient(f: &LogImage, x: &LogImage) -> Result<LogImage> {
    ensure_same_dims(f, x)?;
    let n = f.len() as f64;
    let data = f
        .data()
        .iter()
        .zip(x.data())
        .map(|(f, x)| (1.0 - (x - f).exp()) / n)
        .collect();
    Ok(LogImage::from_raw(f.width(), f.height(), data))
}

/// Per-pixel loss and `d loss / d f` for raw buffers, summed and scaled by
/// `weight`. Used by training.
pub(crate) fn accumulate(f: &[f64], x: &[f64], weight: f64, grad: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for ((f, x), g) in f.iter().zip(x).zip(grad.iter_mut()) {
        let e = (x - f).exp();
        total += (f - x) + e;
        *g = (1.0 - e) * weight;
    }
    total
}
