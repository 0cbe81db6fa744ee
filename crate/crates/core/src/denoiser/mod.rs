//! Log-domain denoisers.
//!
//! Every denoiser maps a log-intensity image to an estimate of the
//! log-reflectivity. Implementations must be usable concurrently for
//! inference, hence the `Send + Sync` bound.

mod baseline;
mod cnn;
mod loss;
mod range;
mod train;

pub use baseline::{baseline_denoise, BoxDenoiser};
pub use cnn::{cnn_forward, Architecture, ConvNet, DenoiserModel, ForwardCache};
pub use loss::{loss_gradient, loss_likelihood};
pub use range::{rescale, unrescale, AffineRange};
pub use train::{train_self_supervised, train_with_history, TrainConfig, TrainHistory};

use crate::error::Result;
use crate::image::{IntensityImage, LogImage};
use crate::speckle::LooksCount;

pub trait Denoiser: Send + Sync {
    /// Estimates the log-reflectivity from a log-intensity image with
    /// `looks` looks.
    fn denoise(&self, y: &LogImage, looks: LooksCount) -> Result<LogImage>;
}

/// Returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityDenoiser;

impl Denoiser for IdentityDenoiser {
    fn denoise(&self, y: &LogImage, _looks: LooksCount) -> Result<LogImage> {
        Ok(y.clone())
    }
}

impl<D: Denoiser + ?Sized> Denoiser for &D {
    fn denoise(&self, y: &LogImage, looks: LooksCount) -> Result<LogImage> {
        (**self).denoise(y, looks)
    }
}

impl<D: Denoiser + ?Sized> Denoiser for Box<D> {
    fn denoise(&self, y: &LogImage, looks: LooksCount) -> Result<LogImage> {
        (**self).denoise(y, looks)
    }
}

/// 2x2 block average in linear intensity.
///
/// A trailing odd row or column is dropped. Images narrower or shorter than
/// 2 pixels cannot be reduced and yield a dimension error.
pub fn downsample2(w: &IntensityImage) -> Result<IntensityImage> {
    let (width, height) = (w.width() / 2, w.height() / 2);
    if width == 0 || height == 0 {
        return Err(crate::Error::Dimension(format!(
            "{}x{} image is too small to downsample",
            w.width(),
            w.height()
        )));
    }
    IntensityImage::from_fn(width, height, |x, y| {
        let (sx, sy) = (2 * x, 2 * y);
        (w.get(sx, sy) + w.get(sx + 1, sy) + w.get(sx, sy + 1) + w.get(sx + 1, sy + 1)) / 4.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downsample_constant_and_blocks() {
        let c = IntensityImage::constant(6, 4, 2.5).unwrap();
        let d = downsample2(&c).unwrap();
        assert_eq!(d.dims(), (3, 2));
        assert!(d.data().iter().all(|&v| v == 2.5));

        let img = IntensityImage::from_fn(4, 4, |x, y| (4 * y + x) as f64).unwrap();
        let d = downsample2(&img).unwrap();
        assert_eq!(d.data(), &[2.5, 4.5, 10.5, 12.5]);
    }

    #[test]
    fn downsample_drops_odd_edges() {
        let img = IntensityImage::from_fn(5, 3, |x, y| (x + y) as f64).unwrap();
        assert_eq!(downsample2(&img).unwrap().dims(), (2, 1));
        assert!(downsample2(&IntensityImage::constant(1, 4, 1.0).unwrap()).is_err());
    }
}
