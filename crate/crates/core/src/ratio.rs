//! Ratio-based multi-temporal despeckling.
//!
//! An image `w` of the stack is divided by the normalized super-image
//! `s' = s / lambda`, where `lambda` is the geometric mean of `s`. The ratio
//! `tau' = w / s'` contains only speckle and temporal changes, and its mean
//! log-intensity equals that of `w`, so a denoiser trained on ordinary
//! intensities sees inputs in its usual range. The denoised ratio is
//! multiplied back by `s'`.

use crate::denoiser::Denoiser;
use crate::error::{Error, Result};
use crate::image::IntensityImage;
use crate::speckle::{from_log, to_log, LooksCount, DEFAULT_EPS};
use crate::stack::SuperImage;

/// Super-image divided by its geometric mean.
///
/// Samples are stored rounded to `f32`, the precision of on-disk rasters.
/// The rounding makes `s'` (and everything computed from it) invariant to a
/// rescaling of `s`, since `lambda` absorbs the scale only up to a few `f64`
/// ulps.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSuperImage {
    data: IntensityImage,
    lambda: f64,
}

impl NormalizedSuperImage {
    pub fn data(&self) -> &IntensityImage {
        &self.data
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Modified ratio `tau' = w / s'`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioImage {
    data: IntensityImage,
}

impl RatioImage {
    pub fn new(data: IntensityImage) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &IntensityImage {
        &self.data
    }

    pub fn into_image(self) -> IntensityImage {
        self.data
    }
}

/// Geometric mean of a strictly positive image, `exp(mean(log s))`.
pub fn geometric_mean(image: &IntensityImage) -> Result<f64> {
    if let Some(bad) = image.data().iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::Domain(format!(
            "normalization needs strictly positive pixels, found {bad}"
        )));
    }
    let mean_log = image.data().iter().map(|v| v.ln()).sum::<f64>() / image.len() as f64;
    Ok(mean_log.exp())
}

/// `lambda = exp(mean(log s))`, the factor that zeroes the mean
/// log-intensity of the super-image.
pub fn normalization_factor(s: &SuperImage) -> Result<f64> {
    geometric_mean(s.data())
}

pub fn normalize_super(s: &SuperImage) -> Result<NormalizedSuperImage> {
    let lambda = normalization_factor(s)?;
    let data = s.data().map(|v| (v / lambda) as f32 as f64);
    Ok(NormalizedSuperImage { data, lambda })
}

pub fn form_ratio(w: &IntensityImage, s_norm: &NormalizedSuperImage) -> Result<RatioImage> {
    w.ensure_same_dims(&s_norm.data)?;
    let data = w
        .data()
        .iter()
        .zip(s_norm.data.data())
        .map(|(w, s)| w / s)
        .collect();
    Ok(RatioImage {
        data: IntensityImage::from_raw(w.width(), w.height(), data),
    })
}

/// `w_hat = tau_hat' * s'`.
pub fn recombine(tau_hat: &RatioImage, s_norm: &NormalizedSuperImage) -> Result<IntensityImage> {
    tau_hat.data.ensure_same_dims(&s_norm.data)?;
    let data = tau_hat
        .data
        .data()
        .iter()
        .zip(s_norm.data.data())
        .map(|(t, s)| t * s)
        .collect();
    Ok(IntensityImage::from_raw(tau_hat.data.width(), tau_hat.data.height(), data))
}

/// Despeckles `w` through its ratio to the super-image `s`.
///
/// The denoiser receives `log tau'` with the looks count of `w`; the
/// super-image is treated as speckle free.
pub fn despeckle_ratio(
    w: &IntensityImage,
    s: &SuperImage,
    denoiser: &dyn Denoiser,
    looks: LooksCount,
) -> Result<IntensityImage> {
    w.ensure_same_dims(s.data())?;
    let s_norm = normalize_super(s)?;
    let ratio = form_ratio(w, &s_norm)?;
    let denoised = denoiser.denoise(&to_log(ratio.data(), DEFAULT_EPS)?, looks)?;
    recombine(&RatioImage::new(from_log(&denoised)), &s_norm)
}

/// Single-image restoration: `exp(d(log w))`.
pub fn despeckle_single(
    w: &IntensityImage,
    denoiser: &dyn Denoiser,
    looks: LooksCount,
) -> Result<IntensityImage> {
    Ok(from_log(&denoiser.denoise(&to_log(w, DEFAULT_EPS)?, looks)?))
}
