//! Restoration quality measures, all computed on log-intensities.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::image::{IntensityImage, Rect};
use crate::speckle::{estimate_enl, LooksCount, DEFAULT_EPS};
use crate::stack::enl_over;

fn require_positive(image: &IntensityImage, what: &str) -> Result<()> {
    match image.data().iter().find(|&&v| !(v > 0.0)) {
        Some(bad) => Err(Error::Domain(format!("{what} must be > 0, found {bad}"))),
        None => Ok(()),
    }
}

/// Mean of `(log max(estimate, eps) - log truth)^2`.
pub fn mse_log(estimate: &IntensityImage, truth: &IntensityImage) -> Result<f64> {
    estimate.ensure_same_dims(truth)?;
    require_positive(truth, "truth")?;
    let sum: f64 = estimate
        .data()
        .iter()
        .zip(truth.data())
        .map(|(e, t)| {
            let d = e.max(DEFAULT_EPS).ln() - t.ln();
            d * d
        })
        .sum();
    Ok(sum / truth.len() as f64)
}

/// Peak for [`psnr_log`]: `max(log truth) - min(log truth)`.
pub fn log_dynamic_range(truth: &IntensityImage) -> Result<f64> {
    require_positive(truth, "truth")?;
    let (lo, hi) = truth
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(hi.ln() - lo.ln())
}

/// `10 log10(peak^2 / mse)`; `f64::INFINITY` when `mse == 0`.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn psnr_log(estimate: &IntensityImage, truth: &IntensityImage, peak: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse_log(estimate, truth)?, peak))
}

/// Mean and ENL of the residual `w / estimate`. For a good restoration the
/// residual is pure speckle: mean 1 and ENL close to the looks of `w`.
pub fn residual_ratio_stats(
    w: &IntensityImage,
    estimate: &IntensityImage,
) -> Result<(f64, LooksCount)> {
    w.ensure_same_dims(estimate)?;
    require_positive(estimate, "estimate")?;
    let ratio = w.data().iter().zip(estimate.data()).map(|(a, b)| a / b).collect();
    let ratio = IntensityImage::new(w.width(), w.height(), ratio)?;
    Ok((ratio.mean(), estimate_enl(&ratio)?))
}

/// Horizontal lag-1 autocorrelation coefficient.
pub fn lag1_autocorrelation(image: &IntensityImage) -> f64 {
    let mean = image.mean();
    let var: f64 = image.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / image.len() as f64;
    let (w, h) = image.dims();
    let mut cov = 0.0;
    let mut n = 0usize;
    for y in 0..h {
        for x in 0..w.saturating_sub(1) {
            cov += (image.get(x, y) - mean) * (image.get(x + 1, y) - mean);
            n += 1;
        }
    }
    if n == 0 || var == 0.0 {
        return 0.0;
    }
    cov / n as f64 / var
}

/// Summary of one restoration, written as `key=value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mse_log: f64,
    pub psnr_log: f64,
    /// ENL of the estimate over the evaluation region.
    pub enl_region: LooksCount,
    /// Residual statistics, present when the speckled input is known.
    pub ratio_mean: Option<f64>,
    pub ratio_enl: Option<LooksCount>,
}

impl EvalReport {
    pub fn evaluate(
        estimate: &IntensityImage,
        truth: &IntensityImage,
        noisy: Option<&IntensityImage>,
        region: Option<Rect>,
    ) -> Result<Self> {
        let mse = mse_log(estimate, truth)?;
        let psnr = psnr_from_mse(mse, log_dynamic_range(truth)?);
        let enl_region = enl_over(estimate, region)?;
        let (ratio_mean, ratio_enl) = match noisy {
            Some(w) => {
                let (m, l) = residual_ratio_stats(w, estimate)?;
                (Some(m), Some(l))
            }
            None => (None, None),
        };
        Ok(Self {
            mse_log: mse,
            psnr_log: psnr,
            enl_region,
            ratio_mean,
            ratio_enl,
        })
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mse_log={}", self.mse_log);
        let _ = writeln!(out, "psnr_log={}", self.psnr_log);
        let _ = writeln!(out, "enl_region={}", self.enl_region.get());
        if let Some(m) = self.ratio_mean {
            let _ = writeln!(out, "ratio_mean={m}");
        }
        if let Some(l) = self.ratio_enl {
            let _ = writeln!(out, "ratio_enl={}", l.get());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("report line {line:?} is not key=value")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("report value {v:?} is not a number")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("report lacks {k}")))
        };
        Ok(Self {
            mse_log: get("mse_log")?,
            psnr_log: get("psnr_log")?,
            enl_region: LooksCount::new(get("enl_region")?)?,
            ratio_mean: fields.get("ratio_mean").copied(),
            ratio_enl: fields.get("ratio_enl").map(|&l| LooksCount::new(l)).transpose()?,
        })
    }
}
