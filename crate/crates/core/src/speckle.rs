//! Fully developed speckle: sampling, densities and look estimation.
//!
//! A measured intensity is `w = v * u` where the speckle `u` is gamma
//! distributed with unit mean and variance `1/L`. Its logarithm follows a
//! Fisher-Tippett law, which is what log-domain denoisers see.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::image::{same_dims, IntensityImage, LogImage};
use crate::rng::RngSeed;

/// Floor applied to intensities before taking logarithms.
pub const DEFAULT_EPS: f64 = 1e-10;

/// ENL reported for regions without any intensity fluctuation.
pub const INFINITE_ENL: f64 = 1e9;

/// Integer look counts up to this value are sampled as a sum of complex
/// Gaussian intensities; larger or fractional ones use a gamma sampler.
const MAX_SUMMED_LOOKS: f64 = 64.0;

/// Number of looks `L >= 1`, possibly fractional (an estimated ENL).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LooksCount(f64);

impl LooksCount {
    pub const SINGLE: LooksCount = LooksCount(1.0);

    pub fn new(looks: f64) -> Result<Self> {
        if looks >= 1.0 && looks.is_finite() {
            Ok(Self(looks))
        } else {
            Err(Error::Domain(format!("number of looks must be >= 1, got {looks}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite_sentinel(self) -> bool {
        self.0 >= INFINITE_ENL
    }

    fn as_integer(self) -> Option<u32> {
        (self.0.fract() == 0.0 && self.0 <= MAX_SUMMED_LOOKS).then_some(self.0 as u32)
    }
}

impl std::fmt::Display for LooksCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Intensity `|a + ib|^2` of a circular complex Gaussian with unit power.
#[inline]
fn complex_intensity<R: Rng>(rng: &mut R) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    0.5 * (re * re + im * im)
}

fn check_size(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        Err(Error::Dimension(format!("{width}x{height} speckle field is empty")))
    } else {
        Ok(())
    }
}

/// Draws an `L`-look speckle field, each pixel i.i.d. `Gamma(L, 1/L)`.
///
/// Integer look counts average `L` independent complex Gaussian intensities,
/// which is the physical multi-look construction. Pixels are drawn in
/// row-major order from a single ChaCha8 stream.
pub fn sample_speckle(
    width: usize,
    height: usize,
    looks: LooksCount,
    seed: RngSeed,
) -> Result<IntensityImage> {
    check_size(width, height)?;
    let n = width * height;
    let mut rng = seed.rng();
    let data: Vec<f64> = match looks.as_integer() {
        Some(l) => {
            let inv = l as f64;
            (0..n)
                .map(|_| (0..l).map(|_| complex_intensity(&mut rng)).sum::<f64>() / inv)
                .collect()
        }
        None => {
            let gamma = Gamma::new(looks.get(), 1.0 / looks.get())
                .map_err(|e| Error::Domain(e.to_string()))?;
            (0..n).map(|_| gamma.sample(&mut rng)).collect()
        }
    };
    Ok(IntensityImage::from_raw(width, height, data))
}

/// Normalized 1-D Gaussian taps on `[-radius, radius]`, sigma = radius / 2.
fn gaussian_taps(radius: usize) -> Vec<f64> {
    if radius == 0 {
        return vec![1.0];
    }
    let sigma = radius as f64 / 2.0;
    let taps: Vec<f64> = (-(radius as i64)..=radius as i64)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Valid-mode separable convolution of a `pw x ph` field.
fn convolve_valid(field: &[f64], pw: usize, ph: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let ow = pw + 1 - k;
    let oh = ph + 1 - k;
    let mut rows = vec![0.0; ow * ph];
    for y in 0..ph {
        let src = &field[y * pw..(y + 1) * pw];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&src[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(i, t)| t * rows[(y + i) * ow + x])
                .sum();
        }
    }
    out
}

/// Single-look speckle with spatial correlation over about `kernel_radius`
/// pixels.
///
/// A circular complex Gaussian field is filtered by a Gaussian kernel (the
/// stand-in for the sensor impulse response), its squared magnitude taken
/// and divided by the analytic mean `sum(k^2)`, which restores unit mean.
/// With `kernel_radius == 0` the result equals
/// `sample_speckle(.., LooksCount::SINGLE, seed)` sample for sample.
pub fn sample_correlated_speckle(
    width: usize,
    height: usize,
    kernel_radius: usize,
    seed: RngSeed,
) -> Result<IntensityImage> {
    check_size(width, height)?;
    let pw = width + 2 * kernel_radius;
    let ph = height + 2 * kernel_radius;
    let mut rng = seed.rng();
    let mut re = Vec::with_capacity(pw * ph);
    let mut im = Vec::with_capacity(pw * ph);
    for _ in 0..pw * ph {
        re.push(rng.sample::<f64, _>(StandardNormal));
        im.push(rng.sample::<f64, _>(StandardNormal));
    }
    let taps = gaussian_taps(kernel_radius);
    let tap_power: f64 = taps.iter().map(|t| t * t).sum();
    let power = tap_power * tap_power;
    let re = convolve_valid(&re, pw, ph, &taps);
    let im = convolve_valid(&im, pw, ph, &taps);
    let data = re
        .iter()
        .zip(&im)
        .map(|(a, b)| 0.5 * (a * a + b * b) / power)
        .collect();
    Ok(IntensityImage::from_raw(width, height, data))
}

/// Pixelwise `w = v * u`.
pub fn apply_speckle(reflectivity: &IntensityImage, speckle: &IntensityImage) -> Result<IntensityImage> {
    reflectivity.ensure_same_dims(speckle)?;
    let data = reflectivity
        .data()
        .iter()
        .zip(speckle.data())
        .map(|(v, u)| v * u)
        .collect();
    Ok(IntensityImage::from_raw(reflectivity.width(), reflectivity.height(), data))
}

fn log_normalizer(looks: LooksCount) -> f64 {
    let l = looks.get();
    l * l.ln() - ln_gamma(l)
}

/// Gamma speckle density `L^L / Gamma(L) * u^(L-1) * exp(-L u)`.
pub fn gamma_pdf(u: f64, looks: LooksCount) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("speckle value {u} is negative")));
    }
    let l = looks.get();
    if u == 0.0 {
        return Ok(if l == 1.0 { 1.0 } else { 0.0 });
    }
    Ok((log_normalizer(looks) + (l - 1.0) * u.ln() - l * u).exp())
}

/// Density of the log-speckle `z = log u`:
/// `L^L / Gamma(L) * exp(L z) * exp(-L e^z)`.
///
/// Evaluated as `gamma_pdf(e^z) * e^z` so that both densities agree to the
/// last bits under the change of variables.
pub fn fisher_tippett_pdf(z: f64, looks: LooksCount) -> f64 {
    let u = z.exp();
    if !u.is_finite() {
        return 0.0;
    }
    match gamma_pdf(u, looks) {
        Ok(p) => p * u,
        Err(_) => f64::NAN,
    }
}

/// Mean of the log-speckle, `psi(L) - log L`.
pub fn log_speckle_bias(looks: LooksCount) -> f64 {
    digamma(looks.get()) - looks.get().ln()
}

/// Pixelwise `log(max(w, eps))`.
pub fn to_log(w: &IntensityImage, eps: f64) -> Result<LogImage> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("log floor must be > 0, got {eps}")));
    }
    Ok(LogImage::from_raw(
        w.width(),
        w.height(),
        w.data().iter().map(|&v| v.max(eps).ln()).collect(),
    ))
}

/// Pixelwise `exp(y)`.
pub fn from_log(y: &LogImage) -> IntensityImage {
    IntensityImage::from_raw(y.width(), y.height(), y.data().iter().map(|v| v.exp()).collect())
}

/// Equivalent number of looks `mean^2 / var` of a region assumed homogeneous.
///
/// Uses the unbiased sample variance. The estimate is clamped to `[1,
/// INFINITE_ENL]`; a region without fluctuation returns [`INFINITE_ENL`].
pub fn estimate_enl(region: &IntensityImage) -> Result<LooksCount> {
    let n = region.len();
    if n < 2 {
        return Err(Error::Dimension("ENL needs at least 2 pixels".into()));
    }
    let mean = region.mean();
    let var = region
        .data()
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (n - 1) as f64;
    if var == 0.0 {
        return Ok(LooksCount(INFINITE_ENL));
    }
    Ok(LooksCount((mean * mean / var).clamp(1.0, INFINITE_ENL)))
}

pub(crate) fn ensure_same_dims(a: &LogImage, b: &LogImage) -> Result<()> {
    same_dims(a.dims(), b.dims())
}
