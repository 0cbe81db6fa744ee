use crate::error::Result;
use crate::image::LogImage;
use crate::speckle::{log_speckle_bias, LooksCount};

use super::Denoiser;

/// Box mean over a `(2r+1)^2` window with edge replication, optionally
/// minus the log-speckle bias `psi(L) - log L`.
///
/// Windows are summed directly in a fixed order, so a constant input gives
/// a constant output.
pub fn baseline_denoise(y: &LogImage, looks: LooksCount, radius: usize, debias: bool) -> LogImage {
    let shift = if debias { log_speckle_bias(looks) } else { 0.0 };
    if radius == 0 {
        return y.map(|v| v - shift);
    }
    let (w, h) = y.dims();
    let taps = 2 * radius + 1;
    let norm = taps as f64;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let src = y.data();
    let mut rows = vec![0.0; w * h];
    for row in 0..h {
        let line = &src[row * w..(row + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for k in 0..taps {
                acc += line[clamp(x as isize + k as isize - radius as isize, w)];
            }
            rows[row * w + x] = acc / norm;
        }
    }
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for k in 0..taps {
            let r = clamp(row as isize + k as isize - radius as isize, h);
            let (dst, srow) = (&mut out[row * w..(row + 1) * w], &rows[r * w..(r + 1) * w]);
            dst.iter_mut().zip(srow).for_each(|(d, s)| *d += s);
        }
    }
    for v in &mut out {
        *v = *v / norm - shift;
    }
    LogImage::from_raw(w, h, out)
}

/// Bias-corrected box filter, the reference denoiser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxDenoiser {
    pub radius: usize,
    pub debias: bool,
}

impl BoxDenoiser {
    pub fn new(radius: usize, debias: bool) -> Self {
        Self { radius, debias }
    }
}

impl Denoiser for BoxDenoiser {
    fn denoise(&self, y: &LogImage, looks: LooksCount) -> Result<LogImage> {
        Ok(baseline_denoise(y, looks, self.radius, self.debias))
    }
}
