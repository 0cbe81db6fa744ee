use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::IntensityImage;

/// 8-bit gray levels for display: amplitude (`sqrt`), linear stretch between
/// the 1st and 99th percentiles, then `t^(1/gamma)`.
pub fn preview_levels(image: &IntensityImage, gamma: f64) -> Result<Vec<u8>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Config(format!("gamma must be > 0, got {gamma}")));
    }
    let amp: Vec<f64> = image.data().iter().map(|v| v.sqrt()).collect();
    let mut sorted = amp.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
    let (lo, hi) = (pick(0.01), pick(0.99));
    Ok(amp
        .iter()
        .map(|&a| {
            if hi <= lo {
                return 128;
            }
            let t = ((a - lo) / (hi - lo)).clamp(0.0, 1.0);
            (t.powf(1.0 / gamma) * 255.0).round() as u8
        })
        .collect())
}

/// Writes a binary PGM (`P5`) preview of an intensity image.
pub fn export_preview(image: &IntensityImage, path: impl AsRef<Path>, gamma: f64) -> Result<()> {
    let path = path.as_ref();
    let levels = preview_levels(image, gamma)?;
    let write = || -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(f, "P5\n{} {}\n255\n", image.width(), image.height())?;
        f.write_all(&levels)?;
        f.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
