use crate::error::{Error, Result};
use crate::image::LogImage;

/// Affine compression `y -> (y - m) / (M - m)` of log-intensities, `m` and
/// `M` being the extrema over the training data. Values outside `[0, 1]`
/// are kept, not clipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineRange {
    pub min: f64,
    pub max: f64,
}

impl AffineRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let r = Self { min, max };
        r.check()?;
        Ok(r)
    }

    /// Extrema over a set of log images.
    pub fn spanning<'a>(images: impl IntoIterator<Item = &'a LogImage>) -> Result<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for img in images {
            for &v in img.data() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Self::new(lo, hi)
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    fn check(&self) -> Result<()> {
        if self.max > self.min && self.min.is_finite() && self.max.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "degenerate log range [{}, {}]",
                self.min, self.max
            )))
        }
    }
}

pub fn rescale(y: &LogImage, range: &AffineRange) -> Result<LogImage> {
    range.check()?;
    let span = range.span();
    Ok(y.map(|v| (v - range.min) / span))
}

pub fn unrescale(y: &LogImage, range: &AffineRange) -> Result<LogImage> {
    range.check()?;
    let span = range.span();
    Ok(y.map(|v| v * span + range.min))
}
