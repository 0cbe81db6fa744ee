//! Co-registered multi-temporal stacks and the super-image.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::denoiser::Denoiser;
use crate::error::{Error, Result};
use crate::image::{IntensityImage, Rect};
use crate::rng::RngSeed;
use crate::speckle::{
    apply_speckle, estimate_enl, from_log, sample_correlated_speckle, sample_speckle, to_log,
    LooksCount, DEFAULT_EPS,
};

/// Ordered, co-registered acquisitions sharing one look count.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    images: Vec<IntensityImage>,
    dates: Vec<String>,
    looks: LooksCount,
}

impl Stack {
    pub fn new(images: Vec<IntensityImage>, dates: Vec<String>, looks: LooksCount) -> Result<Self> {
        if images.len() < 2 {
            return Err(Error::Config(format!(
                "a stack needs at least 2 dates, got {}",
                images.len()
            )));
        }
        if dates.len() != images.len() {
            return Err(Error::Config(format!(
                "{} date labels for {} images",
                dates.len(),
                images.len()
            )));
        }
        for (i, d) in dates.iter().enumerate() {
            if dates[..i].contains(d) {
                return Err(Error::Config(format!("duplicate date label {d:?}")));
            }
        }
        let first = &images[0];
        for img in &images[1..] {
            first.ensure_same_dims(img)?;
        }
        Ok(Self {
            images,
            dates,
            looks,
        })
    }

    /// Builds a stack with generated labels `t00`, `t01`, ...
    pub fn from_images(images: Vec<IntensityImage>, looks: LooksCount) -> Result<Self> {
        let dates = (0..images.len()).map(default_date_label).collect();
        Self::new(images, dates, looks)
    }

    pub fn images(&self) -> &[IntensityImage] {
        &self.images
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn looks(&self) -> LooksCount {
        self.looks
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.images[0].dims()
    }

    /// Same stack with every image multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let images = self
            .images
            .iter()
            .map(|img| img.scaled(factor))
            .collect::<Result<_>>()?;
        Ok(Self {
            images,
            dates: self.dates.clone(),
            looks: self.looks,
        })
    }
}

pub fn default_date_label(index: usize) -> String {
    format!("t{index:02}")
}

/// Multiplicative change of the reflectivity inside `region` for the frames
/// `first_date..=last_date` (0-based frame indices).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangeEvent {
    pub region: Rect,
    pub first_date: usize,
    pub last_date: usize,
    pub gain: f64,
}

impl ChangeEvent {
    pub fn is_active(&self, date: usize) -> bool {
        (self.first_date..=self.last_date).contains(&date)
    }

    fn validate(&self, width: usize, height: usize) -> Result<()> {
        if !(self.gain > 0.0) || !self.gain.is_finite() {
            return Err(Error::Config(format!("change gain {} must be > 0", self.gain)));
        }
        if self.first_date > self.last_date {
            return Err(Error::Config(format!(
                "change date range {}..={} is empty",
                self.first_date, self.last_date
            )));
        }
        if !self.region.fits_in(width, height) {
            return Err(Error::Bounds(self.region.to_string()));
        }
        Ok(())
    }
}

/// Reflectivity at frame `date` after applying the active changes in order.
pub fn reflectivity_at(
    reflectivity: &IntensityImage,
    changes: &[ChangeEvent],
    date: usize,
) -> IntensityImage {
    let active: Vec<&ChangeEvent> = changes.iter().filter(|c| c.is_active(date)).collect();
    if active.is_empty() {
        return reflectivity.clone();
    }
    let w = reflectivity.width();
    let data = reflectivity
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (x, y) = (i % w, i / w);
            active
                .iter()
                .filter(|c| c.region.contains(x, y))
                .fold(v, |acc, c| acc * c.gain)
        })
        .collect();
    IntensityImage::from_raw(w, reflectivity.height(), data)
}

fn speckle_field(
    width: usize,
    height: usize,
    looks: LooksCount,
    kernel_radius: usize,
    seed: RngSeed,
) -> Result<IntensityImage> {
    if kernel_radius == 0 {
        return sample_speckle(width, height, looks, seed);
    }
    let l = looks.get();
    if l.fract() != 0.0 {
        return Err(Error::Config(format!(
            "correlated speckle needs an integer look count, got {l}"
        )));
    }
    let n = l as u64;
    if n == 1 {
        return sample_correlated_speckle(width, height, kernel_radius, seed);
    }
    let mut acc = vec![0.0; width * height];
    for k in 0..n {
        let f = sample_correlated_speckle(width, height, kernel_radius, seed.derive(k))?;
        acc.iter_mut().zip(f.data()).for_each(|(a, u)| *a += u);
    }
    acc.iter_mut().for_each(|a| *a /= l);
    Ok(IntensityImage::from_raw(width, height, acc))
}

/// Simulates `frames` acquisitions of the scene `reflectivity`.
///
/// Frame `t` is the (changed) reflectivity times a fresh speckle draw whose
/// seed is `seed.derive(t)`. `kernel_radius > 0` switches to spatially
/// correlated speckle.
pub fn simulate_stack(
    reflectivity: &IntensityImage,
    frames: usize,
    looks: LooksCount,
    changes: &[ChangeEvent],
    kernel_radius: usize,
    seed: RngSeed,
) -> Result<Stack> {
    if frames < 2 {
        return Err(Error::Config(format!("a stack needs at least 2 frames, got {frames}")));
    }
    let (width, height) = reflectivity.dims();
    for c in changes {
        c.validate(width, height)?;
    }
    let images = (0..frames)
        .into_par_iter()
        .map(|t| {
            let u = speckle_field(width, height, looks, kernel_radius, seed.derive(t as u64))?;
            apply_speckle(&reflectivity_at(reflectivity, changes, t), &u)
        })
        .collect::<Result<Vec<_>>>()?;
    Stack::from_images(images, looks)
}

/// Pixelwise arithmetic mean over the dates.
///
/// The sum is accumulated in date order with Neumaier compensation and
/// divided in double-double arithmetic, so the result is within about one
/// ulp of the exact mean. In particular a stack of identical images
/// averages to that image exactly.
pub fn temporal_mean(stack: &Stack) -> IntensityImage {
    let (width, height) = stack.dims();
    let mut sum = vec![0.0f64; width * height];
    let mut comp = vec![0.0f64; width * height];
    for img in stack.images() {
        for ((s, c), &x) in sum.iter_mut().zip(comp.iter_mut()).zip(img.data()) {
            let t = *s + x;
            *c += if s.abs() >= x.abs() { (*s - t) + x } else { (x - t) + *s };
            *s = t;
        }
    }
    let n = stack.len() as f64;
    let data = sum
        .iter()
        .zip(&comp)
        .map(|(&s, &c)| {
            let q = s / n;
            let r = (-q).mul_add(n, s);
            q + (r + c) / n
        })
        .collect();
    IntensityImage::from_raw(width, height, data)
}

/// Temporal average of a stack, floored at [`DEFAULT_EPS`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperImage {
    data: IntensityImage,
    enl: LooksCount,
    smoothed: bool,
}

impl SuperImage {
    /// Wraps an existing average (e.g. loaded from disk), measuring its ENL
    /// over `region` or, when `None`, the whole image.
    pub fn from_image(image: IntensityImage, region: Option<Rect>) -> Result<Self> {
        let data = image.map(|v| v.max(DEFAULT_EPS));
        let enl = enl_over(&data, region)?;
        Ok(Self {
            data,
            enl,
            smoothed: false,
        })
    }

    pub fn data(&self) -> &IntensityImage {
        &self.data
    }

    pub fn enl(&self) -> LooksCount {
        self.enl
    }

    pub fn smoothed(&self) -> bool {
        self.smoothed
    }

    pub fn into_image(self) -> IntensityImage {
        self.data
    }
}

/// ENL over `region`, or over the whole image when no region is given. The
/// whole-image estimate is only meaningful for nearly homogeneous scenes;
/// structured scenes inflate the variance and bias the ENL low.
pub fn enl_over(image: &IntensityImage, region: Option<Rect>) -> Result<LooksCount> {
    match region {
        Some(r) => estimate_enl(&image.crop(r)?),
        None => estimate_enl(image),
    }
}

/// Temporal mean, optionally followed by a light log-domain smoothing.
///
/// When `smoother` is given, the looks count handed to it is the ENL of the
/// mean measured over `homogeneous` (whole image if `None`). The returned
/// ENL is measured on the final image over the same region.
pub fn build_super_image(
    stack: &Stack,
    smoother: Option<&dyn Denoiser>,
    homogeneous: Option<Rect>,
) -> Result<SuperImage> {
    let mean = temporal_mean(stack);
    let data = match smoother {
        None => mean,
        Some(d) => {
            let looks = enl_over(&mean, homogeneous)?;
            from_log(&d.denoise(&to_log(&mean, DEFAULT_EPS)?, looks)?)
        }
    };
    let data = data.map(|v| v.max(DEFAULT_EPS));
    let enl = enl_over(&data, homogeneous)?;
    Ok(SuperImage {
        data,
        enl,
        smoothed: smoother.is_some(),
    })
}
