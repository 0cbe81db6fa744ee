//! Multi-temporal despeckling of SAR intensity images.
//!
//! The crate simulates speckled stacks, averages them into a super-image,
//! and restores single dates by denoising their ratio to the normalized
//! super-image. Denoisers work on log-intensities; a bias-corrected box
//! filter and a small residual CNN trained self-supervised on pairs of
//! dates are provided.
//!
//! ```
//! use mtdespeckle::prelude::*;
//!
//! let scene = IntensityImage::constant(64, 64, 2.0).unwrap();
//! let stack = simulate_stack(&scene, 8, LooksCount::SINGLE, &[], 0, RngSeed(1)).unwrap();
//! let s = build_super_image(&stack, None, None).unwrap();
//! let d = BoxDenoiser::new(2, true);
//! let restored = despeckle_ratio(&stack.images()[0], &s, &d, LooksCount::SINGLE).unwrap();
//! assert_eq!(restored.dims(), (64, 64));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod denoiser;
pub mod error;
pub mod image;
pub mod io;
pub mod metrics;
pub mod ratio;
pub mod rng;
pub mod speckle;
pub mod stack;

pub use error::{Error, ErrorClass, FormatError, ManifestError, Result};

pub mod prelude {
    pub use crate::denoiser::{
        baseline_denoise, cnn_forward, downsample2, train_self_supervised, Architecture,
        BoxDenoiser, Denoiser, DenoiserModel, IdentityDenoiser, TrainConfig,
    };
    pub use crate::image::{IntensityImage, LogImage, Rect};
    pub use crate::metrics::{mse_log, psnr_log, residual_ratio_stats, EvalReport};
    pub use crate::ratio::{despeckle_ratio, despeckle_single, normalize_super};
    pub use crate::rng::RngSeed;
    pub use crate::speckle::{
        apply_speckle, estimate_enl, from_log, sample_correlated_speckle, sample_speckle,
        to_log, LooksCount, DEFAULT_EPS,
    };
    pub use crate::stack::{
        build_super_image, simulate_stack, temporal_mean, ChangeEvent, Stack, SuperImage,
    };
    pub use crate::Error;
}
