//! On-disk formats: rasters, models, stack manifests, scenes and previews.

pub mod manifest;
pub mod model;
pub mod preview;
pub mod raster;
pub mod scene;

pub use manifest::{load_manifest, load_stack, save_manifest, ManifestEntry, StackManifest};
pub use model::{decode_model, encode_model, load_model, save_model};
pub use preview::{export_preview, preview_levels};
pub use raster::{decode_raster, encode_raster, read_raster, write_raster};
pub use scene::Scene;
