//! Stack manifests: TOML documents listing the rasters of a stack.
//!
//! ```toml
//! id = "lelystad-sim"
//! looks = 1.0
//! homogeneous_region = { x = 8, y = 8, width = 32, height = 32 }
//!
//! [[entries]]
//! date = "t00"
//! path = "t00.rdim"
//!
//! [[entries]]
//! date = "t01"
//! path = "t01.rdim"
//!
//! [[changes]]
//! region = { x = 0, y = 0, width = 4, height = 4 }
//! first_date = 1
//! last_date = 1
//! gain = 2.0
//! ```
//!
//! Relative raster paths are resolved against the manifest's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ManifestError, Result};
use crate::image::Rect;
use crate::speckle::LooksCount;
use crate::stack::{ChangeEvent, Stack};

use super::raster::read_raster;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub date: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackManifest {
    pub id: String,
    pub looks: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous_region: Option<Rect>,
    pub entries: Vec<ManifestEntry>,
    /// Change log of simulated stacks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub changes: Vec<ChangeEvent>,
}

impl StackManifest {
    /// Checks entry count and date uniqueness, without touching the disk.
    pub fn validate(&self) -> std::result::Result<(), ManifestError> {
        if self.entries.len() < 2 {
            return Err(ManifestError::TooFewEntries(self.entries.len()));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if self.entries[..i].iter().any(|p| p.date == e.date) {
                return Err(ManifestError::DuplicateDate(e.date.clone()));
            }
        }
        if LooksCount::new(self.looks).is_err() {
            return Err(ManifestError::Parse(format!("looks {} must be >= 1", self.looks)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are always representable in TOML")
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, ManifestError> {
        let m: Self = toml::from_str(text).map_err(|e| ManifestError::Parse(e.message().to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn resolve(&self, base: &Path, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            base.join(&entry.path)
        }
    }

    /// Reads every raster of the manifest into a stack.
    pub fn load_stack(&self, base: &Path) -> Result<Stack> {
        let images = self
            .entries
            .iter()
            .map(|e| read_raster(self.resolve(base, e)))
            .collect::<Result<Vec<_>>>()?;
        let dates = self.entries.iter().map(|e| e.date.clone()).collect();
        Stack::new(images, dates, LooksCount::new(self.looks)?)
    }
}

fn manifest_error(path: &Path, kind: ManifestError) -> Error {
    Error::Manifest {
        path: path.to_path_buf(),
        kind,
    }
}

/// Parses and validates a manifest, including the existence of every
/// referenced raster.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<StackManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let m = StackManifest::from_toml(&text).map_err(|k| manifest_error(path, k))?;
    let base = manifest_dir(path);
    for e in &m.entries {
        let p = m.resolve(&base, e);
        if !p.is_file() {
            return Err(manifest_error(path, ManifestError::MissingFile(p)));
        }
    }
    Ok(m)
}

pub fn save_manifest(path: impl AsRef<Path>, manifest: &StackManifest) -> Result<()> {
    let path = path.as_ref();
    manifest.validate().map_err(|k| manifest_error(path, k))?;
    std::fs::write(path, manifest.to_toml()).map_err(|e| Error::io(path, e))
}

/// Loads the manifest at `path` and the stack it describes.
pub fn load_stack(path: impl AsRef<Path>) -> Result<(StackManifest, Stack)> {
    let path = path.as_ref();
    let m = load_manifest(path)?;
    let stack = m.load_stack(&manifest_dir(path))?;
    Ok((m, stack))
}

pub fn manifest_dir(path: &Path) -> PathBuf {
    path.parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
