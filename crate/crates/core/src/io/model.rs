//! `RDNM` model files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic "RDNM" | version u32 (1)
//! layers u32 | channels u32 | kernel_size u32
//! range min f64 | range max f64 | trained looks f64
//! parameters f32 * param_count, in `ConvNet` layer order
//! ```

use std::path::Path;

use crate::denoiser::{AffineRange, Architecture, DenoiserModel};
use crate::error::{Error, FormatError, Result};
use crate::speckle::LooksCount;

use super::raster::{check_length, check_magic, u32_at};

pub const MODEL_MAGIC: [u8; 4] = *b"RDNM";
pub const MODEL_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 3 * 4 + 3 * 8;

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())
}

pub fn encode_model(model: &DenoiserModel) -> Vec<u8> {
    let arch = model.architecture();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * model.params().len());
    out.extend_from_slice(&MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    for v in [arch.layers, arch.channels, arch.kernel_size] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&model.range().min.to_le_bytes());
    out.extend_from_slice(&model.range().max.to_le_bytes());
    out.extend_from_slice(&model.trained_looks().get().to_le_bytes());
    for p in model.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> std::result::Result<DenoiserModel, FormatError> {
    check_magic(bytes, MODEL_MAGIC)?;
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u32_at(bytes, 4);
    if version != MODEL_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let arch = Architecture {
        layers: u32_at(bytes, 8) as usize,
        channels: u32_at(bytes, 12) as usize,
        kernel_size: u32_at(bytes, 16) as usize,
    };
    arch.validate()
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    let count = (0..arch.layers).try_fold(0u64, |acc, l| {
        let (cin, cout) = arch.layer_shape(l);
        let k2 = (arch.kernel_size as u64).checked_mul(arch.kernel_size as u64)?;
        let layer = (cout as u64).checked_mul(cin as u64)?.checked_mul(k2)?.checked_add(cout as u64)?;
        acc.checked_add(layer)
    });
    let expected = count
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(HEADER_LEN as u64))
        .ok_or(FormatError::DimensionOverflow)?;
    check_length(expected, bytes.len())?;
    let range = AffineRange::new(f64_at(bytes, 20), f64_at(bytes, 28))
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    let looks = LooksCount::new(f64_at(bytes, 36))
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    let params = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenoiserModel::new(arch, params, range, looks)
        .map_err(|e| FormatError::InvalidValue(e.to_string()))
}

pub fn save_model(path: impl AsRef<Path>, model: &DenoiserModel) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DenoiserModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes).map_err(|kind| Error::Format {
        path: path.to_path_buf(),
        kind,
    })
}
