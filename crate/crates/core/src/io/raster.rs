//! `RDIM` raster files.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `RDIM`                  |
//! | 4      | 4    | version (`1`)                 |
//! | 8      | 4    | width                         |
//! | 12     | 4    | height                        |
//! | 16     | 4    | sample type (`1` = float32)   |
//! | 20     | 4·wh | row-major little-endian `f32` |
//!
//! The file length must match the header exactly. Images are held as `f64`
//! in memory, so writing rounds to `f32`; reading and re-writing a file is
//! byte-exact.

use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::image::IntensityImage;

pub const RASTER_MAGIC: [u8; 4] = *b"RDIM";
pub const RASTER_VERSION: u32 = 1;
pub const DTYPE_F32: u32 = 1;
const HEADER_LEN: usize = 20;

pub(crate) fn u32_at(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap())
}

pub(crate) fn check_magic(bytes: &[u8], magic: [u8; 4]) -> std::result::Result<(), FormatError> {
    if bytes.len() < 4 {
        return Err(FormatError::Truncated {
            expected: 4,
            found: bytes.len() as u64,
        });
    }
    let found: [u8; 4] = bytes[..4].try_into().unwrap();
    if found != magic {
        return Err(FormatError::BadMagic(found));
    }
    Ok(())
}

pub(crate) fn check_length(expected: u64, found: usize) -> std::result::Result<(), FormatError> {
    let found = found as u64;
    if found < expected {
        Err(FormatError::Truncated { expected, found })
    } else if found > expected {
        Err(FormatError::TrailingBytes { expected, found })
    } else {
        Ok(())
    }
}

pub fn encode_raster(image: &IntensityImage) -> std::result::Result<Vec<u8>, FormatError> {
    let (w, h) = image.dims();
    let (w32, h32) = match (u32::try_from(w), u32::try_from(h)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(FormatError::DimensionOverflow),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * image.len());
    out.extend_from_slice(&RASTER_MAGIC);
    out.extend_from_slice(&RASTER_VERSION.to_le_bytes());
    out.extend_from_slice(&w32.to_le_bytes());
    out.extend_from_slice(&h32.to_le_bytes());
    out.extend_from_slice(&DTYPE_F32.to_le_bytes());
    for &v in image.data() {
        let s = v as f32;
        if !s.is_finite() {
            return Err(FormatError::InvalidValue(format!("{v} does not fit in f32")));
        }
        out.extend_from_slice(&s.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_raster(bytes: &[u8]) -> std::result::Result<IntensityImage, FormatError> {
    check_magic(bytes, RASTER_MAGIC)?;
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u32_at(bytes, 4);
    if version != RASTER_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let (w, h) = (u32_at(bytes, 8) as u64, u32_at(bytes, 12) as u64);
    let dtype = u32_at(bytes, 16);
    if dtype != DTYPE_F32 {
        return Err(FormatError::UnsupportedDtype(dtype));
    }
    let payload = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .filter(|&n| n > 0 && usize::try_from(n).is_ok())
        .ok_or(FormatError::DimensionOverflow)?;
    check_length(HEADER_LEN as u64 + payload, bytes.len())?;
    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    IntensityImage::new(w as usize, h as usize, data)
        .map_err(|e| FormatError::InvalidValue(e.to_string()))
}

pub fn write_raster(path: impl AsRef<Path>, image: &IntensityImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_raster(image).map_err(|kind| Error::Format {
        path: path.to_path_buf(),
        kind,
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_raster(path: impl AsRef<Path>) -> Result<IntensityImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_raster(&bytes).map_err(|kind| Error::Format {
        path: path.to_path_buf(),
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> IntensityImage {
        IntensityImage::new(3, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()
    }

    #[test]
    fn round_trip_small_image() {
        let img = sample();
        let bytes = encode_raster(&img).unwrap();
        assert_eq!(bytes.len(), 20 + 24);
        assert_eq!(&bytes[..4], b"RDIM");
        assert_eq!(decode_raster(&bytes).unwrap(), img);
    }

    #[test]
    fn malformed_inputs() {
        let mut bytes = encode_raster(&sample()).unwrap();
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XXXX");
        assert_eq!(decode_raster(&bad), Err(FormatError::BadMagic(*b"XXXX")));

        let short = &bytes[..bytes.len() - 3];
        assert!(matches!(decode_raster(short), Err(FormatError::Truncated { .. })));
        assert!(matches!(decode_raster(&bytes[..10]), Err(FormatError::Truncated { .. })));

        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(decode_raster(&long), Err(FormatError::TrailingBytes { .. })));

        let mut v = bytes.clone();
        v[4] = 9;
        assert_eq!(decode_raster(&v), Err(FormatError::UnsupportedVersion(9)));

        let mut d = bytes.clone();
        d[16] = 2;
        assert_eq!(decode_raster(&d), Err(FormatError::UnsupportedDtype(2)));

        bytes[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        bytes[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(
            decode_raster(&bytes),
            Err(FormatError::DimensionOverflow) | Err(FormatError::Truncated { .. })
        ));
        let mut z = encode_raster(&sample()).unwrap();
        z[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert_eq!(decode_raster(&z), Err(FormatError::DimensionOverflow));
    }

    #[test]
    fn negative_samples_are_rejected() {
        let mut bytes = encode_raster(&sample()).unwrap();
        bytes[20..24].copy_from_slice(&(-1.0f32).to_le_bytes());
        assert!(matches!(decode_raster(&bytes), Err(FormatError::InvalidValue(_))));
    }
}
