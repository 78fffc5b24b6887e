//! Big-endian IDX dataset parsing (the MNIST distribution format).
//!
//! Images: magic `0x00000803`, then count, rows, cols as u32, then raw
//! row-major pixel bytes. Labels: magic `0x00000801`, then count, then raw
//! label bytes. All multi-byte integers are big-endian.

use std::path::Path;

use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// A parsed IDX image file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` bytes, image-major.
    pub pixels: Vec<u8>,
}

impl IdxImages {
    /// Pixel bytes of image `i`.
    pub fn image(&self, i: usize) -> Result<&[u8]> {
        if i >= self.count {
            return Err(Error::Index { index: i, len: self.count });
        }
        let size = self.rows * self.cols;
        Ok(&self.pixels[i * size..(i + 1) * size])
    }
}

/// An image file paired with its label file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxDataset {
    pub images: IdxImages,
    pub labels: Vec<u8>,
}

impl IdxDataset {
    pub fn len(&self) -> usize {
        self.images.count
    }

    pub fn is_empty(&self) -> bool {
        self.images.count == 0
    }
}

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let slice = bytes.get(offset..offset + 4).ok_or(Error::Parse {
        offset: offset as u64,
        message: "file truncated while reading u32".into(),
    })?;
    Ok(u32::from_be_bytes(slice.try_into().unwrap()))
}

/// Parse an IDX image file from raw bytes.
pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: format!("bad image magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() != expected {
        return Err(Error::Parse {
            offset: bytes.len().min(expected) as u64,
            message: format!(
                "image payload length {} does not match header ({count} x {rows} x {cols})",
                bytes.len() - 16.min(bytes.len())
            ),
        });
    }
    Ok(IdxImages { count, rows, cols, pixels: bytes[16..].to_vec() })
}

/// Parse an IDX label file from raw bytes.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != LABELS_MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: format!("bad label magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() != expected {
        return Err(Error::Parse {
            offset: bytes.len().min(expected) as u64,
            message: format!("label payload length {} does not match count {count}", bytes.len() - 8.min(bytes.len())),
        });
    }
    Ok(bytes[8..].to_vec())
}

/// Load and pair an image file and a label file.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<IdxDataset> {
    let images = parse_idx_images(&std::fs::read(images_path)?)?;
    let labels = parse_idx_labels(&std::fs::read(labels_path)?)?;
    if images.count != labels.len() {
        return Err(Error::Parse {
            offset: 4,
            message: format!(
                "image count {} does not match label count {}",
                images.count,
                labels.len()
            ),
        });
    }
    Ok(IdxDataset { images, labels })
}
