//! 8-bit image file input and mask output.
//!
//! Readers accept PNG, JPEG and PGM. Masks are written as single-channel
//! PNG with values {0, 255}.

use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::{ColorFrame, ForegroundMask, GrayFrame};

fn open(path: &Path) -> Result<image::DynamicImage> {
    image::open(path).map_err(|source| Error::ImageFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_color(path: &Path) -> Result<ColorFrame> {
    let img = open(path)?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img.pixels().map(|p| p.0).collect();
    ColorFrame::new(w, h, pixels)
}

pub fn read_gray(path: &Path) -> Result<GrayFrame> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    GrayFrame::new(w, h, img.into_raw())
}

/// Read a binary mask, snapping any stray intensities to {0, 255} at 128.
pub fn read_mask(path: &Path) -> Result<ForegroundMask> {
    let gray = read_gray(path)?;
    let labels = gray
        .pixels()
        .iter()
        .map(|&v| if v >= 128 { 255 } else { 0 })
        .collect();
    ForegroundMask::new(gray.width(), gray.height(), labels)
}

pub fn write_mask(path: &Path, mask: &ForegroundMask) -> Result<()> {
    let img = image::GrayImage::from_raw(
        mask.width() as u32,
        mask.height() as u32,
        mask.labels().to_vec(),
    )
    .expect("mask invariant guarantees the buffer size");
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::ImageFile {
            path: path.to_path_buf(),
            source,
        })
}
