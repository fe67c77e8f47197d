//! Raster value types shared by every pipeline stage.
//!
//! All rasters are row-major with origin at the top-left. Types are immutable
//! value objects once constructed, so they can be shared freely between
//! workers.

use crate::error::{Error, Result};

/// 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorFrame {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl ColorFrame {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(ColorFrame {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// Single-channel 8-bit intensity raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(GrayFrame {
            width,
            height,
            pixels,
        })
    }

    /// Frame filled with a single intensity.
    pub fn uniform(width: usize, height: usize, value: u8) -> Result<Self> {
        GrayFrame::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Binary background/foreground raster: 0 = background, 255 = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForegroundMask {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl ForegroundMask {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, labels.len())?;
        if let Some(&bad) = labels.iter().find(|&&v| v != 0 && v != 255) {
            return Err(Error::BadLabel(bad));
        }
        Ok(ForegroundMask {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn foreground_count(&self) -> usize {
        self.labels.iter().filter(|&&v| v == 255).count()
    }

    /// View the mask as an intensity raster (labels are valid intensities).
    pub fn as_gray(&self) -> GrayFrame {
        GrayFrame {
            width: self.width,
            height: self.height,
            pixels: self.labels.clone(),
        }
    }
}

/// Flat single-precision payload handed across the kernel boundary, one value
/// per layer-1 neuron in the same row-major order as the source mask.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBuffer {
    values: Vec<f32>,
}

impl KernelBuffer {
    pub fn new(values: Vec<f32>) -> Self {
        KernelBuffer { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyFrame);
    }
    if len != width * height {
        return Err(Error::BadPixelCount { len, width, height });
    }
    Ok(())
}

/// ITU-R BT.601 luma conversion, rounded half-up.
///
/// Integer arithmetic keeps the rounding exact: `(299r + 587g + 114b + 500) / 1000`.
pub fn to_gray(frame: &ColorFrame) -> GrayFrame {
    let pixels = frame
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let luma = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
            ((luma + 500) / 1000) as u8
        })
        .collect();
    GrayFrame {
        width: frame.width,
        height: frame.height,
        pixels,
    }
}

/// Label every pixel at or above `threshold` as foreground.
pub fn binarize(frame: &GrayFrame, threshold: u8) -> ForegroundMask {
    let labels = frame
        .pixels
        .iter()
        .map(|&v| if v >= threshold { 255 } else { 0 })
        .collect();
    ForegroundMask {
        width: frame.width,
        height: frame.height,
        labels,
    }
}

/// Serialize a mask into the flat kernel payload, preserving row-major order.
pub fn mask_to_buffer(mask: &ForegroundMask) -> KernelBuffer {
    KernelBuffer {
        values: mask.labels.iter().map(|&v| v as f32).collect(),
    }
}
