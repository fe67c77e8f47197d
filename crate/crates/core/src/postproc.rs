//! Spike-sum thresholding and speckle removal for the final motion mask.

use crate::error::{Error, Result};
use crate::frame::{binarize, ForegroundMask, GrayFrame};
use crate::snn::SpikeSumGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostprocConfig {
    /// Layer-3 spikes required to mark a pixel as motion.
    pub spike_threshold: u32,
    /// Side length of the square mean filter, odd.
    pub filter_size: usize,
    /// Re-binarization threshold applied after filtering.
    pub refire_threshold: u8,
}

impl Default for PostprocConfig {
    fn default() -> Self {
        PostprocConfig {
            spike_threshold: 1,
            filter_size: 3,
            refire_threshold: 128,
        }
    }
}

impl PostprocConfig {
    pub fn validate(&self) -> Result<()> {
        if self.spike_threshold < 1 {
            return Err(Error::invalid_config(
                "post.spike_threshold",
                "must be >= 1",
            ));
        }
        if self.filter_size < 1 || self.filter_size.is_multiple_of(2) {
            return Err(Error::invalid_config(
                "post.filter_size",
                "must be odd and >= 1",
            ));
        }
        Ok(())
    }
}

/// Mark every pixel whose layer-3 spike count reaches the threshold.
pub fn spikes_to_mask(grid: &SpikeSumGrid, cfg: &PostprocConfig) -> ForegroundMask {
    let labels = grid
        .sums()
        .iter()
        .map(|&s| if s >= cfg.spike_threshold { 255 } else { 0 })
        .collect();
    ForegroundMask::new(grid.width(), grid.height(), labels)
        .expect("grid dimensions are valid by construction")
}

/// Square mean filter with replicate-border padding, rounded half-up.
pub fn average_filter(frame: &GrayFrame, size: usize) -> Result<GrayFrame> {
    let (width, height) = (frame.width(), frame.height());
    if size < 1 || size.is_multiple_of(2) || size > width.min(height) {
        return Err(Error::BadFilterSize {
            size,
            width,
            height,
        });
    }
    if size == 1 {
        return Ok(frame.clone());
    }

    let half = (size / 2) as isize;
    let area = (size * size) as u32;
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height as isize {
        for x in 0..width as isize {
            let mut sum = 0u32;
            for dy in -half..=half {
                for dx in -half..=half {
                    let sx = (x + dx).clamp(0, width as isize - 1) as usize;
                    let sy = (y + dy).clamp(0, height as isize - 1) as usize;
                    sum += frame.get(sx, sy) as u32;
                }
            }
            // round-half-up mean
            out.push(((2 * sum + area) / (2 * area)) as u8);
        }
    }
    GrayFrame::new(width, height, out)
}

/// Remove isolated speckle: view the mask as intensities, mean-filter, and
/// re-binarize at the refire threshold.
pub fn finalize_mask(mask: &ForegroundMask, cfg: &PostprocConfig) -> Result<ForegroundMask> {
    let filtered = average_filter(&mask.as_gray(), cfg.filter_size)?;
    Ok(binarize(&filtered, cfg.refire_threshold))
}
