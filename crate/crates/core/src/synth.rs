//! Synthetic moving-square sequences with exact ground truth, written in the
//! same directory layout the dataset loader expects. Useful for demos and
//! end-to-end checks without downloading a benchmark dataset.

use std::path::Path;

use crate::error::Result;
use crate::frame::{ForegroundMask, GrayFrame};
use crate::io;

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub width: usize,
    pub height: usize,
    /// Total frames in the sequence.
    pub frames: usize,
    /// Square side length.
    pub square: usize,
    /// Horizontal speed, pixels per frame.
    pub speed: usize,
    pub background: u8,
    pub foreground: u8,
    /// Frames before the square enters, so the background model settles on a
    /// clean scene.
    pub lead_in: usize,
    /// First frame number of the evaluation window (temporal ROI).
    pub eval_from: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            width: 64,
            height: 64,
            frames: 200,
            square: 8,
            speed: 2,
            background: 30,
            foreground: 220,
            lead_in: 10,
            eval_from: 21,
        }
    }
}

/// Square position for 1-based frame `number`, bouncing between the left and
/// right edges. `None` during the lead-in.
fn square_origin(cfg: &SynthConfig, number: u32) -> Option<(usize, usize)> {
    let n = number as usize;
    if n <= cfg.lead_in {
        return None;
    }
    let t = (n - cfg.lead_in - 1) * cfg.speed;
    let span = cfg.width - cfg.square;
    let phase = t % (2 * span);
    let x = if phase <= span {
        phase
    } else {
        2 * span - phase
    };
    let y = (cfg.height - cfg.square) / 2;
    Some((x, y))
}

/// Render frame `number` (1-based) and its ground-truth mask.
pub fn frame(cfg: &SynthConfig, number: u32) -> (GrayFrame, ForegroundMask) {
    let mut pixels = vec![cfg.background; cfg.width * cfg.height];
    let mut labels = vec![0u8; cfg.width * cfg.height];
    if let Some((x0, y0)) = square_origin(cfg, number) {
        for y in y0..y0 + cfg.square {
            for x in x0..x0 + cfg.square {
                pixels[y * cfg.width + x] = cfg.foreground;
                labels[y * cfg.width + x] = 255;
            }
        }
    }
    (
        GrayFrame::new(cfg.width, cfg.height, pixels).expect("valid by construction"),
        ForegroundMask::new(cfg.width, cfg.height, labels).expect("valid by construction"),
    )
}

/// Write the sequence as `synthetic/movingSquare/{input,groundtruth}` plus a
/// `temporalROI.txt` opening at `eval_from`.
pub fn write_dataset(cfg: &SynthConfig, root: &Path) -> Result<()> {
    let seq = root.join("synthetic").join("movingSquare");
    let input = seq.join("input");
    let gt = seq.join("groundtruth");
    std::fs::create_dir_all(&input)?;
    std::fs::create_dir_all(&gt)?;
    for number in 1..=cfg.frames as u32 {
        let (gray, mask) = frame(cfg, number);
        let img =
            image::GrayImage::from_raw(cfg.width as u32, cfg.height as u32, gray.pixels().to_vec())
                .expect("frame invariant guarantees the buffer size");
        let path = input.join(format!("in{number:06}.png"));
        img.save_with_format(&path, image::ImageFormat::Png)
            .map_err(|source| crate::error::Error::ImageFile { path, source })?;
        io::write_mask(&gt.join(format!("gt{number:06}.png")), &mask)?;
    }
    let eval_from = cfg.eval_from.clamp(1, cfg.frames as u32);
    std::fs::write(
        seq.join("temporalROI.txt"),
        format!("{} {}\n", eval_from, cfg.frames),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lead_in_frames_are_empty() {
        let cfg = SynthConfig::default();
        for number in 1..=cfg.lead_in as u32 {
            let (gray, mask) = frame(&cfg, number);
            assert_eq!(mask.foreground_count(), 0);
            assert!(gray.pixels().iter().all(|&v| v == cfg.background));
        }
    }

    #[test]
    fn square_stays_in_bounds_and_matches_ground_truth() {
        let cfg = SynthConfig::default();
        for number in 1..=cfg.frames as u32 {
            let (gray, mask) = frame(&cfg, number);
            let fg = mask.foreground_count();
            assert!(fg == 0 || fg == cfg.square * cfg.square, "frame {number}");
            for (idx, &label) in mask.labels().iter().enumerate() {
                let value = gray.pixels()[idx];
                if label == 255 {
                    assert_eq!(value, cfg.foreground);
                } else {
                    assert_eq!(value, cfg.background);
                }
            }
        }
    }

    #[test]
    fn square_moves_between_consecutive_frames() {
        let cfg = SynthConfig::default();
        let (_, a) = frame(&cfg, cfg.lead_in as u32 + 5);
        let (_, b) = frame(&cfg, cfg.lead_in as u32 + 6);
        assert_ne!(a, b);
    }

    #[test]
    fn written_dataset_is_loadable() {
        let cfg = SynthConfig {
            frames: 4,
            eval_from: 2,
            ..SynthConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&cfg, dir.path()).unwrap();

        let specs = crate::dataset::load_dataset(dir.path()).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].label(), "synthetic/movingSquare");
        assert_eq!(specs[0].temporal_roi, Some((2, 4)));

        let frames = crate::dataset::list_frames(&specs[0].input_dir, "in").unwrap();
        assert_eq!(frames.len(), 4);
        let gray = io::read_gray(&frames[0].1).unwrap();
        assert_eq!(gray.pixels()[0], cfg.background);
    }
}
