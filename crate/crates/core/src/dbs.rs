//! Dynamic background subtraction.
//!
//! A sample-consensus model: every pixel keeps a small reservoir of
//! background intensities, a pixel is background when enough samples lie
//! within a radius of its current value, and background pixels stochastically
//! refresh their own reservoir and one neighbor's. All randomness is drawn
//! from per-pixel streams derived from the configured seed and the frame
//! counter, so the mask sequence is a pure function of
//! (first frame, subsequent frames, seed).
//!
//! The stage interface is `GrayFrame -> ForegroundMask`; any subtractor with
//! the same contract can be swapped in behind it.

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::frame::{ForegroundMask, GrayFrame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbsConfig {
    /// Background samples kept per pixel.
    pub samples_per_pixel: usize,
    /// Maximum intensity distance for a sample to count as a match.
    pub match_radius: u8,
    /// Matches required to call a pixel background.
    pub min_matches: usize,
    /// Probability that a background pixel refreshes one of its own samples.
    pub replace_rate: f64,
    /// Probability that a background pixel refreshes a random neighbor's sample.
    pub neighbor_rate: f64,
    pub seed: u64,
}

impl Default for DbsConfig {
    fn default() -> Self {
        DbsConfig {
            samples_per_pixel: 20,
            match_radius: 20,
            min_matches: 2,
            replace_rate: 1.0 / 16.0,
            neighbor_rate: 1.0 / 16.0,
            seed: 0,
        }
    }
}

impl DbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_pixel < 1 {
            return Err(Error::invalid_config("dbs.samples", "must be >= 1"));
        }
        if self.min_matches > self.samples_per_pixel {
            return Err(Error::invalid_config(
                "dbs.min_matches",
                "must not exceed dbs.samples",
            ));
        }
        for (key, rate) in [
            ("dbs.replace_rate", self.replace_rate),
            ("dbs.neighbor_rate", self.neighbor_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::invalid_config(key, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Per-pixel background sample reservoirs plus the frame counter that drives
/// the per-pixel random streams.
#[derive(Debug, Clone)]
pub struct DbsModel {
    width: usize,
    height: usize,
    cfg: DbsConfig,
    /// Pixel-major: samples for pixel i live at [i*spp, (i+1)*spp).
    samples: Vec<u8>,
    frames_seen: u64,
}

/// Two rounds of splitmix64 fold (seed, frame, pixel) into one stream id.
fn stream_seed(seed: u64, frame: u64, pixel: u64) -> u64 {
    fn splitmix64(mut x: u64) -> u64 {
        x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^ (x >> 31)
    }
    splitmix64(seed ^ splitmix64(frame ^ splitmix64(pixel)))
}

const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn clamped_neighbor(x: usize, y: usize, width: usize, height: usize, pick: usize) -> usize {
    let (dx, dy) = NEIGHBOR_OFFSETS[pick];
    let nx = (x as isize + dx).clamp(0, width as isize - 1) as usize;
    let ny = (y as isize + dy).clamp(0, height as isize - 1) as usize;
    ny * width + nx
}

/// Seed a model from the first frame: each reservoir starts with the pixel's
/// own intensity plus random picks from its 8-neighborhood (clamped at the
/// borders).
pub fn dbs_init(first: &GrayFrame, cfg: &DbsConfig) -> Result<DbsModel> {
    cfg.validate()?;
    let (width, height) = (first.width(), first.height());
    let spp = cfg.samples_per_pixel;
    let mut samples = vec![0u8; width * height * spp];

    for y in 0..height {
        for x in 0..width {
            let idx = y * width + x;
            let mut rng = SmallRng::seed_from_u64(stream_seed(cfg.seed, 0, idx as u64));
            let reservoir = &mut samples[idx * spp..(idx + 1) * spp];
            reservoir[0] = first.pixels()[idx];
            for slot in &mut reservoir[1..] {
                let pick = rng.gen_range(0..NEIGHBOR_OFFSETS.len());
                *slot = first.pixels()[clamped_neighbor(x, y, width, height, pick)];
            }
        }
    }

    Ok(DbsModel {
        width,
        height,
        cfg: *cfg,
        samples,
        frames_seen: 0,
    })
}

impl DbsModel {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn config(&self) -> &DbsConfig {
        &self.cfg
    }

    pub fn samples_for(&self, x: usize, y: usize) -> &[u8] {
        let spp = self.cfg.samples_per_pixel;
        let idx = y * self.width + x;
        &self.samples[idx * spp..(idx + 1) * spp]
    }

    fn matches(&self, idx: usize, value: u8) -> usize {
        let spp = self.cfg.samples_per_pixel;
        let radius = self.cfg.match_radius as i16;
        self.samples[idx * spp..(idx + 1) * spp]
            .iter()
            .filter(|&&s| (s as i16 - value as i16).abs() <= radius)
            .count()
    }
}

/// Classify one frame and evolve the model.
///
/// Labels are decided for the whole frame first; reservoir updates are then
/// applied in row-major order so the neighbor writes land in a fixed order.
/// Foreground pixels never touch the model.
pub fn dbs_apply(model: &mut DbsModel, frame: &GrayFrame) -> Result<ForegroundMask> {
    if frame.width() != model.width || frame.height() != model.height {
        return Err(Error::DimensionMismatch {
            got_width: frame.width(),
            got_height: frame.height(),
            want_width: model.width,
            want_height: model.height,
        });
    }

    let (width, height) = (model.width, model.height);
    let spp = model.cfg.samples_per_pixel;
    model.frames_seen += 1;

    let labels: Vec<u8> = frame
        .pixels()
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            if model.matches(idx, v) >= model.cfg.min_matches {
                0
            } else {
                255
            }
        })
        .collect();

    for y in 0..height {
        for x in 0..width {
            let idx = y * width + x;
            if labels[idx] != 0 {
                continue;
            }
            let value = frame.pixels()[idx];
            let mut rng =
                SmallRng::seed_from_u64(stream_seed(model.cfg.seed, model.frames_seen, idx as u64));
            if rng.gen::<f64>() < model.cfg.replace_rate {
                let slot = rng.gen_range(0..spp);
                model.samples[idx * spp + slot] = value;
            }
            if rng.gen::<f64>() < model.cfg.neighbor_rate {
                let pick = rng.gen_range(0..NEIGHBOR_OFFSETS.len());
                let neighbor = clamped_neighbor(x, y, width, height, pick);
                let slot = rng.gen_range(0..spp);
                model.samples[neighbor * spp + slot] = value;
            }
        }
    }

    ForegroundMask::new(width, height, labels)
}
