//! Sequence orchestration: every frame flows through grayscale conversion,
//! background subtraction, the buffer hand-off, the spiking kernel, and mask
//! post-processing; masks, timing, and evaluation reports are written per
//! run.

use std::path::Path;
use std::time::Instant;

use crate::config::RunConfig;
use crate::dataset::{list_frames, load_dataset, SequenceSpec};
use crate::dbs::{dbs_apply, dbs_init};
use crate::error::{Error, Result};
use crate::eval::{
    accumulate_confusion_masked, compute_metrics, compute_stats, rank_methods, write_metrics_csv,
    write_ranks_csv, write_timing_csv, ConfusionCounts, MetricsEntry, TimingRow, TimingStats,
};
use crate::frame::{mask_to_buffer, to_gray, GrayFrame};
use crate::io;
use crate::postproc::{finalize_mask, spikes_to_mask};
use crate::snn::{run_parallel, SnnState};

#[derive(Debug)]
pub struct SequenceOutcome {
    pub masks_written: usize,
    pub timing: TimingStats,
    pub timing_row: TimingRow,
    pub confusion: Option<ConfusionCounts>,
}

fn read_gray_checked(
    path: &Path,
    want: Option<(usize, usize)>,
) -> Result<(GrayFrame, usize, usize)> {
    let color = io::read_color(path)?;
    let gray = to_gray(&color);
    if let Some((w, h)) = want {
        if gray.width() != w || gray.height() != h {
            return Err(Error::DimensionMismatch {
                got_width: gray.width(),
                got_height: gray.height(),
                want_width: w,
                want_height: h,
            });
        }
    }
    let (w, h) = (gray.width(), gray.height());
    Ok((gray, w, h))
}

/// Process one sequence: write a `bin%06d.png` mask per input frame under
/// `<out>/<category>/<sequence>/`, record per-frame timing, and accumulate
/// confusion counts inside the ROI when ground truth is available.
pub fn process_sequence(spec: &SequenceSpec, cfg: &RunConfig) -> Result<SequenceOutcome> {
    cfg.validate()?;
    let frames = list_frames(&spec.input_dir, "in")?;
    if frames.is_empty() {
        return Err(Error::EmptySequence(spec.input_dir.clone()));
    }

    let out_dir = cfg.out_dir.join(&spec.category).join(&spec.sequence);
    std::fs::create_dir_all(&out_dir)?;

    let (first, width, height) = read_gray_checked(&frames[0].1, None)?;
    let mut model = dbs_init(&first, &cfg.dbs)?;
    let mut state = SnnState::new(width, height, &cfg.snn)?;

    let gt_frames = match &spec.gt_dir {
        Some(dir) => Some(list_frames(dir, "gt")?),
        None => None,
    };
    let spatial_roi = match &spec.spatial_roi {
        Some(path) => Some(io::read_mask(path)?),
        None => None,
    };

    let mut timings = Vec::with_capacity(frames.len());
    let mut confusion = gt_frames.as_ref().map(|_| ConfusionCounts::default());
    let mut masks_written = 0usize;

    for &(number, ref path) in &frames {
        let frame_start = Instant::now();
        let (gray, _, _) = read_gray_checked(path, Some((width, height)))?;

        let fg = dbs_apply(&mut model, &gray)?;
        let buffer = mask_to_buffer(&fg);

        if cfg.persist_vm {
            state.reset_sums();
        } else {
            state.reset(&cfg.snn);
        }
        let snn_start = Instant::now();
        let grid = run_parallel(cfg.kernel, &buffer, &cfg.snn, &mut state, cfg.lanes)?;
        let snn_seconds = snn_start.elapsed().as_secs_f64();

        let raw = spikes_to_mask(&grid, &cfg.post);
        let mask = finalize_mask(&raw, &cfg.post)?;
        io::write_mask(&out_dir.join(format!("bin{number:06}.png")), &mask)?;
        masks_written += 1;

        if let (Some(acc), Some(gt)) = (confusion.as_mut(), gt_frames.as_ref()) {
            if spec.in_temporal_roi(number) {
                if let Some((_, gt_path)) = gt.iter().find(|(n, _)| *n == number) {
                    let truth = io::read_gray(gt_path)?;
                    *acc = accumulate_confusion_masked(&mask, &truth, spatial_roi.as_ref(), *acc)?;
                }
            }
        }

        timings.push((snn_seconds, frame_start.elapsed().as_secs_f64()));
    }

    let timing = compute_stats(&timings)?;
    let timing_row = TimingRow {
        label: spec.label(),
        num_images: frames.len(),
        height,
        width,
        snn_seconds: timing.snn_seconds_mean,
        fps: timing.fps,
    };
    Ok(SequenceOutcome {
        masks_written,
        timing,
        timing_row,
        confusion,
    })
}

pub struct RunSummary {
    pub timing_rows: Vec<TimingRow>,
    /// (sequence label, error message) for every aborted sequence.
    pub failures: Vec<(String, String)>,
    pub metrics: Vec<MetricsEntry>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Process every sequence under `root` and write the reports into
/// `cfg.out_dir`: `timing.csv` always, `metrics.csv` and `ranks.csv` when
/// benchmarking is enabled and ground truth exists.
pub fn run(cfg: &RunConfig, root: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let specs = load_dataset(root)?;
    let method = format!("smd-{}", cfg.kernel);

    let mut timing_rows = Vec::new();
    let mut failures = Vec::new();
    let mut per_category: Vec<(String, ConfusionCounts)> = Vec::new();

    for spec in &specs {
        match process_sequence(spec, cfg) {
            Ok(outcome) => {
                timing_rows.push(outcome.timing_row);
                if let Some(counts) = outcome.confusion {
                    match per_category.iter_mut().find(|(c, _)| *c == spec.category) {
                        Some((_, acc)) => *acc += counts,
                        None => per_category.push((spec.category.clone(), counts)),
                    }
                }
            }
            Err(err) => {
                eprintln!("error: {}: {err}", spec.label());
                failures.push((spec.label(), err.to_string()));
            }
        }
    }

    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut timing_file = std::fs::File::create(cfg.out_dir.join("timing.csv"))?;
    write_timing_csv(&mut timing_file, &timing_rows)?;

    let mut metrics = Vec::new();
    if cfg.bench {
        if per_category.is_empty() {
            eprintln!("warning: benchmarking requested but no ground truth was found");
        } else {
            metrics = per_category
                .iter()
                .map(|(category, counts)| MetricsEntry {
                    method: method.clone(),
                    category: category.clone(),
                    metrics: compute_metrics(counts),
                })
                .collect();
            let mut metrics_file = std::fs::File::create(cfg.out_dir.join("metrics.csv"))?;
            write_metrics_csv(&mut metrics_file, &metrics)?;
            let table = rank_methods(&metrics)?;
            let mut ranks_file = std::fs::File::create(cfg.out_dir.join("ranks.csv"))?;
            write_ranks_csv(&mut ranks_file, &table)?;
        }
    }

    Ok(RunSummary {
        timing_rows,
        failures,
        metrics,
    })
}

/// Evaluate an existing mask tree (`<masks_root>/<category>/<sequence>/bin%06d.png`)
/// against the dataset's ground truth; one metric entry per category.
pub fn evaluate_masks(
    dataset_root: &Path,
    masks_root: &Path,
    method: &str,
) -> Result<Vec<MetricsEntry>> {
    let specs = load_dataset(dataset_root)?;
    let mut per_category: Vec<(String, ConfusionCounts)> = Vec::new();

    for spec in &specs {
        let Some(gt_dir) = &spec.gt_dir else {
            continue;
        };
        let mask_dir = masks_root.join(&spec.category).join(&spec.sequence);
        if !mask_dir.is_dir() {
            continue;
        }
        let spatial_roi = match &spec.spatial_roi {
            Some(path) => Some(io::read_mask(path)?),
            None => None,
        };
        let mut counts = ConfusionCounts::default();
        for (number, gt_path) in list_frames(gt_dir, "gt")? {
            if !spec.in_temporal_roi(number) {
                continue;
            }
            let mask_path = mask_dir.join(format!("bin{number:06}.png"));
            if !mask_path.is_file() {
                continue;
            }
            let mask = io::read_mask(&mask_path)?;
            let truth = io::read_gray(&gt_path)?;
            counts = accumulate_confusion_masked(&mask, &truth, spatial_roi.as_ref(), counts)?;
        }
        match per_category.iter_mut().find(|(c, _)| *c == spec.category) {
            Some((_, acc)) => *acc += counts,
            None => per_category.push((spec.category.clone(), counts)),
        }
    }

    Ok(per_category
        .into_iter()
        .map(|(category, counts)| MetricsEntry {
            method: method.to_string(),
            category,
            metrics: compute_metrics(&counts),
        })
        .collect())
}

/// Convenience wrapper for [`evaluate_masks`] over several result trees,
/// producing the cross-method rank table inputs.
pub fn evaluate_methods(
    dataset_root: &Path,
    methods: &[(String, std::path::PathBuf)],
) -> Result<Vec<MetricsEntry>> {
    let mut entries = Vec::new();
    for (name, masks_root) in methods {
        entries.extend(evaluate_masks(dataset_root, masks_root, name)?);
    }
    Ok(entries)
}
