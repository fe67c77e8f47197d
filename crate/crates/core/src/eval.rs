//! Change-detection evaluation: confusion counting under ground-truth label
//! rules, the eight quality metrics, per-category competition ranking, and
//! timing aggregation, plus the CSV report formats.

use std::io::{self, Write};
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::frame::{ForegroundMask, GrayFrame};

/// Ground-truth label conventions. Motion counts as positive, static
/// background and hard shadow as negative; out-of-ROI and unknown pixels are
/// excluded from counting.
pub mod gt {
    pub const STATIC: u8 = 0;
    pub const SHADOW: u8 = 50;
    pub const OUTSIDE_ROI: u8 = 85;
    pub const UNKNOWN: u8 = 170;
    pub const MOTION: u8 = 255;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tpc: u64,
    pub tnc: u64,
    pub fpc: u64,
    pub fnc: u64,
}

impl ConfusionCounts {
    pub fn new(tpc: u64, tnc: u64, fpc: u64, fnc: u64) -> Self {
        ConfusionCounts { tpc, tnc, fpc, fnc }
    }

    pub fn total(&self) -> u64 {
        self.tpc + self.tnc + self.fpc + self.fnc
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, rhs: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tpc: self.tpc + rhs.tpc,
            tnc: self.tnc + rhs.tnc,
            fpc: self.fpc + rhs.fpc,
            fnc: self.fnc + rhs.fnc,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: ConfusionCounts) {
        *self = *self + rhs;
    }
}

/// Count one frame into the accumulator.
///
/// `roi`, when given, excludes pixels whose mask value is zero in addition to
/// the excluded ground-truth labels.
pub fn accumulate_confusion_masked(
    result: &ForegroundMask,
    truth: &GrayFrame,
    roi: Option<&ForegroundMask>,
    mut acc: ConfusionCounts,
) -> Result<ConfusionCounts> {
    if result.width() != truth.width() || result.height() != truth.height() {
        return Err(Error::DimensionMismatch {
            got_width: result.width(),
            got_height: result.height(),
            want_width: truth.width(),
            want_height: truth.height(),
        });
    }
    if let Some(mask) = roi {
        if mask.width() != truth.width() || mask.height() != truth.height() {
            return Err(Error::DimensionMismatch {
                got_width: mask.width(),
                got_height: mask.height(),
                want_width: truth.width(),
                want_height: truth.height(),
            });
        }
    }

    for (i, (&label, &expected)) in result.labels().iter().zip(truth.pixels()).enumerate() {
        if let Some(mask) = roi {
            if mask.labels()[i] == 0 {
                continue;
            }
        }
        let detected = label == 255;
        match expected {
            gt::MOTION => {
                if detected {
                    acc.tpc += 1;
                } else {
                    acc.fnc += 1;
                }
            }
            gt::STATIC | gt::SHADOW => {
                if detected {
                    acc.fpc += 1;
                } else {
                    acc.tnc += 1;
                }
            }
            // out-of-ROI, unknown, and any stray label
            _ => {}
        }
    }
    Ok(acc)
}

pub fn accumulate_confusion(
    result: &ForegroundMask,
    truth: &GrayFrame,
    acc: ConfusionCounts,
) -> Result<ConfusionCounts> {
    accumulate_confusion_masked(result, truth, None, acc)
}

/// The eight quality metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub re: f64,
    pub sp: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub wcr: f64,
    pub ccr: f64,
    pub pr: f64,
    pub f1: f64,
}

pub const METRIC_COUNT: usize = 8;

impl MetricSet {
    /// Metrics in declaration order: Re, Sp, FPR, FNR, WCR, CCR, Pr, F1.
    pub fn as_array(&self) -> [f64; METRIC_COUNT] {
        [
            self.re, self.sp, self.fpr, self.fnr, self.wcr, self.ccr, self.pr, self.f1,
        ]
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    num as f64 / den as f64
}

/// Compute the metric set from raw counts.
///
/// A metric with a zero denominator is 0, except when there are no errors of
/// the corresponding kind, in which case the classification is perfect and
/// the metric is 1 (e.g. tp+fn = 0 with fp = 0 gives Re = 1).
pub fn compute_metrics(c: &ConfusionCounts) -> MetricSet {
    let total = c.total();
    let re = if c.tpc + c.fnc > 0 {
        ratio(c.tpc, c.tpc + c.fnc)
    } else if c.fpc == 0 {
        1.0
    } else {
        0.0
    };
    let pr = if c.tpc + c.fpc > 0 {
        ratio(c.tpc, c.tpc + c.fpc)
    } else if c.fnc == 0 {
        1.0
    } else {
        0.0
    };
    let sp = if c.tnc + c.fpc > 0 {
        ratio(c.tnc, c.tnc + c.fpc)
    } else if c.fnc == 0 {
        1.0
    } else {
        0.0
    };
    let fpr = if c.fpc + c.tnc > 0 {
        ratio(c.fpc, c.fpc + c.tnc)
    } else {
        0.0
    };
    let fnr = if c.fnc + c.tpc > 0 {
        ratio(c.fnc, c.fnc + c.tpc)
    } else {
        0.0
    };
    let (wcr, ccr) = if total > 0 {
        (ratio(c.fnc + c.fpc, total), ratio(c.tpc + c.tnc, total))
    } else {
        (0.0, 1.0)
    };
    let f1 = if pr + re > 0.0 {
        2.0 * pr * re / (pr + re)
    } else {
        0.0
    };
    MetricSet {
        re,
        sp,
        fpr,
        fnr,
        wcr,
        ccr,
        pr,
        f1,
    }
}

/// Metric values for one method in one category.
#[derive(Debug, Clone)]
pub struct MetricsEntry {
    pub method: String,
    pub category: String,
    pub metrics: MetricSet,
}

/// Ranking direction per metric, in [`MetricSet::as_array`] order.
/// `true` means higher is better.
const DESCENDING: [bool; METRIC_COUNT] = [true, true, false, false, false, true, true, true];

pub const METRIC_NAMES: [&str; METRIC_COUNT] = ["Re", "Sp", "FPR", "FNR", "WCR", "CCR", "Pr", "F1"];

/// Competition ranks per (method, category, metric) with the per-category
/// average `r` and the cross-category average `rc`.
#[derive(Debug, Clone)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub categories: Vec<String>,
    /// Indexed [method][category][metric].
    pub per_category_ranks: Vec<Vec<[f64; METRIC_COUNT]>>,
    /// Mean of the eight metric ranks, indexed [method][category].
    pub r: Vec<Vec<f64>>,
    /// Mean of `r` across categories, indexed [method].
    pub rc: Vec<f64>,
    /// Mean rank per metric across categories, indexed [method][metric].
    pub metric_rank_means: Vec<[f64; METRIC_COUNT]>,
}

/// Rank methods within every (category, metric) cell by the metric's stated
/// direction; ties share the minimum rank.
pub fn rank_methods(entries: &[MetricsEntry]) -> Result<RankTable> {
    let mut methods: Vec<String> = Vec::new();
    let mut categories: Vec<String> = Vec::new();
    for e in entries {
        if !methods.contains(&e.method) {
            methods.push(e.method.clone());
        }
        if !categories.contains(&e.category) {
            categories.push(e.category.clone());
        }
    }

    // values[method][category]
    let mut values: Vec<Vec<Option<[f64; METRIC_COUNT]>>> =
        vec![vec![None; categories.len()]; methods.len()];
    for e in entries {
        let m = methods.iter().position(|x| *x == e.method).unwrap();
        let c = categories.iter().position(|x| *x == e.category).unwrap();
        values[m][c] = Some(e.metrics.as_array());
    }
    for (m, row) in values.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if cell.is_none() {
                return Err(Error::MissingRankEntry {
                    method: methods[m].clone(),
                    category: categories[c].clone(),
                });
            }
        }
    }

    let n_methods = methods.len();
    let mut per_category_ranks = vec![vec![[0.0; METRIC_COUNT]; categories.len()]; n_methods];
    for c in 0..categories.len() {
        for k in 0..METRIC_COUNT {
            for m in 0..n_methods {
                let mine = values[m][c].unwrap()[k];
                let better = (0..n_methods)
                    .filter(|&other| {
                        let theirs = values[other][c].unwrap()[k];
                        if DESCENDING[k] {
                            theirs > mine
                        } else {
                            theirs < mine
                        }
                    })
                    .count();
                per_category_ranks[m][c][k] = (better + 1) as f64;
            }
        }
    }

    let r: Vec<Vec<f64>> = per_category_ranks
        .iter()
        .map(|per_cat| {
            per_cat
                .iter()
                .map(|ranks| ranks.iter().sum::<f64>() / METRIC_COUNT as f64)
                .collect()
        })
        .collect();
    let rc: Vec<f64> = r
        .iter()
        .map(|per_cat| per_cat.iter().sum::<f64>() / per_cat.len() as f64)
        .collect();
    let metric_rank_means: Vec<[f64; METRIC_COUNT]> = per_category_ranks
        .iter()
        .map(|per_cat| {
            let mut means = [0.0; METRIC_COUNT];
            for ranks in per_cat {
                for (mean, rank) in means.iter_mut().zip(ranks) {
                    *mean += rank;
                }
            }
            for mean in &mut means {
                *mean /= per_cat.len() as f64;
            }
            means
        })
        .collect();

    Ok(RankTable {
        methods,
        categories,
        per_category_ranks,
        r,
        rc,
        metric_rank_means,
    })
}

/// Per-sequence timing aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingStats {
    pub frames: usize,
    /// Mean seconds per frame spent in the SNN kernel.
    pub snn_seconds_mean: f64,
    /// Frames per second over the whole pipeline.
    pub fps: f64,
}

/// Aggregate per-frame `(snn_seconds, total_seconds)` samples.
pub fn compute_stats(frame_timings: &[(f64, f64)]) -> Result<TimingStats> {
    if frame_timings.is_empty() {
        return Err(Error::EmptyTimings);
    }
    let frames = frame_timings.len();
    let snn_sum: f64 = frame_timings.iter().map(|t| t.0).sum();
    let total: f64 = frame_timings.iter().map(|t| t.1).sum();
    Ok(TimingStats {
        frames,
        snn_seconds_mean: snn_sum / frames as f64,
        fps: frames as f64 / total,
    })
}

/// One row of the timing report.
#[derive(Debug, Clone)]
pub struct TimingRow {
    /// `category/sequence`
    pub label: String,
    pub num_images: usize,
    pub height: usize,
    pub width: usize,
    pub snn_seconds: f64,
    pub fps: f64,
}

pub fn write_timing_csv<W: Write>(out: &mut W, rows: &[TimingRow]) -> io::Result<()> {
    writeln!(
        out,
        "category/sequence,num_images,height,width,snn_seconds,fps"
    )?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{:.4},{:.2}",
            row.label, row.num_images, row.height, row.width, row.snn_seconds, row.fps
        )?;
    }
    Ok(())
}

pub fn write_metrics_csv<W: Write>(out: &mut W, entries: &[MetricsEntry]) -> io::Result<()> {
    writeln!(out, "method,category,Re,Sp,FPR,FNR,WCR,CCR,Pr,F1")?;
    for e in entries {
        let m = &e.metrics;
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            e.method, e.category, m.re, m.sp, m.fpr, m.fnr, m.wcr, m.ccr, m.pr, m.f1
        )?;
    }
    Ok(())
}

/// Rank report, one row per method. Per-metric columns hold the mean rank of
/// that metric across categories; RC is the mean of the eight.
pub fn write_ranks_csv<W: Write>(out: &mut W, table: &RankTable) -> io::Result<()> {
    writeln!(
        out,
        "method,RC,Re_rank,Sp_rank,FPR_rank,FNR_rank,WCR_rank,CCR_rank,F1_rank,Pr_rank"
    )?;
    for (m, method) in table.methods.iter().enumerate() {
        let means = &table.metric_rank_means[m];
        // report column order puts F1 before Pr
        let ordered = [
            means[0], means[1], means[2], means[3], means[4], means[5], means[7], means[6],
        ];
        write!(out, "{},{:.4}", method, table.rc[m])?;
        for rank in ordered {
            write!(out, ",{rank:.4}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
