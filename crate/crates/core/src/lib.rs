//! Object-motion detection built from dynamic background subtraction feeding
//! a per-pixel three-layer spiking network, with a change-detection
//! evaluation and ranking harness.
//!
//! The pipeline per frame: grayscale conversion, background subtraction,
//! hand-off of the foreground values as a flat kernel buffer, the spiking
//! kernel (full-sweep `v1` or zero-skipping `v2`) over a deterministic
//! chunked executor, and average-filter post-processing into the final
//! motion mask.

pub mod config;
pub mod dataset;
pub mod dbs;
pub mod error;
pub mod eval;
pub mod frame;
pub mod io;
pub mod pipeline;
pub mod postproc;
pub mod snn;
pub mod synth;

pub use config::RunConfig;
pub use dataset::SequenceSpec;
pub use dbs::{dbs_apply, dbs_init, DbsConfig, DbsModel};
pub use error::{Error, Result};
pub use eval::{
    accumulate_confusion, compute_metrics, compute_stats, rank_methods, ConfusionCounts, MetricSet,
    MetricsEntry, RankTable, TimingStats,
};
pub use frame::{
    binarize, mask_to_buffer, to_gray, ColorFrame, ForegroundMask, GrayFrame, KernelBuffer,
};
pub use postproc::{average_filter, finalize_mask, spikes_to_mask, PostprocConfig};
pub use snn::{
    lif_step, run_parallel, snn_frame_v1, snn_frame_v2, Kernel, SnnParams, SnnState, SpikeSumGrid,
};
