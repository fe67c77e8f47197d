//! `smd` — run the motion-detection pipeline over a dataset tree, rank
//! existing result trees, or generate a synthetic demo dataset.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use smd_core::eval::{rank_methods, write_metrics_csv, write_ranks_csv};
use smd_core::pipeline::{evaluate_methods, run};
use smd_core::synth::{write_dataset, SynthConfig};
use smd_core::RunConfig;

#[derive(Parser)]
#[command(
    name = "smd",
    version,
    about = "Spiking motion detection over image sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process every sequence in a dataset and write masks and reports.
    Run(RunArgs),
    /// Evaluate and rank existing result trees against a dataset's ground truth.
    Rank(RankArgs),
    /// Write a synthetic moving-square dataset with ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Dataset root containing <category>/<sequence>/input directories.
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory for masks and CSV reports.
    #[arg(long)]
    out: PathBuf,
    /// Kernel variant: v1 (full sweep) or v2 (skips zero pixels).
    #[arg(long)]
    kernel: Option<String>,
    /// Worker lanes, a power of two.
    #[arg(long)]
    lanes: Option<usize>,
    /// Compute metrics and ranks against ground truth.
    #[arg(long)]
    bench: bool,
    /// Seed for the background model's random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Configuration file with key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a single configuration key, e.g. --set snn.steps=20.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RankArgs {
    /// Dataset root providing the ground truth.
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory for metrics.csv and ranks.csv.
    #[arg(long)]
    out: PathBuf,
    /// Result tree to rank, as NAME=DIR; repeat for several methods.
    #[arg(long = "method", value_name = "NAME=DIR", required = true)]
    methods: Vec<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to create the dataset in.
    #[arg(long)]
    out: PathBuf,
    /// Number of frames to generate.
    #[arg(long, default_value_t = 200)]
    frames: usize,
}

fn build_config(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)
            .with_context(|| format!("loading {}", path.display()))?;
    }
    for pair in &args.set {
        let Some((key, value)) = pair.split_once('=') else {
            bail!("--set expects KEY=VALUE, got `{pair}`");
        };
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(kernel) = &args.kernel {
        cfg.kernel = kernel.parse()?;
    }
    if let Some(lanes) = args.lanes {
        cfg.lanes = lanes;
    }
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    cfg.out_dir = args.out.clone();
    cfg.bench = args.bench;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = build_config(&args)?;
    let summary = run(&cfg, &args.dataset)?;
    if summary.timing_rows.is_empty() && summary.failures.is_empty() {
        eprintln!(
            "warning: no sequences found under {}",
            args.dataset.display()
        );
    }
    for row in &summary.timing_rows {
        eprintln!(
            "{}: {} frames, snn {:.4} s/frame, {:.2} fps",
            row.label, row.num_images, row.snn_seconds, row.fps
        );
    }
    for (label, message) in &summary.failures {
        eprintln!("failed: {label}: {message}");
    }
    Ok(if summary.exit_code() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_rank(args: RankArgs) -> anyhow::Result<ExitCode> {
    let mut methods = Vec::new();
    for pair in &args.methods {
        let Some((name, dir)) = pair.split_once('=') else {
            bail!("--method expects NAME=DIR, got `{pair}`");
        };
        methods.push((name.trim().to_string(), PathBuf::from(dir.trim())));
    }

    let entries = evaluate_methods(&args.dataset, &methods)?;
    if entries.is_empty() {
        bail!("no ground truth overlapped the given result trees");
    }
    std::fs::create_dir_all(&args.out)?;
    let mut metrics_file = std::fs::File::create(args.out.join("metrics.csv"))?;
    write_metrics_csv(&mut metrics_file, &entries)?;
    let table = rank_methods(&entries)?;
    let mut ranks_file = std::fs::File::create(args.out.join("ranks.csv"))?;
    write_ranks_csv(&mut ranks_file, &table)?;

    for (i, method) in table.methods.iter().enumerate() {
        eprintln!("{method}: RC {:.4}", table.rc[i]);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<ExitCode> {
    let cfg = SynthConfig {
        frames: args.frames,
        ..SynthConfig::default()
    };
    write_dataset(&cfg, &args.out)?;
    eprintln!(
        "wrote {} frames to {}",
        cfg.frames,
        args.out.join("synthetic/movingSquare").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
