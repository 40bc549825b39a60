use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use segeval::io::{save_mask_file, MaskFormat};
use segeval::mask::Connectivity;
use segeval::report::{self, MetricName, OutputFormat, RunConfig};
use segeval::stats::{QualityThresholds, DEFAULT_ALPHA};
use segeval::synth::{generate, ScenarioName, ScenarioSpec};
use segeval::{Error, Result};

#[derive(Parser)]
#[command(name = "segeval", version, about = "Segmentation evaluation metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Comma-separated label IDs to evaluate.
    #[arg(long, default_value = "1")]
    labels: String,
    #[arg(long, default_value_t = 8)]
    connectivity: u8,
    /// `all` or a comma-separated metric list.
    #[arg(long, default_value = "all")]
    metrics: String,
    #[arg(long, default_value = "json")]
    format: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print shortest round-trip values instead of 4 decimals.
    #[arg(long)]
    full_precision: bool,
}

impl EvalArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            metrics: MetricName::parse_list(&self.metrics)?,
            labels: report::parse_labels(&self.labels)?,
            connectivity: Connectivity::from_neighbors(self.connectivity)?,
            format: self.format.parse()?,
            full_precision: self.full_precision,
            ..Default::default()
        };
        if let Some(n) = report::parallelism_from_env() {
            cfg.parallelism = n;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one ground truth / prediction pair.
    Evaluate {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Evaluate every stem-matched pair of two directories.
    Batch {
        #[arg(long)]
        gt_dir: PathBuf,
        #[arg(long)]
        pred_dir: PathBuf,
        /// Pairs evaluated concurrently (SEGEVAL_THREADS overrides).
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Welch's t-test of a metric between good and bad segmentations of a report CSV.
    Compare {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Threshold overrides, e.g. `good_tpr_min=0.9,fpr=conventional`.
        #[arg(long, default_value = "")]
        thresholds: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean absolute deviation of report metrics from mean opinion scores.
    Mos {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        mos: PathBuf,
        #[arg(long)]
        metrics: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        full_precision: bool,
    },
    /// Write a synthetic scenario as DIR/gt/NAME.EXT and DIR/pred/NAME.EXT.
    Synth {
        /// Scenario name, or `all`.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ring_offset: Option<usize>,
        #[arg(long, default_value = "png")]
        image_format: String,
    },
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(Error::from),
        None => io::stdout().write_all(bytes).map_err(Error::from),
    }
}

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate { gt, pred, eval } => {
            let cfg = eval.config()?;
            let r = report::evaluate_pair(&gt, &pred, &cfg)?;
            warn_all(&r.warnings);
            let bytes = match cfg.format {
                OutputFormat::Json => json_bytes(&report::report_to_json(&r, cfg.full_precision))?,
                OutputFormat::Csv => {
                    let mut b = Vec::new();
                    report::write_reports_csv(&mut b, std::slice::from_ref(&r), &cfg.metrics, cfg.full_precision)?;
                    b
                }
            };
            emit(eval.out.as_deref(), &bytes)
        }
        Command::Batch {
            gt_dir,
            pred_dir,
            threads,
            eval,
        } => {
            let mut cfg = eval.config()?;
            if let (Some(t), None) = (threads, report::parallelism_from_env()) {
                cfg.parallelism = t;
            }
            let b = report::evaluate_batch(&gt_dir, &pred_dir, &cfg)?;
            warn_all(&b.warnings);
            let bytes = match cfg.format {
                OutputFormat::Json => json_bytes(&report::batch_to_json(&b, cfg.full_precision))?,
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    report::write_batch_csv(&mut buf, &b, &cfg.metrics, cfg.full_precision)?;
                    buf
                }
            };
            emit(eval.out.as_deref(), &bytes)
        }
        Command::Compare {
            report: path,
            metric,
            alpha,
            thresholds,
            format,
            out,
        } => {
            let t = QualityThresholds::default().with_overrides(&thresholds)?;
            let table = report::compare_command(&path, &metric, &t, alpha)?;
            warn_all(&table.warnings);
            let bytes = match format.parse()? {
                OutputFormat::Json => json_bytes(&report::compare_to_json(&table, false))?,
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    report::write_compare_csv(&mut buf, std::slice::from_ref(&table), false)?;
                    buf
                }
            };
            emit(out.as_deref(), &bytes)
        }
        Command::Mos {
            report: path,
            mos,
            metrics,
            format,
            out,
            full_precision,
        } => {
            let metrics: Vec<String> = metrics
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            let table = report::mos_command(&path, &mos, &metrics)?;
            warn_all(&table.warnings);
            let bytes = match format.parse()? {
                OutputFormat::Json => json_bytes(&report::mos_to_json(&table, full_precision))?,
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    report::write_mos_csv(&mut buf, &table, full_precision)?;
                    buf
                }
            };
            emit(out.as_deref(), &bytes)
        }
        Command::Synth {
            scenario,
            out,
            seed,
            ring_offset,
            image_format,
        } => {
            let format: MaskFormat = image_format.parse()?;
            let names: Vec<ScenarioName> = if scenario == "all" {
                ScenarioName::ALL.to_vec()
            } else {
                vec![scenario.parse()?]
            };
            for sub in ["gt", "pred"] {
                fs::create_dir_all(out.join(sub))?;
            }
            for name in names {
                let mut spec = ScenarioSpec::new(name).with_seed(seed);
                if let Some(k) = ring_offset {
                    spec = spec.with_ring_offset(k);
                }
                let (gt, pred) = generate(&spec)?;
                let file = format!("{name}.{}", format.extension());
                save_mask_file(out.join("gt").join(&file), &gt, format)?;
                save_mask_file(out.join("pred").join(&file), &pred, format)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
