//! Per-pair evaluation reports, batch orchestration and the report-level
//! analyses (significance table, MOS deviation table).

mod analysis;
mod batch;
mod emit;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use analysis::{compare_command, compare_rows, mos_command, mos_from_rows, read_report_rows, CompareTable, MosRow, MosTable, ReportRow};
pub use batch::{evaluate_batch, pair_by_stem, BatchReport, MetricSummary, StemPairs};
pub use emit::{
    batch_to_json, compare_to_json, format_value, mos_to_json, report_to_json, write_batch_csv, write_compare_csv,
    write_mos_csv, write_reports_csv, SUMMARY_STEM,
};

use crate::classic::{self, MetricValue};
use crate::error::{Error, Result};
use crate::io::load_mask_file;
use crate::mask::{boundary, confusion_counts, Connectivity, ConfusionCounts, Label, LabelMask};
use crate::ssegep::ssegep;
use crate::stats::QualityThresholds;

/// Environment variable overriding batch parallelism.
pub const THREADS_ENV: &str = "SEGEVAL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Accuracy,
    Sensitivity,
    Specificity,
    Ppv,
    Iou,
    Dice,
    Mcc,
    Hausdorff,
    GeneralizedDice,
    Ssegep,
}

impl MetricName {
    pub const ALL: [MetricName; 10] = [
        MetricName::Accuracy,
        MetricName::Sensitivity,
        MetricName::Specificity,
        MetricName::Ppv,
        MetricName::Iou,
        MetricName::Dice,
        MetricName::Mcc,
        MetricName::Hausdorff,
        MetricName::GeneralizedDice,
        MetricName::Ssegep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Accuracy => "accuracy",
            MetricName::Sensitivity => "sensitivity",
            MetricName::Specificity => "specificity",
            MetricName::Ppv => "ppv",
            MetricName::Iou => "iou",
            MetricName::Dice => "dice",
            MetricName::Mcc => "mcc",
            MetricName::Hausdorff => "hausdorff",
            MetricName::GeneralizedDice => "generalized_dice",
            MetricName::Ssegep => "ssegep",
        }
    }

    /// Whether the metric is reported on per-label rows.
    pub fn per_label(self) -> bool {
        self != MetricName::GeneralizedDice
    }

    /// Whether the metric is reported on the pooled `ALL` row.
    pub fn pooled(self) -> bool {
        self != MetricName::Hausdorff
    }

    /// Parses `all` or a comma-separated list; result is in canonical order
    /// without duplicates.
    pub fn parse_list(s: &str) -> Result<Vec<MetricName>> {
        if s.trim() == "all" {
            return Ok(MetricName::ALL.to_vec());
        }
        let mut out: Vec<MetricName> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidArgument("metric list is empty".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metrics: Vec<MetricName>,
    pub labels: Vec<Label>,
    pub connectivity: Connectivity,
    pub thresholds: QualityThresholds,
    pub format: OutputFormat,
    pub parallelism: usize,
    /// Emit shortest round-trip values instead of 4 decimals.
    pub full_precision: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metrics: MetricName::ALL.to_vec(),
            labels: vec![1],
            connectivity: Connectivity::Eight,
            thresholds: QualityThresholds::default(),
            format: OutputFormat::Json,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            full_precision: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::InvalidArgument("label list is empty".into()));
        }
        if self.labels.contains(&0) {
            return Err(Error::InvalidArgument("label 0 is background and cannot be evaluated".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidArgument("metric list is empty".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidArgument("parallelism must be at least 1".into()));
        }
        self.thresholds.validate()
    }

    pub fn wants(&self, m: MetricName) -> bool {
        self.metrics.contains(&m)
    }
}

/// Parses a label list such as `1,2`.
pub fn parse_labels(s: &str) -> Result<Vec<Label>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let l: Label = tok
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("label {tok:?} is not in 1..=255")))?;
        if l == 0 {
            return Err(Error::InvalidArgument("label 0 is background".into()));
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("label list is empty".into()));
    }
    Ok(out)
}

/// Reads the thread count from `SEGEVAL_THREADS`, if set to a positive integer.
pub fn parallelism_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Metric values of one scope. `None` marks a metric with no value at all
/// (Hausdorff with an empty boundary, generalized Dice with no GT labels).
pub type MetricMap = BTreeMap<MetricName, Option<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelReport {
    pub label: Label,
    pub counts: ConfusionCounts,
    pub metrics: MetricMap,
    /// Metrics whose denominator was zero; their value is the documented fallback.
    pub undefined: Vec<MetricName>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsegepSummary {
    pub score: f64,
    pub n_segments: usize,
    pub weighted_tp: f64,
    pub weighted_fp: f64,
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledReport {
    /// Sums of the per-label counts.
    pub counts: ConfusionCounts,
    pub metrics: MetricMap,
    pub undefined: Vec<MetricName>,
    pub ssegep: Option<SsegepSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub stem: String,
    pub gt_path: String,
    pub pred_path: String,
    pub per_label: Vec<LabelReport>,
    pub pooled: PooledReport,
    pub warnings: Vec<String>,
}

fn record(
    metrics: &mut MetricMap,
    undefined: &mut Vec<MetricName>,
    warnings: &mut Vec<String>,
    scope: &str,
    name: MetricName,
    v: MetricValue,
) {
    if !v.defined {
        undefined.push(name);
        warnings.push(format!("{scope}: {name} undefined (zero denominator), reported as {}", v.value));
    }
    metrics.insert(name, Some(v.value));
}

type CountMetric = fn(&ConfusionCounts) -> MetricValue;

fn count_metrics(
    c: &ConfusionCounts,
    cfg: &RunConfig,
    scope: &str,
    metrics: &mut MetricMap,
    undefined: &mut Vec<MetricName>,
    warnings: &mut Vec<String>,
) {
    let table: [(MetricName, CountMetric); 7] = [
        (MetricName::Accuracy, classic::accuracy),
        (MetricName::Sensitivity, classic::sensitivity),
        (MetricName::Specificity, classic::specificity),
        (MetricName::Ppv, classic::ppv),
        (MetricName::Iou, classic::iou),
        (MetricName::Dice, classic::dice),
        (MetricName::Mcc, classic::mcc),
    ];
    for (name, f) in table {
        if cfg.wants(name) {
            record(metrics, undefined, warnings, scope, name, f(c));
        }
    }
}

/// Evaluates one in-memory ground truth / prediction pair.
pub fn evaluate_masks(stem: &str, gt: &LabelMask, pred: &LabelMask, cfg: &RunConfig) -> Result<MetricReport> {
    cfg.validate()?;
    gt.ensure_same_dims(pred)?;
    let mut warnings = Vec::new();

    let breakdown = if cfg.wants(MetricName::Ssegep) {
        Some(ssegep(gt, pred, &cfg.labels, cfg.connectivity)?)
    } else {
        None
    };

    let mut per_label = Vec::with_capacity(cfg.labels.len());
    let mut pooled_counts = ConfusionCounts::default();
    for (i, &label) in cfg.labels.iter().enumerate() {
        let scope = format!("label {label}");
        let counts = confusion_counts(gt, pred, label)?;
        pooled_counts = pooled_counts + counts;
        let mut metrics = MetricMap::new();
        let mut undefined = Vec::new();
        count_metrics(&counts, cfg, &scope, &mut metrics, &mut undefined, &mut warnings);

        if cfg.wants(MetricName::Hausdorff) {
            let hd = classic::hausdorff(&boundary(gt, label), &boundary(pred, label));
            match hd {
                Ok(v) => {
                    metrics.insert(MetricName::Hausdorff, Some(v.value));
                }
                Err(e) => {
                    undefined.push(MetricName::Hausdorff);
                    warnings.push(format!("{scope}: {e}"));
                    metrics.insert(MetricName::Hausdorff, None);
                }
            }
        }
        if let Some(b) = &breakdown {
            let ls = &b.per_label[i];
            if ls.vacuous {
                undefined.push(MetricName::Ssegep);
                warnings.push(format!(
                    "{scope}: ssegep vacuous (label absent from ground truth), reported as {}",
                    ls.score
                ));
            }
            metrics.insert(MetricName::Ssegep, Some(ls.score));
        }
        undefined.sort();
        per_label.push(LabelReport {
            label,
            counts,
            metrics,
            undefined,
        });
    }

    let mut metrics = MetricMap::new();
    let mut undefined = Vec::new();
    count_metrics(&pooled_counts, cfg, "ALL", &mut metrics, &mut undefined, &mut warnings);
    if cfg.wants(MetricName::GeneralizedDice) {
        match classic::generalized_dice(gt, pred, &cfg.labels) {
            Ok(gd) => {
                if !gd.skipped.is_empty() {
                    warnings.push(format!(
                        "ALL: generalized_dice skipped labels absent from ground truth: {:?}",
                        gd.skipped
                    ));
                }
                metrics.insert(MetricName::GeneralizedDice, Some(gd.value.value));
            }
            Err(Error::NoLabelsInGroundTruth(_)) => {
                undefined.push(MetricName::GeneralizedDice);
                warnings.push("ALL: generalized_dice undefined (no requested label in ground truth)".into());
                metrics.insert(MetricName::GeneralizedDice, None);
            }
            Err(e) => return Err(e),
        }
    }
    let ssegep_summary = breakdown.map(|b| {
        if b.vacuous {
            undefined.push(MetricName::Ssegep);
            warnings.push(format!(
                "ALL: ssegep vacuous (no requested label in ground truth), reported as {}",
                b.score
            ));
        }
        metrics.insert(MetricName::Ssegep, Some(b.score));
        SsegepSummary {
            score: b.score,
            n_segments: b.n_segments,
            weighted_tp: b.weighted_tp(),
            weighted_fp: b.weighted_fp(),
            vacuous: b.vacuous,
        }
    });
    undefined.sort();

    Ok(MetricReport {
        stem: stem.to_string(),
        gt_path: String::new(),
        pred_path: String::new(),
        per_label,
        pooled: PooledReport {
            counts: pooled_counts,
            metrics,
            undefined,
            ssegep: ssegep_summary,
        },
        warnings,
    })
}

/// Loads both mask files and evaluates them.
pub fn evaluate_pair(gt_path: &Path, pred_path: &Path, cfg: &RunConfig) -> Result<MetricReport> {
    let gt = load_mask_file(gt_path, None)?;
    let pred = load_mask_file(pred_path, Some(gt.dims()))?;
    let stem = gt_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut report = evaluate_masks(&stem, &gt, &pred, cfg)?;
    report.gt_path = gt_path.display().to_string();
    report.pred_path = pred_path.display().to_string();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, ScenarioName, ScenarioSpec};

    #[test]
    fn metric_list_parsing() {
        assert_eq!(MetricName::parse_list("all").unwrap().len(), 10);
        assert_eq!(
            MetricName::parse_list("ssegep, dice,dice").unwrap(),
            vec![MetricName::Dice, MetricName::Ssegep]
        );
        assert!(matches!(MetricName::parse_list("dice,f1"), Err(Error::UnknownMetric(_))));
        assert!(MetricName::parse_list(",").is_err());
    }

    #[test]
    fn label_parsing() {
        assert_eq!(parse_labels("1, 2,2").unwrap(), vec![1, 2]);
        assert!(parse_labels("0").is_err());
        assert!(parse_labels("256").is_err());
        assert!(parse_labels("").is_err());
    }

    #[test]
    fn perfect_pair_reports_ones() {
        let (gt, _) = generate(&ScenarioSpec::new(ScenarioName::MultisizeC)).unwrap();
        let r = evaluate_masks("x", &gt, &gt, &RunConfig::default()).unwrap();
        let l = &r.per_label[0];
        for (name, v) in &l.metrics {
            let want = if *name == MetricName::Hausdorff { 0.0 } else { 1.0 };
            assert_eq!(*v, Some(want), "{name}");
        }
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert_eq!(r.pooled.metrics[&MetricName::GeneralizedDice], Some(1.0));
    }

    #[test]
    fn empty_prediction_flags_ppv() {
        let (gt, _) = generate(&ScenarioSpec::new(ScenarioName::MultisegmentE)).unwrap();
        let pred = LabelMask::zeros(gt.width(), gt.height()).unwrap();
        let r = evaluate_masks("x", &gt, &pred, &RunConfig::default()).unwrap();
        assert_eq!(r.pooled.metrics[&MetricName::Ssegep], Some(0.0));
        let l = &r.per_label[0];
        assert!(l.undefined.contains(&MetricName::Ppv));
        assert!(l.undefined.contains(&MetricName::Hausdorff));
        assert_eq!(l.metrics[&MetricName::Hausdorff], None);
        assert!(r.warnings.iter().any(|w| w.contains("ppv undefined")));
    }

    #[test]
    fn metric_selection_is_respected() {
        let (gt, pred) = generate(&ScenarioSpec::new(ScenarioName::MultisegmentE)).unwrap();
        let cfg = RunConfig {
            metrics: vec![MetricName::Dice],
            ..Default::default()
        };
        let r = evaluate_masks("x", &gt, &pred, &cfg).unwrap();
        assert_eq!(r.per_label[0].metrics.keys().copied().collect::<Vec<_>>(), vec![MetricName::Dice]);
        assert!(r.pooled.ssegep.is_none());
    }

    #[test]
    fn vacuous_label_is_warned() {
        let (gt, pred) = generate(&ScenarioSpec::new(ScenarioName::MultisegmentE)).unwrap();
        let cfg = RunConfig {
            labels: vec![1, 2],
            ..Default::default()
        };
        let r = evaluate_masks("x", &gt, &pred, &cfg).unwrap();
        assert!(r.warnings.iter().any(|w| w.starts_with("label 2: ssegep vacuous")));
        assert!(r.warnings.iter().any(|w| w.contains("skipped labels")));
    }

    #[test]
    fn invalid_config_rejected() {
        let m = LabelMask::zeros(3, 3).unwrap();
        let cfg = RunConfig {
            labels: vec![],
            ..Default::default()
        };
        assert!(evaluate_masks("x", &m, &m, &cfg).is_err());
        let cfg = RunConfig {
            parallelism: 0,
            ..Default::default()
        };
        assert!(evaluate_masks("x", &m, &m, &cfg).is_err());
    }
}
