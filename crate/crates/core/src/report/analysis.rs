use std::collections::BTreeMap;
use std::path::Path;

use super::emit::SUMMARY_STEM;
use crate::error::{Error, Result};
use crate::mask::ConfusionCounts;
use crate::stats::{levene_test, mos_deviation, partition_by_quality, welch_t_test, QualityThresholds, TestResult};

/// One parsed row of a report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub stem: String,
    pub label: String,
    pub counts: Option<ConfusionCounts>,
    /// Metric columns; empty cells are `None`.
    pub values: BTreeMap<String, Option<f64>>,
}

impl ReportRow {
    fn is_pooled_pair(&self) -> bool {
        self.label == "ALL" && self.stem != SUMMARY_STEM
    }
}

fn parse_cell<T: std::str::FromStr>(cell: &str, column: &str, line: usize) -> Result<Option<T>> {
    if cell.trim().is_empty() {
        return Ok(None);
    }
    cell.trim()
        .parse()
        .map(Some)
        .map_err(|_| Error::Malformed(format!("line {line}: column {column}: {cell:?}")))
}

pub fn read_report_rows(path: &Path) -> Result<Vec<ReportRow>> {
    let read = || -> Result<Vec<ReportRow>> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        for required in ["stem", "label"] {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::MissingColumn(required.into()));
            }
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let mut row = ReportRow {
                stem: String::new(),
                label: String::new(),
                counts: None,
                values: BTreeMap::new(),
            };
            let mut counts: [Option<u64>; 4] = [None; 4];
            for (h, cell) in headers.iter().zip(rec.iter()) {
                match h {
                    "stem" => row.stem = cell.to_string(),
                    "label" => row.label = cell.to_string(),
                    "tp" => counts[0] = parse_cell(cell, h, line)?,
                    "fp" => counts[1] = parse_cell(cell, h, line)?,
                    "fn" => counts[2] = parse_cell(cell, h, line)?,
                    "tn" => counts[3] = parse_cell(cell, h, line)?,
                    _ => {
                        row.values.insert(h.to_string(), parse_cell(cell, h, line)?);
                    }
                }
            }
            if let [Some(tp), Some(fp), Some(fn_), Some(tn)] = counts {
                row.counts = Some(ConfusionCounts::new(tp, fp, fn_, tn));
            }
            rows.push(row);
        }
        Ok(rows)
    };
    read().map_err(|e| e.with_path(path))
}

/// Significance of a metric's separation between good and bad segmentations.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub metric: String,
    pub n_good: usize,
    pub n_bad: usize,
    pub n_unclassified: usize,
    /// Good minus bad.
    pub welch: TestResult,
    /// `None` when the groups are too degenerate for Levene's test.
    pub levene: Option<TestResult>,
    pub warnings: Vec<String>,
}

/// Partitions the pooled rows by quality and tests the metric's good-vs-bad
/// difference.
pub fn compare_rows(rows: &[ReportRow], metric: &str, thresholds: &QualityThresholds, alpha: f64) -> Result<CompareTable> {
    thresholds.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let pooled: Vec<&ReportRow> = rows.iter().filter(|r| r.is_pooled_pair()).collect();
    if !pooled.iter().any(|r| r.values.contains_key(metric)) {
        return Err(Error::MissingColumn(metric.to_string()));
    }
    let mut warnings = Vec::new();
    let mut usable: Vec<(ConfusionCounts, f64)> = Vec::new();
    for r in &pooled {
        match (r.counts, r.values.get(metric).copied().flatten()) {
            (Some(c), Some(v)) => usable.push((c, v)),
            (None, _) => warnings.push(format!("{}: no confusion counts, skipped", r.stem)),
            (_, None) => warnings.push(format!("{}: no {metric} value, skipped", r.stem)),
        }
    }
    let counts: Vec<ConfusionCounts> = usable.iter().map(|(c, _)| *c).collect();
    let part = partition_by_quality(&counts, thresholds);
    let good: Vec<f64> = part.good.iter().map(|&i| usable[i].1).collect();
    let bad: Vec<f64> = part.bad.iter().map(|&i| usable[i].1).collect();
    if good.len() < 2 || bad.len() < 2 {
        return Err(Error::InsufficientSamples {
            good: good.len(),
            bad: bad.len(),
        });
    }
    let welch = welch_t_test(&good, &bad)?.with_alpha(alpha);
    let levene = match levene_test(&good, &bad) {
        Ok(t) => Some(t.with_alpha(alpha)),
        Err(e) => {
            warnings.push(format!("levene: {e}"));
            None
        }
    };
    Ok(CompareTable {
        metric: metric.to_string(),
        n_good: good.len(),
        n_bad: bad.len(),
        n_unclassified: part.unclassified.len(),
        welch,
        levene,
        warnings,
    })
}

pub fn compare_command(report_csv: &Path, metric: &str, thresholds: &QualityThresholds, alpha: f64) -> Result<CompareTable> {
    let rows = read_report_rows(report_csv)?;
    compare_rows(&rows, metric, thresholds, alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosRow {
    pub metric: String,
    pub n: usize,
    pub mean_value: f64,
    /// Mean absolute difference from MOS.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosTable {
    pub rows: Vec<MosRow>,
    pub warnings: Vec<String>,
}

fn read_mos(path: &Path) -> Result<BTreeMap<String, f64>> {
    let read = || -> Result<BTreeMap<String, f64>> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let (stem_col, mos_col) = (col("stem")?, col("mos")?);
        let mut out = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let stem = rec.get(stem_col).unwrap_or_default().to_string();
            let mos = parse_cell::<f64>(rec.get(mos_col).unwrap_or_default(), "mos", i + 2)?
                .ok_or_else(|| Error::Malformed(format!("line {}: empty mos", i + 2)))?;
            out.insert(stem, mos);
        }
        Ok(out)
    };
    read().map_err(|e| e.with_path(path))
}

/// Mean absolute deviation of each metric's pooled values from the MOS of
/// the same stem.
pub fn mos_from_rows(rows: &[ReportRow], mos: &BTreeMap<String, f64>, metrics: &[String]) -> Result<MosTable> {
    if metrics.is_empty() {
        return Err(Error::InvalidArgument("metric list is empty".into()));
    }
    let pooled: Vec<&ReportRow> = rows.iter().filter(|r| r.is_pooled_pair()).collect();
    let missing: Vec<String> = pooled
        .iter()
        .filter(|r| !mos.contains_key(&r.stem))
        .map(|r| r.stem.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingMos(missing));
    }
    let mut warnings: Vec<String> = mos
        .keys()
        .filter(|s| !pooled.iter().any(|r| &r.stem == *s))
        .map(|s| format!("MOS for {s:?} has no report row"))
        .collect();
    let mut out = Vec::new();
    for metric in metrics {
        if !pooled.iter().any(|r| r.values.contains_key(metric)) {
            return Err(Error::MissingColumn(metric.clone()));
        }
        let mut values = Vec::new();
        let mut opinions = Vec::new();
        for r in &pooled {
            match r.values.get(metric).copied().flatten() {
                Some(v) => {
                    values.push(v);
                    opinions.push(mos[&r.stem]);
                }
                None => warnings.push(format!("{}: no {metric} value, skipped", r.stem)),
            }
        }
        let deviation = mos_deviation(&values, &opinions)?;
        out.push(MosRow {
            metric: metric.clone(),
            n: values.len(),
            mean_value: values.iter().sum::<f64>() / values.len() as f64,
            deviation,
        });
    }
    Ok(MosTable { rows: out, warnings })
}

pub fn mos_command(report_csv: &Path, mos_csv: &Path, metrics: &[String]) -> Result<MosTable> {
    let rows = read_report_rows(report_csv)?;
    let mos = read_mos(mos_csv)?;
    mos_from_rows(&rows, &mos, metrics)
}
