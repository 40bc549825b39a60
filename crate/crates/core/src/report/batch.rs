use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{evaluate_pair, MetricName, MetricReport, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    /// Mean over pairs where the metric has a value.
    pub mean: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    /// Sorted by stem.
    pub reports: Vec<MetricReport>,
    /// Means of the pooled (`ALL`) metric values.
    pub summary: BTreeMap<MetricName, MetricSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemPairs {
    pub pairs: Vec<(String, PathBuf, PathBuf)>,
    pub warnings: Vec<String>,
}

fn mask_files(dir: &Path) -> Result<(BTreeMap<String, PathBuf>, Vec<String>)> {
    let mut by_stem: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::from(e).with_path(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();
    for p in paths {
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if let Some(first) = by_stem.get(&stem) {
            warnings.push(format!(
                "duplicate stem {stem:?} in {}: using {}, ignoring {}",
                dir.display(),
                first.display(),
                p.display()
            ));
        } else {
            by_stem.insert(stem, p);
        }
    }
    Ok((by_stem, warnings))
}

/// Pairs mask files of two directories by file stem. Stems present on only
/// one side are reported as warnings.
pub fn pair_by_stem(gt_dir: &Path, pred_dir: &Path) -> Result<StemPairs> {
    let (gt, mut warnings) = mask_files(gt_dir)?;
    let (pred, w2) = mask_files(pred_dir)?;
    warnings.extend(w2);
    for stem in gt.keys().filter(|s| !pred.contains_key(*s)) {
        warnings.push(format!("unmatched ground truth {stem:?}: no prediction in {}", pred_dir.display()));
    }
    for stem in pred.keys().filter(|s| !gt.contains_key(*s)) {
        warnings.push(format!("unmatched prediction {stem:?}: no ground truth in {}", gt_dir.display()));
    }
    let pairs: Vec<_> = gt
        .iter()
        .filter_map(|(stem, g)| pred.get(stem).map(|p| (stem.clone(), g.clone(), p.clone())))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoMatchingStems {
            gt_dir: gt_dir.to_path_buf(),
            pred_dir: pred_dir.to_path_buf(),
        });
    }
    Ok(StemPairs { pairs, warnings })
}

/// Evaluates every stem-matched pair, `cfg.parallelism` pairs at a time.
///
/// Output order is by stem regardless of scheduling. The first failing pair
/// (in stem order) aborts the batch.
pub fn evaluate_batch(gt_dir: &Path, pred_dir: &Path, cfg: &RunConfig) -> Result<BatchReport> {
    cfg.validate()?;
    let StemPairs { pairs, mut warnings } = pair_by_stem(gt_dir, pred_dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<MetricReport>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(stem, g, p)| {
                let mut r = evaluate_pair(g, p, cfg)?;
                r.stem = stem.clone();
                Ok(r)
            })
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;

    for r in &reports {
        warnings.extend(r.warnings.iter().map(|w| format!("{}: {w}", r.stem)));
    }

    let summary = cfg
        .metrics
        .iter()
        .filter(|m| m.pooled())
        .map(|&m| {
            let values: Vec<f64> = reports
                .iter()
                .filter_map(|r| r.pooled.metrics.get(&m).copied().flatten())
                .collect();
            let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
            (m, MetricSummary { mean, n: values.len() })
        })
        .collect();

    Ok(BatchReport {
        reports,
        summary,
        warnings,
    })
}
