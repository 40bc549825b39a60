use std::io::Write;

use serde_json::{json, Map, Number, Value};

use super::{BatchReport, CompareTable, MetricMap, MetricName, MetricReport, MosTable};
use crate::error::Result;
use crate::mask::ConfusionCounts;
use crate::stats::TestResult;

/// Stem of the per-metric mean row appended to batch CSV output.
pub const SUMMARY_STEM: &str = "__mean__";

/// Textual form of a value: 4 decimals, or the shortest round-trip form with
/// `full_precision`. JSON numbers are parsed back from this text so JSON and
/// CSV always carry the same value.
pub fn format_value(v: f64, full_precision: bool) -> String {
    let s = if full_precision { format!("{v}") } else { format!("{v:.4}") };
    // Avoid "-0.0000".
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn number(v: f64, full: bool) -> Value {
    let parsed: f64 = format_value(v, full).parse().unwrap_or(v);
    Number::from_f64(parsed).map_or(Value::Null, Value::Number)
}

fn opt_number(v: Option<f64>, full: bool) -> Value {
    v.map_or(Value::Null, |v| number(v, full))
}

fn metrics_json(m: &MetricMap, full: bool) -> Value {
    let mut out = Map::new();
    for (name, v) in m {
        out.insert(name.as_str().to_string(), opt_number(*v, full));
    }
    Value::Object(out)
}

fn counts_json(c: &ConfusionCounts) -> Value {
    json!({ "tp": c.tp, "fp": c.fp, "fn": c.fn_, "tn": c.tn })
}

fn names(ns: &[MetricName]) -> Value {
    Value::Array(ns.iter().map(|n| Value::String(n.as_str().into())).collect())
}

pub fn report_to_json(r: &MetricReport, full: bool) -> Value {
    let per_label: Map<String, Value> = r
        .per_label
        .iter()
        .map(|l| {
            (
                l.label.to_string(),
                json!({
                    "counts": counts_json(&l.counts),
                    "metrics": metrics_json(&l.metrics, full),
                    "undefined": names(&l.undefined),
                }),
            )
        })
        .collect();
    let mut pooled = json!({
        "counts": counts_json(&r.pooled.counts),
        "metrics": metrics_json(&r.pooled.metrics, full),
        "undefined": names(&r.pooled.undefined),
    });
    if let Some(s) = &r.pooled.ssegep {
        pooled["ssegep_breakdown"] = json!({
            "score": number(s.score, full),
            "n_segments": s.n_segments,
            "weighted_tp": number(s.weighted_tp, full),
            "weighted_fp": number(s.weighted_fp, full),
            "vacuous": s.vacuous,
        });
    }
    json!({
        "stem": r.stem,
        "gt_path": r.gt_path,
        "pred_path": r.pred_path,
        "per_label": per_label,
        "pooled": pooled,
        "warnings": r.warnings,
    })
}

pub fn batch_to_json(b: &BatchReport, full: bool) -> Value {
    let summary: Map<String, Value> = b
        .summary
        .iter()
        .map(|(name, s)| {
            (
                name.as_str().to_string(),
                json!({ "mean": opt_number(s.mean, full), "n": s.n }),
            )
        })
        .collect();
    json!({
        "reports": b.reports.iter().map(|r| report_to_json(r, full)).collect::<Vec<_>>(),
        "summary": summary,
        "warnings": b.warnings,
    })
}

fn csv_header(metrics: &[MetricName]) -> Vec<String> {
    let mut h: Vec<String> = ["stem", "label", "tp", "fp", "fn", "tn"].map(String::from).to_vec();
    h.extend(metrics.iter().map(|m| m.as_str().to_string()));
    h
}

fn csv_row(stem: &str, label: &str, c: Option<&ConfusionCounts>, m: &MetricMap, metrics: &[MetricName], full: bool) -> Vec<String> {
    let mut row = vec![stem.to_string(), label.to_string()];
    match c {
        Some(c) => row.extend([c.tp, c.fp, c.fn_, c.tn].map(|v| v.to_string())),
        None => row.extend(std::iter::repeat_n(String::new(), 4)),
    }
    for name in metrics {
        let cell = m.get(name).copied().flatten().map(|v| format_value(v, full)).unwrap_or_default();
        row.push(cell);
    }
    row
}

fn write_report_rows<W: Write>(w: &mut csv::Writer<W>, r: &MetricReport, metrics: &[MetricName], full: bool) -> Result<()> {
    for l in &r.per_label {
        w.write_record(csv_row(&r.stem, &l.label.to_string(), Some(&l.counts), &l.metrics, metrics, full))?;
    }
    w.write_record(csv_row(&r.stem, "ALL", Some(&r.pooled.counts), &r.pooled.metrics, metrics, full))?;
    Ok(())
}

/// One row per label plus an `ALL` row per report:
/// `stem,label,tp,fp,fn,tn,<metric>...`.
pub fn write_reports_csv<W: Write>(out: W, reports: &[MetricReport], metrics: &[MetricName], full: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(metrics))?;
    for r in reports {
        write_report_rows(&mut w, r, metrics, full)?;
    }
    w.flush()?;
    Ok(())
}

/// Report rows followed by a `__mean__,ALL` row of per-metric means.
pub fn write_batch_csv<W: Write>(out: W, b: &BatchReport, metrics: &[MetricName], full: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(metrics))?;
    for r in &b.reports {
        write_report_rows(&mut w, r, metrics, full)?;
    }
    let means: MetricMap = b.summary.iter().map(|(k, s)| (*k, s.mean)).collect();
    w.write_record(csv_row(SUMMARY_STEM, "ALL", None, &means, metrics, full))?;
    w.flush()?;
    Ok(())
}

fn test_json(t: &Option<TestResult>, full: bool) -> Value {
    match t {
        Some(t) => json!({
            "statistic": number(t.statistic, full),
            "dof": number(t.dof, full),
            // p-values span many orders of magnitude; keep them exact.
            "p_value": t.p_value,
            "alpha": t.alpha,
            "reject": t.rejects(),
        }),
        None => Value::Null,
    }
}

pub fn compare_to_json(c: &CompareTable, full: bool) -> Value {
    json!({
        "metric": c.metric,
        "n_good": c.n_good,
        "n_bad": c.n_bad,
        "n_unclassified": c.n_unclassified,
        "welch": test_json(&Some(c.welch), full),
        "levene": test_json(&c.levene, full),
        "warnings": c.warnings,
    })
}

pub fn write_compare_csv<W: Write>(out: W, tables: &[CompareTable], full: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "n_good", "n_bad", "t", "dof", "p", "alpha", "reject", "levene_w", "levene_p"])?;
    for c in tables {
        let (lw, lp) = match &c.levene {
            Some(l) => (format_value(l.statistic, full), format!("{:e}", l.p_value)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            c.metric.clone(),
            c.n_good.to_string(),
            c.n_bad.to_string(),
            format_value(c.welch.statistic, full),
            format_value(c.welch.dof, full),
            format!("{:e}", c.welch.p_value),
            format!("{:e}", c.welch.alpha),
            c.welch.rejects().to_string(),
            lw,
            lp,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn mos_to_json(t: &MosTable, full: bool) -> Value {
    json!({
        "rows": t.rows.iter().map(|r| json!({
            "metric": r.metric,
            "n": r.n,
            "mean_value": number(r.mean_value, full),
            "deviation": number(r.deviation, full),
        })).collect::<Vec<_>>(),
        "warnings": t.warnings,
    })
}

pub fn write_mos_csv<W: Write>(out: W, t: &MosTable, full: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "n", "mean_value", "deviation"])?;
    for r in &t.rows {
        w.write_record([
            r.metric.clone(),
            r.n.to_string(),
            format_value(r.mean_value, full),
            format_value(r.deviation, full),
        ])?;
    }
    w.flush()?;
    Ok(())
}
