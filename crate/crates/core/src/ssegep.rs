//! Small-segment emphasized performance score.
//!
//! Every ground-truth segment contributes the fraction of its pixels that
//! were recovered, so each segment weighs the same regardless of size and a
//! pixel of a small segment is worth more than a pixel of a large one. False
//! positives of each label are counted relative to that label's recovered
//! pixels and added to the segment count in the denominator:
//!
//! ```text
//! score = Σ_i a_i / area_i  /  (n_segments + Σ_j fp_j / tp_j)
//! ```
//!
//! Sums are accumulated as exact rationals; the final division is the only
//! floating-point step, so a perfect prediction scores exactly 1.0.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{confusion_counts, connected_components, fp_mask, Connectivity, Label, LabelMask, Segment};

/// Overlap record for one ground-truth segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentMatch {
    pub segment_index: usize,
    pub label: Label,
    pub gt_area: u64,
    /// `1 / gt_area`.
    pub weight: f64,
    /// Ground-truth pixels of the segment predicted with the same label.
    pub tp_count: u64,
    /// `tp_count / gt_area`, in `[0, 1]`.
    pub contribution: f64,
}

impl SegmentMatch {
    fn contribution_exact(&self) -> BigRational {
        ratio(self.tp_count, self.gt_area)
    }
}

/// False-positive record for one label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelFpStats {
    pub label: Label,
    pub fp_count: u64,
    pub label_tp_total: u64,
    pub weighted_fp: f64,
}

impl LabelFpStats {
    fn new(label: Label, fp_count: u64, label_tp_total: u64) -> Self {
        let mut stats = LabelFpStats {
            label,
            fp_count,
            label_tp_total,
            weighted_fp: 0.0,
        };
        stats.weighted_fp = stats.weighted_fp_exact().to_f64().unwrap_or(f64::INFINITY);
        stats
    }

    /// `fp / tp_total`, or one unit per FP pixel when nothing of the label
    /// was recovered.
    fn weighted_fp_exact(&self) -> BigRational {
        if self.fp_count == 0 {
            BigRational::zero()
        } else if self.label_tp_total == 0 {
            ratio(self.fp_count, 1)
        } else {
            ratio(self.fp_count, self.label_tp_total)
        }
    }
}

/// Score restricted to one label's segments and false positives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelScore {
    pub label: Label,
    pub n_segments: usize,
    pub score: f64,
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsegepBreakdown {
    pub matches: Vec<SegmentMatch>,
    pub fp_stats: Vec<LabelFpStats>,
    pub n_segments: usize,
    pub score: f64,
    /// Ground truth contains none of the requested labels.
    pub vacuous: bool,
    pub per_label: Vec<LabelScore>,
}

impl SsegepBreakdown {
    /// Numerator of the score: summed per-segment recovered fractions.
    pub fn weighted_tp(&self) -> f64 {
        sum_exact(self.matches.iter().map(SegmentMatch::contribution_exact))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Summed weighted false positives over all labels.
    pub fn weighted_fp(&self) -> f64 {
        sum_exact(self.fp_stats.iter().map(LabelFpStats::weighted_fp_exact))
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn sum_exact(terms: impl Iterator<Item = BigRational>) -> BigRational {
    terms.fold(BigRational::zero(), |acc, t| acc + t)
}

/// Pairs each segment with its inverse-area weight.
pub fn segment_weights(gt_segments: &[Segment]) -> Vec<(&Segment, f64)> {
    gt_segments
        .iter()
        .map(|s| (s, 1.0 / s.area() as f64))
        .collect()
}

/// Counts, for each ground-truth segment, the pixels predicted with the
/// segment's label. Segments must come from a mask of size `gt_dims`.
pub fn match_tp(gt_segments: &[Segment], gt_dims: (usize, usize), pred: &LabelMask) -> Result<Vec<SegmentMatch>> {
    if gt_dims != pred.dims() {
        return Err(Error::dims(gt_dims, pred.dims()));
    }
    let matches = gt_segments
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            let tp = seg
                .pixels
                .iter()
                .filter(|&&(r, c)| pred.get(r, c) == seg.label)
                .count() as u64;
            let area = seg.area() as u64;
            SegmentMatch {
                segment_index: i,
                label: seg.label,
                gt_area: area,
                weight: 1.0 / area as f64,
                tp_count: tp,
                contribution: tp as f64 / area as f64,
            }
        })
        .collect();
    Ok(matches)
}

/// Per-label raw and weighted false-positive counts.
pub fn fp_weights(gt: &LabelMask, pred: &LabelMask, labels: &[Label]) -> Result<Vec<LabelFpStats>> {
    gt.ensure_same_dims(pred)?;
    labels
        .iter()
        .map(|&label| {
            let fp = fp_mask(gt, pred, label)?.count(1) as u64;
            let tp = confusion_counts(gt, pred, label)?.tp;
            Ok(LabelFpStats::new(label, fp, tp))
        })
        .collect()
}

fn score_of(matches: &[&SegmentMatch], fps: &[&LabelFpStats]) -> (f64, bool) {
    if matches.is_empty() {
        let any_fp = fps.iter().any(|f| f.fp_count > 0);
        return (if any_fp { 0.0 } else { 1.0 }, true);
    }
    let num = sum_exact(matches.iter().map(|m| m.contribution_exact()));
    let den = BigRational::from_integer(BigInt::from(matches.len()))
        + sum_exact(fps.iter().map(|f| f.weighted_fp_exact()));
    ((num / den).to_f64().unwrap_or(f64::NAN), false)
}

/// Pooled score over every segment of every requested label, with the full
/// breakdown.
pub fn ssegep(gt: &LabelMask, pred: &LabelMask, labels: &[Label], connectivity: Connectivity) -> Result<SsegepBreakdown> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("label list is empty".into()));
    }
    gt.ensure_same_dims(pred)?;

    let segments: Vec<Segment> = labels
        .iter()
        .flat_map(|&l| connected_components(gt, l, connectivity))
        .collect();
    let matches = match_tp(&segments, gt.dims(), pred)?;
    let fp_stats = fp_weights(gt, pred, labels)?;

    let all_matches: Vec<&SegmentMatch> = matches.iter().collect();
    let all_fps: Vec<&LabelFpStats> = fp_stats.iter().collect();
    let (score, vacuous) = score_of(&all_matches, &all_fps);

    let per_label = labels
        .iter()
        .map(|&label| {
            let ms: Vec<_> = matches.iter().filter(|m| m.label == label).collect();
            let fs: Vec<_> = fp_stats.iter().filter(|f| f.label == label).collect();
            let (score, vacuous) = score_of(&ms, &fs);
            LabelScore {
                label,
                n_segments: ms.len(),
                score,
                vacuous,
            }
        })
        .collect();

    Ok(SsegepBreakdown {
        n_segments: matches.len(),
        matches,
        fp_stats,
        score,
        vacuous,
        per_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fill(m: &mut LabelMask, cells: impl IntoIterator<Item = (usize, usize)>, label: Label) {
        for (r, c) in cells {
            m.set(r, c, label);
        }
    }

    fn rect(top: usize, left: usize, h: usize, w: usize) -> Vec<(usize, usize)> {
        (top..top + h)
            .flat_map(|r| (left..left + w).map(move |c| (r, c)))
            .collect()
    }

    #[test]
    fn weights_are_reciprocal_areas() {
        let mut m = LabelMask::zeros(40, 40).unwrap();
        fill(&mut m, rect(0, 0, 10, 15), 1);
        fill(&mut m, rect(20, 0, 5, 6), 1);
        fill(&mut m, rect(30, 30, 2, 5), 1);
        let segs = connected_components(&m, 1, Connectivity::Eight);
        let mut ws: Vec<f64> = segment_weights(&segs).into_iter().map(|(_, w)| w).collect();
        ws.sort_by(f64::total_cmp);
        assert_eq!(ws, vec![1.0 / 150.0, 1.0 / 30.0, 1.0 / 10.0]);
    }

    #[test]
    fn perfect_prediction_scores_exactly_one() {
        let mut gt = LabelMask::zeros(16, 16).unwrap();
        fill(&mut gt, rect(1, 1, 3, 7), 1);
        fill(&mut gt, rect(8, 8, 1, 1), 1);
        fill(&mut gt, rect(10, 2, 4, 3), 2);
        let b = ssegep(&gt, &gt, &[1, 2], Connectivity::Eight).unwrap();
        assert_eq!(b.score, 1.0);
        assert_eq!(b.n_segments, 3);
        assert!(!b.vacuous);
        assert!(b.per_label.iter().all(|l| l.score == 1.0));
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let mut gt = LabelMask::zeros(8, 8).unwrap();
        fill(&mut gt, rect(2, 2, 2, 2), 1);
        let pred = LabelMask::zeros(8, 8).unwrap();
        let b = ssegep(&gt, &pred, &[1], Connectivity::Eight).unwrap();
        assert_eq!(b.score, 0.0);
        assert!(b.matches.iter().all(|m| m.tp_count == 0));
    }

    #[test]
    fn single_segment_with_false_positives() {
        // area 100, a = 80, fp = 40: 0.8 / (1 + 40/80)
        let mut gt = LabelMask::zeros(30, 30).unwrap();
        let mut pred = LabelMask::zeros(30, 30).unwrap();
        fill(&mut gt, rect(0, 0, 10, 10), 1);
        fill(&mut pred, rect(0, 0, 8, 10), 1);
        fill(&mut pred, rect(20, 0, 4, 10), 1);
        let b = ssegep(&gt, &pred, &[1], Connectivity::Eight).unwrap();
        assert!((b.score - 0.8 / 1.5).abs() < 1e-15);
        assert_eq!(b.fp_stats[0].fp_count, 40);
        assert_eq!(b.fp_stats[0].label_tp_total, 80);
        assert_eq!(b.fp_stats[0].weighted_fp, 0.5);
    }

    #[test]
    fn fp_weight_fallback_without_tp() {
        let s = LabelFpStats::new(1, 40, 0);
        assert_eq!(s.weighted_fp, 40.0);
        assert_eq!(LabelFpStats::new(1, 0, 0).weighted_fp, 0.0);
        assert_eq!(LabelFpStats::new(1, 40, 80).weighted_fp, 0.5);
    }

    #[test]
    fn vacuous_cases() {
        let gt = LabelMask::zeros(5, 5).unwrap();
        let b = ssegep(&gt, &gt, &[1], Connectivity::Eight).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.score, 1.0);

        let mut pred = gt.clone();
        pred.set(2, 2, 1);
        let b = ssegep(&gt, &pred, &[1], Connectivity::Eight).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.score, 0.0);
    }

    #[test]
    fn mismatch_and_empty_labels_error() {
        let a = LabelMask::zeros(5, 5).unwrap();
        let b = LabelMask::zeros(5, 6).unwrap();
        assert!(ssegep(&a, &b, &[1], Connectivity::Eight).is_err());
        assert!(ssegep(&a, &a, &[], Connectivity::Eight).is_err());
        assert!(match_tp(&[], (5, 5), &b).is_err());
        assert!(fp_weights(&a, &b, &[1]).is_err());
    }

    #[test]
    fn per_label_scores_split_pooled() {
        let mut gt = LabelMask::zeros(12, 12).unwrap();
        fill(&mut gt, rect(0, 0, 2, 2), 1);
        fill(&mut gt, rect(6, 6, 2, 2), 2);
        let mut pred = gt.clone();
        fill(&mut pred, rect(6, 6, 2, 2), 0);
        let b = ssegep(&gt, &pred, &[1, 2], Connectivity::Eight).unwrap();
        assert_eq!(b.score, 0.5);
        assert_eq!(b.per_label[0].score, 1.0);
        assert_eq!(b.per_label[1].score, 0.0);
        assert_eq!(b.weighted_tp(), 1.0);
        assert_eq!(b.weighted_fp(), 0.0);
    }
}
