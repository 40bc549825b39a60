//! Baseline metrics: overlap ratios from the confusion matrix, MCC,
//! boundary Hausdorff distance and multi-label generalized Dice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{confusion_counts, BoundarySet, ConfusionCounts, Label, LabelMask};

/// A metric value plus a flag for degenerate denominators.
///
/// When `defined` is false, `value` holds the documented convention for that
/// metric (0 for most ratios, 1 for vacuous Dice/IoU).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub defined: bool,
}

impl MetricValue {
    pub fn defined(value: f64) -> Self {
        MetricValue {
            value,
            defined: true,
        }
    }

    pub fn undefined(fallback: f64) -> Self {
        MetricValue {
            value: fallback,
            defined: false,
        }
    }

    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            MetricValue::undefined(0.0)
        } else {
            MetricValue::defined(num as f64 / den as f64)
        }
    }
}

pub fn accuracy(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tp + c.tn, c.total())
}

/// True positive rate, `tp / (tp + fn)`.
pub fn sensitivity(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tp, c.tp + c.fn_)
}

pub fn specificity(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tn, c.tn + c.fp)
}

/// Precision, `tp / (tp + fp)`.
pub fn ppv(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tp, c.tp + c.fp)
}

/// Intersection over union. Both masks empty counts as perfect agreement.
pub fn iou(c: &ConfusionCounts) -> MetricValue {
    let den = c.tp + c.fp + c.fn_;
    if den == 0 {
        return MetricValue::undefined(1.0);
    }
    MetricValue::defined(c.tp as f64 / den as f64)
}

/// Dice similarity coefficient. Both masks empty counts as perfect agreement.
pub fn dice(c: &ConfusionCounts) -> MetricValue {
    let den = 2 * c.tp + c.fp + c.fn_;
    if den == 0 {
        return MetricValue::undefined(1.0);
    }
    MetricValue::defined((2 * c.tp) as f64 / den as f64)
}

/// Matthews correlation coefficient in `[-1, 1]`.
///
/// The numerator and both factor pairs are formed in integer arithmetic; the
/// square roots and the final division are the only rounding steps.
pub fn mcc(c: &ConfusionCounts) -> MetricValue {
    let (tp, fp, fn_, tn) = (c.tp as u128, c.fp as u128, c.fn_ as u128, c.tn as u128);
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0) {
        return MetricValue::undefined(0.0);
    }
    let num = (tp * tn) as i128 - (fp * fn_) as i128;
    let left = ((factors[0] * factors[1]) as f64).sqrt();
    let right = ((factors[2] * factors[3]) as f64).sqrt();
    let v = (num as f64 / left / right).clamp(-1.0, 1.0);
    MetricValue::defined(v)
}

/// MCC mapped onto `[0, 1]` via `(v + 1) / 2`.
pub fn mcc_rescaled(c: &ConfusionCounts) -> MetricValue {
    let m = mcc(c);
    MetricValue {
        value: (m.value + 1.0) / 2.0,
        defined: m.defined,
    }
}

fn directed_hausdorff_sq(from: &[(usize, usize)], to: &[(usize, usize)]) -> u64 {
    let mut worst = 0u64;
    for &(r, c) in from {
        let mut best = u64::MAX;
        for &(r2, c2) in to {
            let dr = r.abs_diff(r2) as u64;
            let dc = c.abs_diff(c2) as u64;
            let d = dr * dr + dc * dc;
            if d < best {
                best = d;
                // This point can no longer raise the maximum.
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Symmetric Hausdorff distance between two boundaries in Euclidean pixels.
///
/// Exact brute-force max-min over integer squared distances.
pub fn hausdorff(gt_boundary: &BoundarySet, pred_boundary: &BoundarySet) -> Result<MetricValue> {
    if gt_boundary.is_empty() || pred_boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let forward = directed_hausdorff_sq(&gt_boundary.points, &pred_boundary.points);
    let backward = directed_hausdorff_sq(&pred_boundary.points, &gt_boundary.points);
    Ok(MetricValue::defined((forward.max(backward) as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedDice {
    pub value: MetricValue,
    /// Requested labels absent from the ground truth.
    pub skipped: Vec<Label>,
}

/// Multi-label Dice with each label weighted by the inverse of its
/// ground-truth area.
pub fn generalized_dice(gt: &LabelMask, pred: &LabelMask, labels: &[Label]) -> Result<GeneralizedDice> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("label list is empty".into()));
    }
    gt.ensure_same_dims(pred)?;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut skipped = Vec::new();
    for &label in labels {
        let c = confusion_counts(gt, pred, label)?;
        let g = c.positives();
        if g == 0 {
            skipped.push(label);
            continue;
        }
        let w = 1.0 / g as f64;
        num += w * c.tp as f64;
        den += w * (c.predicted() + g) as f64;
    }
    if skipped.len() == labels.len() {
        return Err(Error::NoLabelsInGroundTruth(labels.to_vec()));
    }
    Ok(GeneralizedDice {
        value: MetricValue::defined(2.0 * num / den),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::boundary;

    fn cc(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionCounts {
        ConfusionCounts::new(tp, fp, fn_, tn)
    }

    #[test]
    fn accuracy_examples() {
        assert!((accuracy(&cc(10, 5, 5, 80)).value - 0.90).abs() < 1e-15);
        assert_eq!(accuracy(&cc(5, 0, 0, 95)).value, 1.0);
        // Empty GT, prediction fills image.
        assert_eq!(accuracy(&cc(0, 100, 0, 0)).value, 0.0);
        assert!(!accuracy(&cc(0, 0, 0, 0)).defined);
    }

    #[test]
    fn rates_from_caption_counts() {
        let c = cc(135, 0, 55, 1000);
        assert!((sensitivity(&c).value - 135.0 / 190.0).abs() < 1e-15);
        assert!((dice(&c).value - 270.0 / 325.0).abs() < 1e-15);
        assert!((iou(&c).value - 135.0 / 190.0).abs() < 1e-15);
        assert!((dice(&c).value - 0.8308).abs() < 5e-5);
    }

    #[test]
    fn perfect_and_empty_prediction() {
        let perfect = cc(20, 0, 0, 80);
        for m in [sensitivity(&perfect), specificity(&perfect), ppv(&perfect)] {
            assert_eq!(m, MetricValue::defined(1.0));
        }
        let empty = cc(0, 0, 20, 80);
        assert_eq!(sensitivity(&empty), MetricValue::defined(0.0));
        assert!(!ppv(&empty).defined);
        assert_eq!(ppv(&empty).value, 0.0);
    }

    #[test]
    fn vacuous_overlap_is_flagged_one() {
        let c = cc(0, 0, 0, 50);
        assert_eq!(dice(&c), MetricValue::undefined(1.0));
        assert_eq!(iou(&c), MetricValue::undefined(1.0));
        assert_eq!(dice(&cc(0, 4, 6, 10)).value, 0.0);
        assert_eq!(iou(&cc(0, 4, 6, 10)).value, 0.0);
    }

    #[test]
    fn mcc_examples() {
        assert_eq!(mcc(&cc(30, 0, 0, 70)).value, 1.0);
        assert_eq!(mcc(&cc(25, 25, 25, 25)).value, 0.0);
        // (90*890 - 100) / sqrt(100*100*900*900) = 80000/90000
        let v = mcc(&cc(90, 10, 10, 890)).value;
        assert!((v - 8.0 / 9.0).abs() < 1e-15, "{v}");
        assert!(!mcc(&cc(0, 0, 10, 90)).defined);
        assert!((mcc_rescaled(&cc(0, 50, 50, 0)).value - 0.0).abs() < 1e-15);
    }

    fn square(w: usize, top: usize, left: usize, side: usize) -> LabelMask {
        let mut m = LabelMask::zeros(w, w).unwrap();
        for r in top..top + side {
            for c in left..left + side {
                m.set(r, c, 1);
            }
        }
        m
    }

    #[test]
    fn hausdorff_translated_squares() {
        let a = boundary(&square(12, 2, 2, 4), 1);
        let b = boundary(&square(12, 2, 5, 4), 1);
        assert_eq!(hausdorff(&a, &b).unwrap().value, 3.0);
        assert_eq!(hausdorff(&a, &a).unwrap().value, 0.0);
    }

    #[test]
    fn hausdorff_empty_is_error() {
        let a = boundary(&square(6, 1, 1, 2), 1);
        let empty = boundary(&LabelMask::zeros(6, 6).unwrap(), 1);
        let err = hausdorff(&a, &empty).unwrap_err();
        assert_eq!(err.to_string(), "undefined Hausdorff: empty boundary");
    }

    #[test]
    fn generalized_dice_two_labels() {
        // Label 1: |G|=100, overlap 50, |S|=50. Label 2: |G|=10, overlap 5, |S|=5.
        let mut gt = LabelMask::zeros(20, 20).unwrap();
        let mut pred = LabelMask::zeros(20, 20).unwrap();
        for i in 0..100 {
            gt.set(i / 20, i % 20, 1);
            if i < 50 {
                pred.set(i / 20, i % 20, 1);
            }
        }
        for i in 0..10 {
            gt.set(10, i, 2);
            if i < 5 {
                pred.set(10, i, 2);
            }
        }
        let gd = generalized_dice(&gt, &pred, &[1, 2]).unwrap();
        assert!((gd.value.value - 2.0 / 3.0).abs() < 1e-12);
        assert!(gd.skipped.is_empty());
        assert_eq!(generalized_dice(&gt, &gt, &[1, 2]).unwrap().value.value, 1.0);

        let with_missing = generalized_dice(&gt, &pred, &[1, 2, 9]).unwrap();
        assert_eq!(with_missing.skipped, vec![9]);
        assert!(generalized_dice(&gt, &pred, &[8, 9]).is_err());
        assert!(generalized_dice(&gt, &pred, &[]).is_err());
    }
}
