//! Per-segment and per-label detail of an SSEGEP evaluation.

use segeval::mask::Connectivity;
use segeval::ssegep::ssegep;
use segeval::LabelMask;

fn main() -> segeval::Result<()> {
    // Two labels; label 1 has a large and a small segment.
    let gt = LabelMask::from_rows(&[
        [1, 1, 1, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 2, 2, 0],
        [1, 1, 1, 0, 0, 2, 2, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
    ])?;
    let pred = LabelMask::from_rows(&[
        [1, 1, 1, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 2, 2, 2],
        [1, 1, 0, 0, 0, 2, 2, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ])?;

    let b = ssegep(&gt, &pred, &[1, 2], Connectivity::Eight)?;
    println!("score {:.4} over {} segments", b.score, b.n_segments);
    for m in &b.matches {
        println!(
            "  label {} segment {}: {}/{} hit, contributes {:.4}",
            m.label, m.segment_index, m.tp_count, m.gt_area, m.contribution
        );
    }
    for f in &b.fp_stats {
        println!("  label {}: {} FP over {} TP -> {:.4}", f.label, f.fp_count, f.label_tp_total, f.weighted_fp);
    }
    for l in &b.per_label {
        println!("  label {} alone: {:.4}", l.label, l.score);
    }
    println!("weighted tp {:.4}, weighted fp {:.4}", b.weighted_tp(), b.weighted_fp());
    Ok(())
}
