//! Partitions evaluations into good and bad and tests a metric's separation.

use segeval::stats::{levene_test, partition_by_quality, welch_t_test, QualityThresholds, DEFAULT_ALPHA};
use segeval::ConfusionCounts;

fn main() -> segeval::Result<()> {
    // (counts, metric value) per evaluated image
    let evals = [
        (ConfusionCounts::new(95, 4, 5, 900), 0.95),
        (ConfusionCounts::new(90, 8, 10, 900), 0.91),
        (ConfusionCounts::new(88, 2, 12, 900), 0.93),
        (ConfusionCounts::new(97, 9, 3, 900), 0.90),
        (ConfusionCounts::new(20, 70, 80, 900), 0.18),
        (ConfusionCounts::new(30, 60, 70, 900), 0.25),
        (ConfusionCounts::new(10, 95, 90, 900), 0.06),
        (ConfusionCounts::new(60, 40, 40, 900), 0.60),
    ];
    let thresholds = QualityThresholds::default();
    let counts: Vec<_> = evals.iter().map(|(c, _)| *c).collect();
    let part = partition_by_quality(&counts, &thresholds);
    println!("good {:?}, bad {:?}, unclassified {:?}", part.good, part.bad, part.unclassified);

    let good: Vec<f64> = part.good.iter().map(|&i| evals[i].1).collect();
    let bad: Vec<f64> = part.bad.iter().map(|&i| evals[i].1).collect();
    let welch = welch_t_test(&good, &bad)?.with_alpha(DEFAULT_ALPHA);
    println!(
        "welch: t={:.3} dof={:.2} p={:.3e} reject={}",
        welch.statistic,
        welch.dof,
        welch.p_value,
        welch.rejects()
    );
    let levene = levene_test(&good, &bad)?;
    println!("levene: W={:.3} p={:.3e}", levene.statistic, levene.p_value);
    Ok(())
}
