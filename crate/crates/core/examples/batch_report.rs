//! Writes synthetic pairs to a temporary directory and evaluates them as a batch.

use segeval::io::{save_mask_file, MaskFormat};
use segeval::report::{self, evaluate_batch, MetricName, RunConfig};
use segeval::synth::{generate, ScenarioName, ScenarioSpec};

fn main() -> segeval::Result<()> {
    let dir = tempfile::tempdir()?;
    let (gt_dir, pred_dir) = (dir.path().join("gt"), dir.path().join("pred"));
    std::fs::create_dir_all(&gt_dir)?;
    std::fs::create_dir_all(&pred_dir)?;
    for name in ScenarioName::ALL {
        let (gt, pred) = generate(&ScenarioSpec::new(name))?;
        save_mask_file(gt_dir.join(format!("{name}.png")), &gt, MaskFormat::Png)?;
        save_mask_file(pred_dir.join(format!("{name}.pgm")), &pred, MaskFormat::Pgm)?;
    }

    let cfg = RunConfig {
        metrics: vec![MetricName::Dice, MetricName::Iou, MetricName::Hausdorff, MetricName::Ssegep],
        parallelism: 4,
        ..Default::default()
    };
    let batch = evaluate_batch(&gt_dir, &pred_dir, &cfg)?;
    for w in &batch.warnings {
        eprintln!("warning: {w}");
    }
    report::write_batch_csv(std::io::stdout(), &batch, &cfg.metrics, false)?;
    Ok(())
}
