//! Overlap and distance metrics for one label.

use segeval::classic::{accuracy, dice, generalized_dice, hausdorff, iou, mcc, mcc_rescaled, ppv, sensitivity, specificity};
use segeval::mask::{boundary, confusion_counts};
use segeval::synth::{generate, ScenarioName, ScenarioSpec};

fn main() -> segeval::Result<()> {
    let (gt, pred) = generate(&ScenarioSpec::new(ScenarioName::MultisizeB))?;
    let c = confusion_counts(&gt, &pred, 1)?;
    println!("tp={} fp={} fn={} tn={}", c.tp, c.fp, c.fn_, c.tn);

    let rows = [
        ("accuracy", accuracy(&c)),
        ("sensitivity", sensitivity(&c)),
        ("specificity", specificity(&c)),
        ("ppv", ppv(&c)),
        ("iou", iou(&c)),
        ("dice", dice(&c)),
        ("mcc", mcc(&c)),
        ("mcc (0..1)", mcc_rescaled(&c)),
    ];
    for (name, v) in rows {
        println!("{name:>12}: {:.4}{}", v.value, if v.defined { "" } else { " (undefined)" });
    }

    let hd = hausdorff(&boundary(&gt, 1), &boundary(&pred, 1))?;
    println!("{:>12}: {:.4}", "hausdorff", hd.value);
    let gd = generalized_dice(&gt, &pred, &[1])?;
    println!("{:>12}: {:.4}", "gen. dice", gd.value.value);

    // Undefined denominators are flagged rather than raised.
    let empty = segeval::ConfusionCounts::new(0, 0, 0, 100);
    let d = dice(&empty);
    println!("dice on two empty masks: {} (defined: {})", d.value, d.defined);
    Ok(())
}
