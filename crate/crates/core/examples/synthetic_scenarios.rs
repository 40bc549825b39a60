//! Generates every synthetic scenario and compares Dice with SSEGEP.
//!
//! Pass a directory to also write the masks as PNG files.

use std::path::PathBuf;

use segeval::classic::dice;
use segeval::io::{save_mask_file, MaskFormat};
use segeval::mask::{confusion_counts, Connectivity};
use segeval::ssegep::ssegep;
use segeval::synth::{generate, ScenarioName, ScenarioSpec};

fn main() -> segeval::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    println!("{:<16} {:>9} {:>8} {:>8}", "scenario", "canvas", "dice", "ssegep");
    for name in ScenarioName::ALL {
        let spec = ScenarioSpec::new(name);
        let (gt, pred) = generate(&spec)?;
        let d = dice(&confusion_counts(&gt, &pred, 1)?).value;
        let s = ssegep(&gt, &pred, &[1], Connectivity::Eight)?.score;
        let canvas = format!("{}x{}", spec.width, spec.height);
        println!("{name:<16} {canvas:>9} {d:>8.4} {s:>8.4}");
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir)?;
            save_mask_file(dir.join(format!("{name}-gt.png")), &gt, MaskFormat::Png)?;
            save_mask_file(dir.join(format!("{name}-pred.png")), &pred, MaskFormat::Png)?;
        }
    }
    Ok(())
}
