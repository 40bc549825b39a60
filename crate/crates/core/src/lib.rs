//! Segmentation evaluation with small-segment emphasis.
//!
//! The crate scores a predicted label mask against a ground-truth mask with
//! the usual overlap and boundary metrics (accuracy, sensitivity,
//! specificity, PPV, IoU, Dice, MCC, Hausdorff, generalized Dice) and with
//! [`ssegep`](ssegep::ssegep), a score that weighs every ground-truth segment
//! equally so that missing a small lesion costs as much as missing a large
//! one. It also carries the statistics used to validate metrics against each
//! other ([`stats`]) and synthetic scenarios where the metrics disagree
//! ([`synth`]).
//!
//! ```
//! use segeval::mask::Connectivity;
//! use segeval::synth::{generate, ScenarioName, ScenarioSpec};
//!
//! let (gt, pred) = generate(&ScenarioSpec::new(ScenarioName::MultisegmentE)).unwrap();
//! let counts = segeval::mask::confusion_counts(&gt, &pred, 1).unwrap();
//! let dice = segeval::classic::dice(&counts).value;
//! let score = segeval::ssegep::ssegep(&gt, &pred, &[1], Connectivity::Eight).unwrap().score;
//! assert!((dice - 0.8308).abs() < 1e-4);
//! assert!((score - 0.5444).abs() < 1e-4);
//! ```
//!
//! Runnable walkthroughs live in the crate's `examples/` directory
//! (`cargo run -p segeval --example <name>`).

pub mod classic;
pub mod error;
pub mod io;
pub mod mask;
pub mod report;
pub mod ssegep;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use mask::{Connectivity, ConfusionCounts, Label, LabelMask};
