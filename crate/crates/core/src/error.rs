use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("undefined Hausdorff: empty boundary")]
    EmptyBoundary,

    #[error("none of the labels {0:?} is present in the ground truth")]
    NoLabelsInGroundTruth(Vec<u8>),

    #[error("canvas {width}x{height} too small for scenario {scenario} (minimum {min_width}x{min_height})")]
    CanvasTooSmall {
        scenario: String,
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("group {group}: {reason}")]
    DegenerateGroup { group: String, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient samples: {good} good / {bad} bad (need at least 2 in each)")]
    InsufficientSamples { good: usize, bad: usize },

    #[error("unknown metric: {0}")]
    UnknownMetric(String),

    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),

    #[error("unsupported color type: {0}")]
    UnsupportedColorType(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("no matching stems between {gt_dir} and {pred_dir}")]
    NoMatchingStems { gt_dir: PathBuf, pred_dir: PathBuf },

    #[error("missing MOS for stems: {}", .0.join(","))]
    MissingMos(Vec<String>),

    #[error("missing column {0}")]
    MissingColumn(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMask(_) => "invalid_mask",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EmptyBoundary => "empty_boundary",
            Error::NoLabelsInGroundTruth(_) => "no_labels_in_ground_truth",
            Error::CanvasTooSmall { .. } => "canvas_too_small",
            Error::DegenerateGroup { .. } => "degenerate_group",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::UnknownMetric(_) => "unknown_metric",
            Error::UnsupportedBitDepth(_) => "unsupported_bit_depth",
            Error::UnsupportedColorType(_) => "unsupported_color_type",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::Malformed(_) => "malformed",
            Error::NoMatchingStems { .. } => "no_matching_stems",
            Error::MissingMos(_) => "missing_mos",
            Error::MissingColumn(_) => "missing_column",
            Error::File { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn with_path(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn dims(left: (usize, usize), right: (usize, usize)) -> Error {
        Error::DimensionMismatch {
            left_width: left.0,
            left_height: left.1,
            right_width: right.0,
            right_height: right.1,
        }
    }
}
