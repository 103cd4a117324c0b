//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a {expected_rows}x{expected_cols} table, got {rows}x{cols}")]
    Dimension {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("row {row}: link type must be 0, 1 or 2, got {value}")]
    InvalidLinkType { row: usize, value: f64 },
    #[error("row {row}, column {col}: value is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("row {row}: parameter {param} must be nonnegative, got {value}")]
    NegativeLength {
        row: usize,
        param: &'static str,
        value: f64,
    },
    #[error("row {row}: frequency must be nonnegative, got {value}")]
    NegativeFrequency { row: usize, value: f64 },
    #[error("link index {index} is outside 1..=6")]
    LinkIndex { index: usize },
    #[error("no joint value provided for link {link}")]
    MissingJointValue { link: usize },
    #[error("sensor samples do not match the compiled plan: {details}")]
    InconsistentPlan { details: String },
    #[error("mode 2 requires all three input tables; missing: {missing}")]
    MissingInputs { missing: String },
    #[error("invalid range for {what}: [{lo}, {hi}]")]
    InvalidRange { what: String, lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { expected: u32, found: u32 },
    #[error("failed to parse {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("batch item {index}: {source}")]
    BatchItem {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code class: 2 = bad configuration or input data,
    /// 3 = I/O or file-format trouble, 4 = internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension { .. }
            | Error::InvalidLinkType { .. }
            | Error::NonFinite { .. }
            | Error::NegativeLength { .. }
            | Error::NegativeFrequency { .. }
            | Error::LinkIndex { .. }
            | Error::MissingJointValue { .. }
            | Error::MissingInputs { .. }
            | Error::InvalidRange { .. }
            | Error::Config(_)
            | Error::Parse { .. } => 2,
            Error::Io(_) | Error::FormatVersion { .. } => 3,
            Error::InconsistentPlan { .. } => 4,
            Error::BatchItem { source, .. } => source.exit_code(),
        }
    }
}
