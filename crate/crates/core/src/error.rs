use thiserror::Error;

use crate::model::AnchorModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("invalid disk: {0}")]
    InvalidDisk(String),

    #[error("negative or non-finite reach ({0})")]
    InvalidReach(f64),

    #[error("degenerate pair: coincident anchors with zero-length labels")]
    DegeneratePair,

    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("expected a {expected} instance, got {found}")]
    WrongModel {
        expected: String,
        found: AnchorModel,
    },

    #[error("label index {index} out of range for an instance of {n} labels")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("missing anchor choice for selected label {0}")]
    MissingAnchorChoice(usize),

    #[error("anchor choice {offset} for label {index} is not legal under the {model} model")]
    IllegalAnchorChoice {
        index: usize,
        offset: f64,
        model: AnchorModel,
    },

    #[error("instance has {n} labels, above the exact-solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(f64),

    #[error("k must be at least 1, got {0}")]
    InvalidK(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("disk {id} lies outside the root cell after shifting")]
    OutsideRoot { id: usize },

    #[error("boundary set is not pairwise compatible (disks {0} and {1})")]
    IncompatibleBoundary(usize, usize),

    #[error("dynamic program exceeded its enumeration limit at node {node}: {detail}")]
    EnumerationLimit { node: usize, detail: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
