//! Error types, grouped by pipeline stage.

use thiserror::Error;

/// Errors raised while parsing ARFF or CSV text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: unsupported attribute type `{type_name}`")]
    UnsupportedAttributeType { line: usize, type_name: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    RowArity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: `{token}` is not declared for attribute `{attribute}`")]
    UndeclaredNominal {
        line: usize,
        token: String,
        attribute: String,
    },
    #[error("line {line}: `{token}` is not a finite number")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: {detail}")]
    Invalid { line: usize, detail: String },
}

impl ParseError {
    /// Line the error was reported on (1-based).
    pub fn line(&self) -> usize {
        match self {
            ParseError::MalformedHeader { line, .. }
            | ParseError::UnsupportedAttributeType { line, .. }
            | ParseError::RowArity { line, .. }
            | ParseError::UndeclaredNominal { line, .. }
            | ParseError::InvalidNumber { line, .. }
            | ParseError::Invalid { line, .. } => *line,
        }
    }
}

/// Violations of dataset structural invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("attribute name `{0}` appears more than once")]
    DuplicateAttribute(String),
    #[error("attribute `{0}` has an empty category list")]
    EmptyCategories(String),
    #[error("attribute `{0}` lists duplicate category `{1}`")]
    DuplicateCategory(String, String),
    #[error("row {row} has {found} cells, expected {expected}")]
    RowArity {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row}, attribute `{attribute}`: {detail}")]
    CellMismatch {
        row: usize,
        attribute: String,
        detail: String,
    },
    #[error("attribute index {0} out of range")]
    AttributeOutOfRange(usize),
    #[error("no attribute named `{0}`")]
    NoSuchAttribute(String),
    #[error("dataset has no rows")]
    Empty,
    #[error("{0}")]
    Invalid(String),
}

/// Errors from training or applying a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("k = {k} exceeds the {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("expected exactly two classes in the training labels, found {0}")]
    NotBinary(usize),
    #[error("row has {found} features, model expects {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("task mismatch: {0}")]
    TaskMismatch(String),
    #[error("feature subsample size {m} exceeds feature count {n}")]
    SubsampleTooLarge { m: usize, n: usize },
    #[error("every code column degenerated to a single class")]
    AllColumnsSkipped,
}

/// Errors from splitting or scoring.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("cannot split {n} rows with scheme `{detail}`")]
    BadSplit { n: usize, detail: String },
    #[error("label vectors have different lengths ({truth} vs {predicted})")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label index {0} is outside the class list")]
    UnknownLabel(usize),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("target attribute is degenerate: {0}")]
    DegenerateTarget(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from the imputation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImputeError {
    #[error("target attribute `{0}` has no missing cells to impute")]
    NothingToImpute(String),
    #[error("attribute `{0}` has no observed values")]
    NoObservedValues(String),
    #[error("attribute `{0}` has fewer than two observed rows")]
    TooFewObserved(String),
    #[error("imputed dataset still has a missing cell at row {row}, attribute `{attribute}`")]
    IncompleteImputation { row: usize, attribute: String },
    #[error("masked-cell log does not match the dataset: {0}")]
    LogMismatch(String),
    #[error("imputation chains have mismatched schemas")]
    SchemaMismatch,
    #[error("no candidate model could be evaluated: {0}")]
    NoViableCandidate(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Any error this crate can produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Impute(#[from] ImputeError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
