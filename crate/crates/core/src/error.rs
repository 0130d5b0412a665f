use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radicand factor exceeds the trial-division bound {bound}: cofactor {cofactor}")]
    FactorizationLimit { bound: u64, cofactor: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("radicand must be positive, got {0}")]
    NonPositiveRadicand(String),

    #[error("cannot invert an element spanning radicands {0:?}")]
    UnsupportedRadicalTower(Vec<String>),

    #[error("square root needs an even leading order, got {0}")]
    OddLeadingOrder(i64),

    #[error("square root of {0} is not representable")]
    UnrepresentableRoot(String),

    #[error("logarithm needs constant term 1, got {0}")]
    NonUnitConstantTerm(String),

    #[error("exponential needs a vanishing constant term")]
    NonZeroConstantTerm,

    #[error("series is not invertible under composition: {0}")]
    NotInvertible(String),

    #[error("truncation too short: order {requested} requested, first untracked order is {truncation}")]
    TruncationTooShort { requested: i64, truncation: i64 },

    #[error("degenerate spectral curve: {0}")]
    DegenerateCurve(String),

    #[error("point {0} is a pole of the involution")]
    PoleInput(String),

    #[error("intersection number {0} is not tabulated")]
    NotTabulated(String),

    #[error("colored strata are only enumerated for dim <= 1, got dim {0}")]
    NotImplementedDimension(i64),

    #[error("(g, n) = ({g}, {n}) is not implemented")]
    NotImplementedCase { g: i64, n: i64 },

    #[error("unstable correlator ({g}, {n}) has no pole-basis form")]
    Unstable { g: u32, n: u32 },

    #[error("closed-form table mismatch at {table} {index}: series {series}, closed form {closed}")]
    TableMismatch {
        table: String,
        index: String,
        series: String,
        closed: String,
    },

    #[error("Wick enumeration too large: {0} letters")]
    TooLarge(usize),

    #[error("calibration failed: TR {tr}, Wick {wick}")]
    CalibrationFailed { tr: String, wick: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
