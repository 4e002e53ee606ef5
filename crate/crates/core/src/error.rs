use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(
        "track `{selector}` spans {span:.3} degrees of longitude after unwrapping; \
         unwrap longitudes (add or subtract 360) or split the track so it spans less than 90 degrees"
    )]
    LongitudeSpan { selector: String, span: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("ragged series: element {index} has dimension {found}, expected {expected}")]
    Ragged {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("series of length {len} is too short for the embedding; need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distance table: {0}")]
    InvalidTable(String),

    #[error("{n} points exceed the naive reduction limit of {max}")]
    TooManyPoints { n: usize, max: usize },

    #[error("scale {r} exceeds the diagram's filtration cap {cap}")]
    BeyondCap { r: f64, cap: f64 },

    #[error("unknown outlier method `{0}` (expected `absolute` or `mad`)")]
    UnknownMethod(String),

    #[error("track `{selector}`: {reason}")]
    Augmentation { selector: String, reason: String },

    #[error("dataset needs both clean and augmented tracks")]
    SingleLabel,

    #[error("no eligible tracks for augmentation")]
    NoEligibleTracks,

    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
}
