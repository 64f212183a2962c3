use thiserror::Error;

/// Errors shared across the encoding, storage, and query paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column is empty")]
    EmptyColumn,
    #[error("column {name:?} is not integer-valued")]
    NotInteger { name: String },
    #[error("column lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("incompatible units: {left} vs {right}")]
    UnitMismatch { left: String, right: String },
    #[error("column {name:?} has {len} rows, block expects {expected}")]
    RowCountMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("block of {rows} rows exceeds capacity {capacity}")]
    BlockTooLarge { rows: usize, capacity: usize },
    #[error("baseline size must be positive")]
    ZeroBaseline,
    #[error("date {year:04}-{month:02}-{day:02} is invalid or out of range")]
    DateOutOfRange { year: i32, month: u32, day: u32 },
    #[error("bit width {width} exceeds 64")]
    InvalidWidth { width: u32 },
    #[error("value {value} at index {index} does not fit in {width} bits")]
    ValueTooWide { index: usize, value: u64, width: u32 },
    #[error("index {index} out of bounds (len {len})")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("unknown column {id}")]
    UnknownColumn { id: usize },
    #[error("no reference groups given")]
    NoGroups,
    #[error("{got} reference groups exceed the limit of {max}")]
    TooManyGroups { got: usize, max: usize },
    #[error("invalid probability mix: {reason}")]
    InvalidMix { reason: String },
    #[error("selectivity {0} out of range (0, 1]")]
    SelectivityOutOfRange(f64),
    #[error("bad magic bytes (not a block file)")]
    BadMagic,
    #[error("unsupported block format version {0}")]
    VersionMismatch(u16),
    #[error("truncated block: {context}")]
    Truncated { context: String },
    #[error("column {column} references missing column {reference}")]
    DanglingReference { column: u16, reference: u16 },
    #[error("plan does not fit block: {reason}")]
    PlanMismatch { reason: String },
    #[error("malformed {what}: {reason} (line {line})")]
    Parse {
        what: String,
        reason: String,
        line: u64,
    },
    #[error("materialized output differs from reference data: {context}")]
    VerificationFailed { context: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
