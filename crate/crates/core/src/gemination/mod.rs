//! Durational parameters, ratio-based geminate classification and the token
//! table format.

mod classify;
mod durations;
mod measure;
mod token;

use thiserror::Error;

pub use classify::{classify_gemination, classify_ratio, GeminationCall, Verdict, DEFAULT_RATIO_THRESHOLD};
pub use durations::{extract_durations, ClosureBurst, DurationRecord, Releases};
pub use measure::{measure_annotation, MeasureConfig, Measurement};
pub use token::{
    build_token, format_ms, natural_cmp, read_tokens_csv, token_fields, write_tokens_csv, Token, TokenMeta,
    TokenRow, ERROR_COLUMN, TOKEN_COLUMNS,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeminationError {
    #[error("inconsistent events: {0}")]
    InconsistentEvents(String),
    #[error("missing metadata '{field}' for {location}")]
    MissingMetadata { field: &'static str, location: String },
    #[error("inconsistent token: {0}")]
    InconsistentToken(String),
    #[error("token table line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("token table I/O: {0}")]
    Io(String),
}

impl GeminationError {
    pub fn code(&self) -> &'static str {
        match self {
            GeminationError::InconsistentEvents(_) => "InconsistentEvents",
            GeminationError::MissingMetadata { .. } => "MissingMetadata",
            GeminationError::InconsistentToken(_) => "InconsistentToken",
            GeminationError::Csv { .. } => "CsvError",
            GeminationError::Io(_) => "IoError",
        }
    }
}
