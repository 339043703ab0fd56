//! Audio and annotation ingestion.

mod annotation;
pub mod phonemes;
mod validate;
mod wav;

use std::sync::Arc;

use thiserror::Error;

pub use annotation::{
    parse_annotation_str, parse_annotations, serialize_annotations, AnnotationSet, GemType,
    Segment, Tier,
};
pub use validate::{
    validate_annotations, validate_annotations_with, Issue, IssueCode, ValidationConfig,
    ValidationReport,
};
pub use wav::{decode_wav, encode_wav, load_waveform, quantize, requantize, write_waveform};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("not a RIFF/WAVE file")]
    NotWav,
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated file: {0}")]
    TruncatedFile(String),
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("overlapping {tier} segments at lines {first_line} and {second_line}")]
    OverlapError {
        tier: Tier,
        first_line: usize,
        second_line: usize,
    },
    #[error("segment at line {line} ends at or before its start")]
    NonMonotonic { line: usize },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Sampled mono audio normalized to [-1, 1].
///
/// Samples are shared behind an `Arc`, so clones are cheap and the buffer is
/// never mutated after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Arc<[f64]>,
    sample_rate_hz: u32,
    source_path: String,
}

impl Waveform {
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: u32,
        source_path: impl Into<String>,
    ) -> Result<Self, SignalError> {
        if sample_rate_hz == 0 {
            return Err(SignalError::InvalidWaveform("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(SignalError::InvalidWaveform("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !(-1.0..=1.0).contains(s)) {
            return Err(SignalError::InvalidWaveform(format!(
                "sample {i} = {} outside [-1, 1]",
                samples[i]
            )));
        }
        Ok(Waveform {
            samples: samples.into(),
            sample_rate_hz,
            source_path: source_path.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Sample index nearest to time `t_s`. Not clamped.
    pub fn index_at(&self, t_s: f64) -> i64 {
        (t_s * self.sample_rate_hz as f64).round() as i64
    }

    /// Sample index range covering `[start_s, end_s)`, or `None` when the
    /// interval leaves the waveform.
    pub fn sample_range(&self, start_s: f64, end_s: f64) -> Option<std::ops::Range<usize>> {
        let (a, b) = (self.index_at(start_s), self.index_at(end_s));
        if a < 0 || b > self.samples.len() as i64 || a > b {
            return None;
        }
        Some(a as usize..b as usize)
    }
}
