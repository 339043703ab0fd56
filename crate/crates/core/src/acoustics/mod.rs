//! Energy contours, closure/burst detection and burst power.

mod detect;
mod energy;
mod power;

use thiserror::Error;

use crate::Interval;

pub use detect::{
    classify_burst_count, detect_acoustic_events, detect_with_trace, AcousticEvent, BurstCount,
    DetectionTrace, DetectorConfig, EventKind, EventSequence,
};
pub use energy::{mean_square_gain, raised_cosine, short_time_energy, EnergyContour};
pub use power::{burst_power, mean_square};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AcousticsError {
    #[error("interval {0} lies outside the waveform or is empty")]
    IntervalOutOfRange(Interval),
    #[error("analysis window of {samples} samples is too short")]
    DegenerateWindow { samples: usize },
    #[error("interval {0} holds no samples")]
    EmptyInterval(Interval),
    #[error("no burst found in {0}")]
    NoBurstFound(Interval),
    #[error("more than two bursts: {}", fmt_candidates(.candidates))]
    MoreThanTwoBursts { candidates: Vec<(f64, f64)> },
    #[error("inconsistent events: {0}")]
    InconsistentEvents(String),
    #[error("bad detector configuration: {0}")]
    BadConfig(String),
}

impl AcousticsError {
    /// Short name used in the token CSV error column.
    pub fn code(&self) -> &'static str {
        match self {
            AcousticsError::IntervalOutOfRange(_) => "IntervalOutOfRange",
            AcousticsError::DegenerateWindow { .. } => "DegenerateWindow",
            AcousticsError::EmptyInterval(_) => "EmptyInterval",
            AcousticsError::NoBurstFound(_) => "NoBurstFound",
            AcousticsError::MoreThanTwoBursts { .. } => "MoreThanTwoBursts",
            AcousticsError::InconsistentEvents(_) => "InconsistentEvents",
            AcousticsError::BadConfig(_) => "BadConfig",
        }
    }
}

fn fmt_candidates(c: &[(f64, f64)]) -> String {
    c.iter()
        .map(|(a, b)| format!("[{a:.4}, {b:.4}]"))
        .collect::<Vec<_>>()
        .join(" ")
}
