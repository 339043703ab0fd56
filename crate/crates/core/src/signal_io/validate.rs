use std::fmt;

use serde::{Deserialize, Serialize};

use super::phonemes::{self, Occurrence};
use super::{AnnotationSet, Segment, Tier, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    SegmentPastEof,
    IllegalGeminate,
    NonStopTarget,
    BadGemType,
    Overlap,
    NonMonotonic,
    PairingError,
    ParseError,
    MissingPreVowel,
    NonVowelContext,
    MissingMetadata,
    UnknownPhone,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::SegmentPastEof => "SEGMENT_PAST_EOF",
            IssueCode::IllegalGeminate => "ILLEGAL_GEMINATE",
            IssueCode::NonStopTarget => "NON_STOP_TARGET",
            IssueCode::BadGemType => "BAD_GEM_TYPE",
            IssueCode::Overlap => "OVERLAP",
            IssueCode::NonMonotonic => "NON_MONOTONIC",
            IssueCode::PairingError => "PAIRING_ERROR",
            IssueCode::ParseError => "PARSE_ERROR",
            IssueCode::MissingPreVowel => "MISSING_PRE_VOWEL",
            IssueCode::NonVowelContext => "NON_VOWEL_CONTEXT",
            IssueCode::MissingMetadata => "MISSING_METADATA",
            IssueCode::UnknownPhone => "UNKNOWN_PHONE",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub message: String,
    pub location: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_analyzable(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error(&mut self, code: IssueCode, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Issue {
            code,
            message: message.into(),
            location: location.into(),
        });
    }

    pub fn warning(&mut self, code: IssueCode, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Issue {
            code,
            message: message.into(),
            location: location.into(),
        });
    }

    /// Plain-text rendering, one issue per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.errors {
            out.push_str(&format!("error\t{e}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning\t{w}\n"));
        }
        if self.errors.is_empty() && self.warnings.is_empty() {
            out.push_str("ok\n");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    /// Reject `gem_type` on phones that are not stops.
    pub stop_only: bool,
    /// Largest gap between a vowel's end and the consonant's start for the
    /// vowel to count as pre-consonant.
    pub contiguity_tolerance_s: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            stop_only: false,
            contiguity_tolerance_s: 1e-4,
        }
    }
}

pub fn validate_annotations(ann: &AnnotationSet, wave: &Waveform) -> ValidationReport {
    validate_annotations_with(ann, wave, &ValidationConfig::default())
}

/// Checks an annotation set against its waveform. Never fails; everything
/// found is reported. Each error depends on one segment or one overlapping
/// pair, so adding segments can only add errors.
pub fn validate_annotations_with(
    ann: &AnnotationSet,
    wave: &Waveform,
    config: &ValidationConfig,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let eof = wave.duration_s();
    let segments = ann.segments();

    for seg in segments {
        if !(seg.end_s > seg.start_s) {
            report.error(IssueCode::NonMonotonic, seg.locator(), "end is not after start");
        }
        if seg.end_s > eof + 0.5 / wave.sample_rate_hz() as f64 {
            report.error(
                IssueCode::SegmentPastEof,
                seg.locator(),
                format!("ends at {} s but audio lasts {eof} s", seg.end_s),
            );
        }
    }

    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            if a.tier == b.tier && a.start_s < b.end_s && b.start_s < a.end_s {
                report.error(
                    IssueCode::Overlap,
                    a.locator(),
                    format!("overlaps {}", b.locator()),
                );
            }
        }
    }

    for seg in ann.targets() {
        check_target(ann, seg, config, &mut report);
    }
    report
}

fn check_target(ann: &AnnotationSet, seg: &Segment, config: &ValidationConfig, report: &mut ValidationReport) {
    debug_assert_eq!(seg.tier, Tier::Phone);
    let gem_type = match seg.gem_type() {
        Some(Ok(g)) => g,
        Some(Err(msg)) => {
            report.error(IssueCode::BadGemType, seg.locator(), msg);
            return;
        }
        None => return,
    };

    match phonemes::lookup(&seg.label) {
        Some(c) => {
            if gem_type.is_geminate() && c.occurrence == Occurrence::NeverGeminate {
                report.error(
                    IssueCode::IllegalGeminate,
                    seg.locator(),
                    format!("/{}/ never occurs in geminated form", c.ipa),
                );
            }
            if config.stop_only && c.manner != phonemes::Manner::Stop {
                report.error(
                    IssueCode::NonStopTarget,
                    seg.locator(),
                    format!("/{}/ is not a stop consonant", c.ipa),
                );
            }
        }
        None => {
            if config.stop_only {
                report.error(
                    IssueCode::NonStopTarget,
                    seg.locator(),
                    format!("'{}' is not a known stop consonant", seg.label),
                );
            } else {
                report.warning(IssueCode::UnknownPhone, seg.locator(), "label not in the consonant inventory");
            }
        }
    }

    match ann.preceding_phone(seg, config.contiguity_tolerance_s) {
        Some(prev) if !phonemes::is_vowel(&prev.label) => report.warning(
            IssueCode::NonVowelContext,
            seg.locator(),
            format!("preceding phone '{}' is not a vowel", prev.label),
        ),
        Some(_) => {}
        None if seg.attr("initial").is_some_and(|v| v == "true") => {}
        None => report.warning(
            IssueCode::MissingPreVowel,
            seg.locator(),
            "no contiguous pre-consonant vowel; vowel duration will be absent",
        ),
    }

    for key in ["speaker", "sentence_id"] {
        if seg.attr(key).is_none_or(str::is_empty) {
            report.warning(IssueCode::MissingMetadata, seg.locator(), format!("missing '{key}' attribute"));
        }
    }
}
