use std::fmt;

use serde::Serialize;

use super::DurationRecord;

pub const DEFAULT_RATIO_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Singleton,
    Geminate,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Singleton => "singleton",
            Verdict::Geminate => "geminate",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeminationCall {
    pub verdict: Verdict,
    pub ratio_used: Option<f64>,
    pub threshold: f64,
}

/// Geminate when Cd/Vd reaches the threshold; a ratio equal to the threshold
/// counts as geminate.
pub fn classify_gemination(record: &DurationRecord, threshold: f64) -> GeminationCall {
    classify_ratio(record.ratio(), threshold)
}

pub fn classify_ratio(ratio: Option<f64>, threshold: f64) -> GeminationCall {
    let verdict = match ratio {
        None => Verdict::Indeterminate,
        Some(r) if r >= threshold => Verdict::Geminate,
        Some(_) => Verdict::Singleton,
    };
    GeminationCall { verdict, ratio_used: ratio, threshold }
}
