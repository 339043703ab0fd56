//! Descriptive statistics, one-way ANOVA with F-distribution p-values,
//! η² effect sizes and the corpus report.

mod anova;
mod report;
mod special;

use thiserror::Error;

pub use anova::{
    classify_effect_size, descriptive, format_p, one_way_anova, AnovaResult, Descriptives, EffectLabel,
    GroupedSample, LARGE_EFFECT, MEDIUM_EFFECT, SMALL_EFFECT,
};
pub use report::{
    build_report, render_json, render_text, series_csv, AnovaFamily, AnovaOutcome, AnovaTest, BurstCountRow,
    Cell, ClassRow, DurationGroup, DurationRow, GroupSummary, NamedCell, Report, ReportConfig, SERIES_FILES,
};
pub use special::{f_cdf, f_sf, ln_gamma, regularized_beta};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("no values")]
    EmptyInput,
    #[error("ANOVA needs at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("group '{0}' is empty")]
    EmptyGroup(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("every group is internally constant")]
    ZeroWithinVariance,
    #[error("incomplete beta did not converge for a = {a}, b = {b}, x = {x}")]
    NonConvergence { a: f64, b: f64, x: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl StatsError {
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::EmptyInput => "EmptyInput",
            StatsError::TooFewGroups(_) => "TooFewGroups",
            StatsError::EmptyGroup(_) => "InsufficientData",
            StatsError::InsufficientData(_) => "InsufficientData",
            StatsError::ZeroWithinVariance => "ZeroWithinVariance",
            StatsError::NonConvergence { .. } => "NonConvergence",
            StatsError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
