//! Synthetic VCV stimuli with exact ground truth, and seeded corpora built
//! from them.

mod corpus;
mod rng;
mod stimulus;

use thiserror::Error;

pub use corpus::{
    apportion, generate_corpus, manifest_fields, manifest_header, plan_corpus, synthesize_corpus, token_id,
    write_manifest, ClassSpec, CorpusSpec, CorpusSummary, CorpusToken, SpeakerSpec, GROUND_TRUTH_COLUMNS,
    TRUNCATION_FRACTION,
};
pub use rng::SplitMix64;
pub use stimulus::{synthesize_vcv, GroundTruth, ReleaseSpec, StimulusLabels, StimulusSpec, RAMP_MS};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SynthError {
    #[error("infeasible stimulus: {0}")]
    SpecInfeasible(String),
    #[error("bad corpus spec: {0}")]
    BadSpec(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
