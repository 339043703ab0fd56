use std::path::Path;

use gemination_core::synth::{generate_corpus, CorpusSpec, SynthError};

use super::write_file;
use crate::{CliError, RunConfig, Status};

/// Token count of the built-in reference corpus.
pub const DEFAULT_TOKENS: usize = 392;

fn from_synth(e: SynthError) -> CliError {
    match e {
        SynthError::Io { path, message } => CliError::Io(format!("{path}: {message}")),
        other => CliError::Data(other.to_string()),
    }
}

/// Generates a corpus from a TOML spec, or the built-in reference corpus
/// when no spec is given. `tokens` overrides the spec's token count.
pub fn synth(spec_path: Option<&Path>, tokens: Option<usize>, out_dir: &Path, config: &RunConfig) -> Result<Status, CliError> {
    let mut spec = match spec_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            CorpusSpec::from_toml_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        }
        None => CorpusSpec::reference_geminates(DEFAULT_TOKENS),
    };
    if let Some(n) = tokens {
        spec.n_tokens = n;
    }
    let pool = config.thread_pool()?;
    let summary = pool.install(|| generate_corpus(&spec, config.seed, out_dir)).map_err(from_synth)?;
    write_file(&out_dir.join("corpus.toml"), spec.to_toml_string())?;
    eprintln!("{} token(s) written to {} (seed {})", summary.n_tokens, out_dir.display(), config.seed);
    for (class, n) in &summary.class_counts {
        eprintln!("  {class}\t{n}");
    }
    Ok(Status::Clean)
}
