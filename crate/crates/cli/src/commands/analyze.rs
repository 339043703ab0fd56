use std::path::Path;

use gemination_core::gemination::{measure_annotation, natural_cmp, write_tokens_csv, TokenRow};
use rayon::prelude::*;

use super::write_file;
use crate::corpus::{load_annotations, load_audio, pair_files, Pair};
use crate::{CliError, RunConfig, Status};

struct Located {
    stem: String,
    start_s: f64,
    row: TokenRow,
}

fn measure_pair(pair: &Pair, config: &RunConfig) -> Result<Vec<Located>, CliError> {
    let ann = load_annotations(&pair.annotation)?
        .map_err(|e| CliError::Data(format!("{}: {e}", pair.annotation.display())))?;
    let audio = pair.audio.as_ref().ok_or_else(|| {
        CliError::Data(format!("{}: PAIRING_ERROR: no recording named {}.wav", pair.annotation.display(), pair.stem))
    })?;
    let wave = load_audio(audio)?.map_err(|e| CliError::Data(format!("{}: {e}", audio.display())))?;
    Ok(measure_annotation(&wave, &ann, &config.measure())
        .into_iter()
        .map(|m| Located { stem: pair.stem.clone(), start_s: m.target.start_s, row: m.row })
        .collect())
}

/// Measures every annotated stop in the corpus. Rows come back ordered by
/// speaker, sentence, repetition, segment start and file, whatever the
/// thread count.
pub fn analyze_rows(audio_dir: &Path, annotation_dir: &Path, config: &RunConfig) -> Result<Vec<TokenRow>, CliError> {
    let pairing = pair_files(audio_dir, annotation_dir)?;
    let pool = config.thread_pool()?;
    let per_file: Vec<Vec<Located>> =
        pool.install(|| pairing.pairs.par_iter().map(|p| measure_pair(p, config)).collect::<Result<_, _>>())?;
    let mut rows: Vec<Located> = per_file.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        let (ma, mb) = (a.row.meta(), b.row.meta());
        natural_cmp(&ma.speaker, &mb.speaker)
            .then_with(|| natural_cmp(&ma.sentence_id, &mb.sentence_id))
            .then_with(|| natural_cmp(&ma.repetition, &mb.repetition))
            .then_with(|| a.start_s.total_cmp(&b.start_s))
            .then_with(|| a.stem.cmp(&b.stem))
    });
    Ok(rows.into_iter().map(|l| l.row).collect())
}

/// Writes the token table for a corpus to `out`.
pub fn analyze(audio_dir: &Path, annotation_dir: &Path, out: &Path, config: &RunConfig) -> Result<Status, CliError> {
    let rows = analyze_rows(audio_dir, annotation_dir, config)?;
    let mut buf = Vec::new();
    write_tokens_csv(&rows, &mut buf).map_err(|e| CliError::Data(e.to_string()))?;
    write_file(out, buf)?;
    let failed = rows.iter().filter(|r| r.token().is_none()).count();
    eprintln!("{} token(s) written to {}, {failed} with errors", rows.len(), out.display());
    Ok(Status::Clean)
}
