use std::fmt::Write as _;
use std::path::Path;

use gemination_core::signal_io::{validate_annotations_with, AnnotationError, IssueCode, ValidationReport};
use rayon::prelude::*;

use super::write_file;
use crate::corpus::{load_annotations, load_audio, pair_files, Pair};
use crate::{CliError, RunConfig, Status};

/// Checks one annotation file against its recording.
pub fn validate_pair(pair: &Pair, config: &RunConfig) -> Result<ValidationReport, CliError> {
    let mut report = ValidationReport::default();
    let file = pair.annotation.display().to_string();
    let ann = match load_annotations(&pair.annotation)? {
        Ok(ann) => Some(ann),
        Err(e) => {
            let (code, location) = match &e {
                AnnotationError::SyntaxError { line, column, .. } => (IssueCode::ParseError, format!("{file}:{line}:{column}")),
                AnnotationError::OverlapError { first_line, .. } => (IssueCode::Overlap, format!("{file}:{first_line}")),
                AnnotationError::NonMonotonic { line } => (IssueCode::NonMonotonic, format!("{file}:{line}")),
                AnnotationError::Io { .. } => (IssueCode::ParseError, file.clone()),
            };
            report.error(code, location, e.to_string());
            None
        }
    };
    let Some(audio) = &pair.audio else {
        report.error(IssueCode::PairingError, file, format!("no recording named {}.wav", pair.stem));
        return Ok(report);
    };
    let wave = match load_audio(audio)? {
        Ok(w) => w,
        Err(e) => {
            report.error(IssueCode::ParseError, audio.display().to_string(), e.to_string());
            return Ok(report);
        }
    };
    if let Some(ann) = ann {
        let found = validate_annotations_with(&ann, &wave, &config.validation());
        for mut issue in found.errors {
            issue.location = format!("{file}: {}", issue.location);
            report.errors.push(issue);
        }
        for mut issue in found.warnings {
            issue.location = format!("{file}: {}", issue.location);
            report.warnings.push(issue);
        }
    }
    Ok(report)
}

/// Validates every annotation/recording pair. Writes one report per pair
/// under `out_dir` when given and prints a summary. Exits non-zero when any
/// file has errors.
pub fn validate(audio_dir: &Path, annotation_dir: &Path, out_dir: Option<&Path>, config: &RunConfig) -> Result<Status, CliError> {
    let pairing = pair_files(audio_dir, annotation_dir)?;
    let pool = config.thread_pool()?;
    let mut reports: Vec<(String, ValidationReport)> = pool.install(|| {
        pairing
            .pairs
            .par_iter()
            .map(|p| validate_pair(p, config).map(|r| (p.stem.clone(), r)))
            .collect::<Result<_, _>>()
    })?;
    for audio in &pairing.orphan_audio {
        let mut r = ValidationReport::default();
        r.warning(IssueCode::PairingError, audio.display().to_string(), "recording has no annotation file");
        let stem = audio.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        reports.push((stem, r));
    }
    reports.sort_by(|a, b| a.0.cmp(&b.0));

    let mut summary = String::new();
    let mut failed = 0;
    for (stem, r) in &reports {
        if !r.errors.is_empty() {
            failed += 1;
        }
        let _ = writeln!(summary, "{stem}\t{} error(s)\t{} warning(s)", r.errors.len(), r.warnings.len());
        for e in &r.errors {
            let _ = writeln!(summary, "  error\t{e}");
        }
        if let Some(dir) = out_dir {
            write_file(&dir.join(format!("{stem}.txt")), r.render())?;
        }
    }
    let _ = writeln!(summary, "{} file(s) checked, {failed} with errors", reports.len());
    if let Some(dir) = out_dir {
        write_file(&dir.join("summary.txt"), &summary)?;
    }
    print!("{summary}");
    Ok(if failed == 0 { Status::Clean } else { Status::DataErrors })
}
