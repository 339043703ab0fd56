//! Pairs annotation files with their recordings.

use std::fs;
use std::path::{Path, PathBuf};

use gemination_core::signal_io::{load_waveform, parse_annotations, AnnotationError, AnnotationSet, SignalError, Waveform};

use crate::CliError;

/// An annotation file and the recording with the same stem, if present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub stem: String,
    pub annotation: PathBuf,
    pub audio: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    /// Sorted by stem.
    pub pairs: Vec<Pair>,
    /// Recordings with no annotation file.
    pub orphan_audio: Vec<PathBuf>,
}

fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<(String, PathBuf)>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let matches = path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext));
        if matches && path.is_file() {
            if let Some(stem) = path.file_stem() {
                out.push((stem.to_string_lossy().into_owned(), path));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Matches `<stem>.ann` under `annotation_dir` with `<stem>.wav` under
/// `audio_dir`.
pub fn pair_files(audio_dir: &Path, annotation_dir: &Path) -> Result<Pairing, CliError> {
    let annotations = files_with_extension(annotation_dir, "ann")?;
    let audio = files_with_extension(audio_dir, "wav")?;
    let find = |stem: &str| audio.iter().find(|(s, _)| s == stem).map(|(_, p)| p.clone());
    let pairs = annotations
        .iter()
        .map(|(stem, path)| Pair { stem: stem.clone(), annotation: path.clone(), audio: find(stem) })
        .collect();
    let orphan_audio = audio
        .iter()
        .filter(|(s, _)| !annotations.iter().any(|(a, _)| a == s))
        .map(|(_, p)| p.clone())
        .collect();
    Ok(Pairing { pairs, orphan_audio })
}

/// Parses an annotation file, separating I/O failures from content errors.
pub fn load_annotations(path: &Path) -> Result<Result<AnnotationSet, AnnotationError>, CliError> {
    match parse_annotations(path) {
        Err(AnnotationError::Io { message, .. }) => Err(CliError::io(path, message)),
        other => Ok(other),
    }
}

/// Loads a recording, separating I/O failures from format errors.
pub fn load_audio(path: &Path) -> Result<Result<Waveform, SignalError>, CliError> {
    match load_waveform(path) {
        Err(SignalError::Io { source, .. }) => Err(CliError::io(path, source)),
        other => Ok(other),
    }
}
