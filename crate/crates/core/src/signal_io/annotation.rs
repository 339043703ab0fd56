//! Tab-separated tier annotations.
//!
//! One segment per line:
//!
//! ```text
//! # comment
//! phone	tt	1.530	1.632	gem_type=lexical;word=filetto
//! ```
//!
//! Fields are tier (`word` or `phone`), label, start and end in seconds, and
//! a `;`-separated list of `key=value` attributes that may be empty.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AnnotationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Word,
    Phone,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Word => "word",
            Tier::Phone => "phone",
        })
    }
}

impl FromStr for Tier {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word" => Ok(Tier::Word),
            "phone" => Ok(Tier::Phone),
            other => Err(format!("unknown tier '{other}'")),
        }
    }
}

/// Gemination status assigned by the annotator. `None` marks a singleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GemType {
    Lexical,
    Syntactic,
    None,
}

impl GemType {
    pub fn as_str(self) -> &'static str {
        match self {
            GemType::Lexical => "lexical",
            GemType::Syntactic => "syntactic",
            GemType::None => "none",
        }
    }

    pub fn is_geminate(self) -> bool {
        !matches!(self, GemType::None)
    }
}

impl fmt::Display for GemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GemType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lexical" => Ok(GemType::Lexical),
            "syntactic" => Ok(GemType::Syntactic),
            "none" => Ok(GemType::None),
            other => Err(format!("unknown gem_type '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tier: Tier,
    pub label: String,
    pub start_s: f64,
    pub end_s: f64,
    pub attrs: BTreeMap<String, String>,
}

impl Segment {
    pub fn new(tier: Tier, label: impl Into<String>, start_s: f64, end_s: f64) -> Self {
        Segment {
            tier,
            label: label.into(),
            start_s,
            end_s,
            attrs: BTreeMap::new(),
        }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(key.into(), value.into());
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    /// `None` when the segment carries no `gem_type` attribute, i.e. it is
    /// not a measurement target.
    pub fn gem_type(&self) -> Option<Result<GemType, String>> {
        self.attr("gem_type").map(str::parse)
    }

    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }

    /// Human-readable position used in validation messages.
    pub fn locator(&self) -> String {
        format!("{} '{}' [{}, {}]", self.tier, self.label, self.start_s, self.end_s)
    }
}

/// Time-aligned segments of one recording, canonically ordered by tier and
/// then by start time.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    segments: Vec<Segment>,
    audio_ref: String,
}

impl AnnotationSet {
    /// Builds a set, checking ordering and overlap per tier. Line numbers in
    /// errors are 1-based positions in `segments`.
    pub fn new(segments: Vec<Segment>, audio_ref: impl Into<String>) -> Result<Self, AnnotationError> {
        let lines: Vec<usize> = (1..=segments.len()).collect();
        Self::build(segments, lines, audio_ref.into())
    }

    fn build(
        segments: Vec<Segment>,
        lines: Vec<usize>,
        audio_ref: String,
    ) -> Result<Self, AnnotationError> {
        let mut indexed: Vec<(Segment, usize)> = segments.into_iter().zip(lines).collect();
        for (seg, line) in &indexed {
            if !(seg.end_s > seg.start_s) {
                return Err(AnnotationError::NonMonotonic { line: *line });
            }
        }
        indexed.sort_by(|a, b| {
            a.0.tier
                .cmp(&b.0.tier)
                .then(a.0.start_s.total_cmp(&b.0.start_s))
        });
        for pair in indexed.windows(2) {
            let (prev, prev_line) = (&pair[0].0, pair[0].1);
            let (next, next_line) = (&pair[1].0, pair[1].1);
            if prev.tier == next.tier && next.start_s < prev.end_s {
                let (first_line, second_line) = if prev_line < next_line {
                    (prev_line, next_line)
                } else {
                    (next_line, prev_line)
                };
                return Err(AnnotationError::OverlapError {
                    tier: prev.tier,
                    first_line,
                    second_line,
                });
            }
        }
        Ok(AnnotationSet {
            segments: indexed.into_iter().map(|(s, _)| s).collect(),
            audio_ref,
        })
    }

    /// Skips every check. Validation tests use this to feed raw input.
    #[cfg(test)]
    pub(crate) fn unchecked(segments: Vec<Segment>, audio_ref: &str) -> Self {
        AnnotationSet {
            segments,
            audio_ref: audio_ref.to_string(),
        }
    }

    pub fn empty(audio_ref: impl Into<String>) -> Self {
        AnnotationSet {
            segments: Vec::new(),
            audio_ref: audio_ref.into(),
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn audio_ref(&self) -> &str {
        &self.audio_ref
    }

    pub fn tier(&self, tier: Tier) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.tier == tier)
    }

    /// Phone segments carrying a `gem_type` attribute.
    pub fn targets(&self) -> impl Iterator<Item = &Segment> {
        self.tier(Tier::Phone).filter(|s| s.attrs.contains_key("gem_type"))
    }

    /// The phone segment ending exactly where `target` starts (within
    /// `tolerance_s`). This is the pre-consonant vowel when one exists.
    pub fn preceding_phone(&self, target: &Segment, tolerance_s: f64) -> Option<&Segment> {
        self.tier(Tier::Phone)
            .filter(|s| s.end_s <= target.start_s + tolerance_s && s.start_s < target.start_s)
            .last()
            .filter(|s| (target.start_s - s.end_s).abs() <= tolerance_s)
    }
}

/// Reads and parses an annotation file. The audio reference is the file stem.
pub fn parse_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet, AnnotationError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| AnnotationError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let audio_ref = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_annotation_str(&text, &audio_ref)
}

pub fn parse_annotation_str(text: &str, audio_ref: &str) -> Result<AnnotationSet, AnnotationError> {
    let mut segments = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        segments.push(parse_line(line, line_no)?);
        lines.push(line_no);
    }
    AnnotationSet::build(segments, lines, audio_ref.to_string())
}

fn parse_line(line: &str, line_no: usize) -> Result<Segment, AnnotationError> {
    let fields: Vec<&str> = line.split('\t').collect();
    let columns: Vec<usize> = fields
        .iter()
        .scan(1usize, |col, f| {
            let here = *col;
            *col += f.chars().count() + 1;
            Some(here)
        })
        .collect();
    let syntax = |field: usize, message: String| AnnotationError::SyntaxError {
        line: line_no,
        column: columns.get(field).copied().unwrap_or(1),
        message,
    };
    if fields.len() != 5 {
        return Err(syntax(
            fields.len().min(4),
            format!("expected 5 tab-separated fields, found {}", fields.len()),
        ));
    }
    let tier: Tier = fields[0].parse().map_err(|m| syntax(0, m))?;
    let label = fields[1];
    if label.is_empty() {
        return Err(syntax(1, "empty label".into()));
    }
    let time = |field: usize| -> Result<f64, AnnotationError> {
        let t: f64 = fields[field]
            .trim()
            .parse()
            .map_err(|_| syntax(field, format!("'{}' is not a decimal time", fields[field])))?;
        if !t.is_finite() || t < 0.0 {
            return Err(syntax(field, format!("time {t} must be finite and non-negative")));
        }
        Ok(t)
    };
    let start_s = time(2)?;
    let end_s = time(3)?;
    if end_s <= start_s {
        return Err(AnnotationError::NonMonotonic { line: line_no });
    }

    let mut attrs = BTreeMap::new();
    for pair in fields[4].split(';').filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| syntax(4, format!("attribute '{pair}' lacks '='")))?;
        if k.is_empty() {
            return Err(syntax(4, format!("attribute '{pair}' has an empty key")));
        }
        if attrs.insert(k.to_string(), v.to_string()).is_some() {
            return Err(syntax(4, format!("duplicate attribute '{k}'")));
        }
    }
    Ok(Segment {
        tier,
        label: label.to_string(),
        start_s,
        end_s,
        attrs,
    })
}

/// Renders a set in the on-disk format. Times use the shortest decimal that
/// parses back to the same `f64`.
pub fn serialize_annotations(set: &AnnotationSet) -> String {
    let mut out = String::new();
    for seg in set.segments() {
        let attrs: Vec<String> = seg.attrs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            seg.tier,
            seg.label,
            seg.start_s,
            seg.end_s,
            attrs.join(";")
        ));
    }
    out
}
