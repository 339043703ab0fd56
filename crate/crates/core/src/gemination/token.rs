use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::Serialize;

use super::{classify_gemination, DurationRecord, GeminationCall, GeminationError};
use crate::acoustics::BurstCount;
use crate::signal_io::{GemType, Segment};

pub const TOKEN_COLUMNS: [&str; 20] = [
    "speaker",
    "sentence_id",
    "repetition",
    "word",
    "consonant",
    "gem_type",
    "burst_count",
    "Vd_ms",
    "Cd_ms",
    "Cld_ms",
    "Bd_ms",
    "C1d_ms",
    "C2d_ms",
    "Cl1d_ms",
    "Cl2d_ms",
    "B1d_ms",
    "B2d_ms",
    "P_burst1",
    "P_burst2",
    "ratio",
];

/// Trailing column carrying a per-token failure; empty for measured rows.
pub const ERROR_COLUMN: &str = "error";

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TokenMeta {
    pub speaker: String,
    pub sentence_id: String,
    pub repetition: String,
    pub word: String,
    pub consonant: String,
}

impl TokenMeta {
    /// Collects metadata from the target's attributes, falling back to the
    /// enclosing word segment. Absent keys become empty strings.
    pub fn from_annotation(target: &Segment, word: Option<&Segment>) -> TokenMeta {
        let get = |key: &str| {
            target
                .attr(key)
                .or_else(|| word.and_then(|w| w.attr(key)))
                .unwrap_or_default()
                .to_string()
        };
        let word_label = target
            .attr("word")
            .map(str::to_string)
            .or_else(|| word.map(|w| w.label.clone()))
            .unwrap_or_default();
        TokenMeta {
            speaker: get("speaker"),
            sentence_id: get("sentence_id"),
            repetition: get("repetition"),
            word: word_label,
            consonant: target.label.clone(),
        }
    }

    pub fn require_complete(&self, location: &str) -> Result<(), GeminationError> {
        for (field, value) in [("speaker", &self.speaker), ("sentence_id", &self.sentence_id)] {
            if value.trim().is_empty() {
                return Err(GeminationError::MissingMetadata { field, location: location.to_string() });
            }
        }
        Ok(())
    }

    /// Orders by speaker, sentence, repetition, word and consonant, with
    /// numeric identifiers compared by value.
    pub fn natural_cmp(&self, other: &TokenMeta) -> Ordering {
        natural_cmp(&self.speaker, &other.speaker)
            .then_with(|| natural_cmp(&self.sentence_id, &other.sentence_id))
            .then_with(|| natural_cmp(&self.repetition, &other.repetition))
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.consonant.cmp(&other.consonant))
    }
}

/// Compares identifiers so that "2" sorts before "10". Numeric strings come
/// before all other strings.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// One measured consonant occurrence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Token {
    meta: TokenMeta,
    gem_type: GemType,
    record: DurationRecord,
    burst_powers: Vec<f64>,
    call: GeminationCall,
}

impl Token {
    pub fn meta(&self) -> &TokenMeta {
        &self.meta
    }

    pub fn gem_type(&self) -> GemType {
        self.gem_type
    }

    pub fn record(&self) -> &DurationRecord {
        &self.record
    }

    pub fn burst_count(&self) -> BurstCount {
        self.record.burst_count()
    }

    pub fn burst_powers(&self) -> &[f64] {
        &self.burst_powers
    }

    pub fn call(&self) -> &GeminationCall {
        &self.call
    }

    pub fn ratio(&self) -> Option<f64> {
        self.call.ratio_used
    }
}

pub fn build_token(
    record: DurationRecord,
    powers: &[f64],
    call: GeminationCall,
    meta: TokenMeta,
    gem_type: GemType,
) -> Result<Token, GeminationError> {
    let location = format!("{}/{}/{}", meta.speaker, meta.sentence_id, meta.consonant);
    meta.require_complete(&location)?;
    let expected = match record.burst_count() {
        BurstCount::Single => 1,
        BurstCount::Double => 2,
    };
    if powers.len() != expected {
        return Err(GeminationError::InconsistentToken(format!(
            "{} burst powers for a {} burst token",
            powers.len(),
            record.burst_count()
        )));
    }
    if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(GeminationError::InconsistentToken(format!("burst power {p} is not non-negative")));
    }
    if call.ratio_used != record.ratio() {
        return Err(GeminationError::InconsistentToken(format!(
            "call uses ratio {:?} but Cd/Vd is {:?}",
            call.ratio_used,
            record.ratio()
        )));
    }
    Ok(Token { meta, gem_type, record, burst_powers: powers.to_vec(), call })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TokenRow {
    Measured(Token),
    Failed {
        meta: TokenMeta,
        gem_type: Option<GemType>,
        error: String,
    },
}

impl TokenRow {
    pub fn meta(&self) -> &TokenMeta {
        match self {
            TokenRow::Measured(t) => t.meta(),
            TokenRow::Failed { meta, .. } => meta,
        }
    }

    pub fn token(&self) -> Option<&Token> {
        match self {
            TokenRow::Measured(t) => Some(t),
            TokenRow::Failed { .. } => None,
        }
    }
}

fn hundredths(ms: f64) -> i64 {
    (ms * 100.0).round() as i64
}

fn fmt_hundredths(h: i64) -> String {
    format!("{:.2}", h as f64 / 100.0)
}

/// Duration in ms with two decimals.
pub fn format_ms(ms: f64) -> String {
    fmt_hundredths(hundredths(ms))
}

fn format_power(p: f64) -> String {
    format!("{p:.5e}")
}

/// The 20 token columns followed by the error column. Leaves are rounded to
/// 0.01 ms first and every sum is formed from the rounded leaves, so the
/// printed columns satisfy the additivity relations exactly.
pub fn token_fields(row: &TokenRow) -> Vec<String> {
    let meta = row.meta();
    let mut out: Vec<String> = vec![
        meta.speaker.clone(),
        meta.sentence_id.clone(),
        meta.repetition.clone(),
        meta.word.clone(),
        meta.consonant.clone(),
    ];
    match row {
        TokenRow::Failed { gem_type, error, .. } => {
            out.push(gem_type.map(|g| g.to_string()).unwrap_or_default());
            out.extend(std::iter::repeat_n(String::new(), 14));
            out.push(error.clone());
        }
        TokenRow::Measured(t) => {
            let r = t.record();
            let vd = r.vd().map(hundredths);
            let (cl1, b1, cl2, b2) = match (r.cl1d(), r.b1d(), r.cl2d(), r.b2d()) {
                (Some(a), Some(b), Some(c), Some(d)) => {
                    (hundredths(a), hundredths(b), Some(hundredths(c)), Some(hundredths(d)))
                }
                _ => (hundredths(r.cld()), hundredths(r.bd()), None, None),
            };
            let c1 = cl1 + b1;
            let c2 = cl2.zip(b2).map(|(c, b)| c + b);
            let cd = c1 + c2.unwrap_or(0);
            let cld = cl1 + cl2.unwrap_or(0);
            let bd = b1 + b2.unwrap_or(0);
            let split = c2.is_some();
            let opt = |v: Option<i64>| v.map(fmt_hundredths).unwrap_or_default();
            let powers = t.burst_powers();
            out.push(t.gem_type().to_string());
            out.push(t.burst_count().to_string());
            out.push(opt(vd));
            out.push(fmt_hundredths(cd));
            out.push(fmt_hundredths(cld));
            out.push(fmt_hundredths(bd));
            out.push(opt(split.then_some(c1)));
            out.push(opt(c2));
            out.push(opt(split.then_some(cl1)));
            out.push(opt(cl2));
            out.push(opt(split.then_some(b1)));
            out.push(opt(b2));
            out.push(powers.first().map(|&p| format_power(p)).unwrap_or_default());
            out.push(powers.get(1).map(|&p| format_power(p)).unwrap_or_default());
            out.push(
                vd.filter(|&v| v > 0)
                    .map(|v| format!("{:.6}", cd as f64 / v as f64))
                    .unwrap_or_default(),
            );
            out.push(String::new());
        }
    }
    out
}

pub fn write_tokens_csv<W: Write>(rows: &[TokenRow], out: W) -> Result<(), GeminationError> {
    let io = |e: csv::Error| GeminationError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TOKEN_COLUMNS.iter().chain(std::iter::once(&ERROR_COLUMN)))
        .map_err(io)?;
    for row in rows {
        w.write_record(token_fields(row)).map_err(io)?;
    }
    w.flush().map_err(|e| GeminationError::Io(e.to_string()))
}

/// Parses a token table. Rows with a non-empty error column become
/// `TokenRow::Failed`; all others are checked for internal consistency and
/// classified with `threshold`.
pub fn read_tokens_csv<R: Read>(input: R, threshold: f64) -> Result<Vec<TokenRow>, GeminationError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| GeminationError::Csv { line: 1, message: e.to_string() })?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    let has_error_col = match names.as_slice() {
        [cols @ .., last] if cols == TOKEN_COLUMNS && *last == ERROR_COLUMN => true,
        cols if cols == TOKEN_COLUMNS => false,
        _ => {
            return Err(GeminationError::Csv {
                line: 1,
                message: format!("unexpected header; expected {}", TOKEN_COLUMNS.join(",")),
            })
        }
    };

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| GeminationError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| GeminationError::Csv { line, message };
        let field = |name: &str| -> &str {
            let idx = TOKEN_COLUMNS.iter().position(|c| *c == name).unwrap();
            record.get(idx).unwrap_or("").trim()
        };
        let meta = TokenMeta {
            speaker: field("speaker").to_string(),
            sentence_id: field("sentence_id").to_string(),
            repetition: field("repetition").to_string(),
            word: field("word").to_string(),
            consonant: field("consonant").to_string(),
        };
        let gem_type = match field("gem_type") {
            "" => None,
            s => Some(s.parse::<GemType>().map_err(fail)?),
        };
        let error = if has_error_col { record.get(20).unwrap_or("").trim() } else { "" };
        if !error.is_empty() {
            rows.push(TokenRow::Failed { meta, gem_type, error: error.to_string() });
            continue;
        }
        let gem_type = gem_type.ok_or_else(|| fail("gem_type is empty".into()))?;
        let token = parse_measured(&field, meta, gem_type, threshold).map_err(fail)?;
        rows.push(TokenRow::Measured(token));
    }
    Ok(rows)
}

const SUM_TOLERANCE_MS: f64 = 0.011;

fn parse_measured<'a>(
    field: &dyn Fn(&str) -> &'a str,
    meta: TokenMeta,
    gem_type: GemType,
    threshold: f64,
) -> Result<Token, String> {
    let num = |name: &str| -> Result<Option<f64>, String> {
        match field(name) {
            "" => Ok(None),
            s => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("{name}: '{s}' is not a number")),
        }
    };
    let req = |name: &str| num(name)?.ok_or_else(|| format!("{name} is empty"));
    let absent = |names: &[&str]| -> Result<(), String> {
        match names.iter().find(|n| !field(n).is_empty()) {
            Some(n) => Err(format!("{n} must be empty for this burst count")),
            None => Ok(()),
        }
    };
    let count: BurstCount = field("burst_count").parse()?;
    let vd = num("Vd_ms")?;
    let record = match count {
        BurstCount::Single => {
            absent(&["C1d_ms", "C2d_ms", "Cl1d_ms", "Cl2d_ms", "B1d_ms", "B2d_ms", "P_burst2"])?;
            DurationRecord::single(vd, req("Cld_ms")?, req("Bd_ms")?)
        }
        BurstCount::Double => DurationRecord::double(
            vd,
            req("Cl1d_ms")?,
            req("B1d_ms")?,
            req("Cl2d_ms")?,
            req("B2d_ms")?,
        ),
    }
    .map_err(|e| e.to_string())?;

    let mut sums = vec![("Cd_ms", record.cd()), ("Cld_ms", record.cld()), ("Bd_ms", record.bd())];
    if let (Some(c1), Some(c2)) = (record.c1d(), record.c2d()) {
        sums.push(("C1d_ms", c1));
        sums.push(("C2d_ms", c2));
    }
    for (name, expected) in sums {
        let got = req(name)?;
        if (got - expected).abs() > SUM_TOLERANCE_MS {
            return Err(format!("{name} = {got} but its parts sum to {expected:.2}"));
        }
    }

    let mut powers = vec![req("P_burst1")?];
    if count == BurstCount::Double {
        powers.push(req("P_burst2")?);
    }

    match (num("ratio")?, record.ratio()) {
        (Some(printed), Some(actual)) => {
            if (printed - actual).abs() > 1e-6 * actual.max(1.0) {
                return Err(format!("ratio {printed} disagrees with Cd/Vd = {actual:.6}"));
            }
        }
        (Some(_), None) => return Err("ratio given without a vowel duration".into()),
        (None, Some(_)) => return Err("ratio is empty".into()),
        (None, None) => {}
    }

    let call = classify_gemination(&record, threshold);
    build_token(record, &powers, call, meta, gem_type).map_err(|e| e.to_string())
}
