#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use gemination_core::gemination::{build_token, classify_gemination, write_tokens_csv, DurationRecord, TokenMeta, TokenRow};
use gemination_core::signal_io::GemType;

pub fn gemination(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gemination")).args(args).output().expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// One fixture group: counts per speaker and the group's mean leaves.
pub struct Group {
    pub gem_type: GemType,
    /// (speaker, token count)
    pub counts: &'static [(&'static str, usize)],
    pub vd: f64,
    /// Closure and burst means, one pair per release.
    pub releases: &'static [(f64, f64)],
}

/// Zero-mean offsets of length `n`: ±0.01, ±0.02, ... with a 0 for odd `n`.
fn offsets(n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    if n % 2 == 1 {
        v.push(0.0);
    }
    for k in 1..=n / 2 {
        v.push(k as f64 * 0.01);
        v.push(-(k as f64) * 0.01);
    }
    v
}

/// Token rows whose per-group leaf means equal the group means exactly.
/// Offsets are whole hundredths of a millisecond, so the two-decimal CSV
/// keeps them.
pub fn fixture_rows(groups: &[Group]) -> Vec<TokenRow> {
    let mut rows = Vec::new();
    let mut sentence = 0;
    for g in groups {
        let total: usize = g.counts.iter().map(|(_, n)| n).sum();
        let offs = offsets(total);
        let mut idx = 0;
        for (speaker, n) in g.counts {
            for _ in 0..*n {
                let d = offs[idx];
                idx += 1;
                sentence += 1;
                // Vd and the first closure move together; the last burst moves
                // the other way, so every leaf mean stays on target.
                let record = match g.releases {
                    [(cl, b)] => DurationRecord::single(Some(g.vd + d), cl + d, b - d),
                    [(cl1, b1), (cl2, b2)] => DurationRecord::double(Some(g.vd + d), cl1 + d, *b1, *cl2, b2 - d),
                    _ => unreachable!(),
                }
                .unwrap();
                let powers: Vec<f64> = match g.releases.len() {
                    1 => vec![1e-3 * (1.0 + d / 10.0)],
                    _ => vec![1e-3 * (1.0 + d / 10.0), 2.5e-3 * (1.0 - d / 10.0)],
                };
                let meta = TokenMeta {
                    speaker: speaker.to_string(),
                    sentence_id: sentence.to_string(),
                    repetition: "1".into(),
                    word: format!("w{sentence}"),
                    consonant: if g.gem_type.is_geminate() { "tt".into() } else { "t".into() },
                };
                let call = classify_gemination(&record, 1.0);
                rows.push(TokenRow::Measured(build_token(record, &powers, call, meta, g.gem_type).unwrap()));
            }
        }
    }
    rows
}

pub fn csv_bytes(rows: &[TokenRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_tokens_csv(rows, &mut buf).unwrap();
    buf
}

/// Groups at the reference single/double burst counts per speaker and the
/// reference per-group leaf means, plus a singleton group.
pub fn reference_groups() -> Vec<Group> {
    vec![
        Group {
            gem_type: GemType::Lexical,
            counts: &[("MS", 105), ("FS", 105)],
            vd: 70.9,
            releases: &[(89.09, 25.68)],
        },
        Group {
            gem_type: GemType::Lexical,
            counts: &[("MS", 15), ("FS", 15)],
            vd: 78.8,
            releases: &[(48.91, 12.49), (38.97, 28.70)],
        },
        Group {
            gem_type: GemType::Syntactic,
            counts: &[("MS", 69), ("FS", 68)],
            vd: 56.3,
            releases: &[(83.04, 19.76)],
        },
        Group {
            gem_type: GemType::Syntactic,
            counts: &[("MS", 7), ("FS", 8)],
            vd: 59.7,
            releases: &[(35.29, 10.92), (22.38, 28.56)],
        },
        Group {
            gem_type: GemType::None,
            counts: &[("MS", 40), ("FS", 40)],
            vd: 85.07,
            releases: &[(35.9, 19.58)],
        },
    ]
}
