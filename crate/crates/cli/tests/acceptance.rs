mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{csv_bytes, fixture_rows, gemination, path_str, reference_groups, stderr};
use gemination_core::acoustics::burst_power;
use gemination_core::gemination::{measure_annotation, DurationRecord, MeasureConfig, Releases, Verdict};
use gemination_core::signal_io::{GemType, Waveform};
use gemination_core::stats::{classify_effect_size, f_cdf, one_way_anova, EffectLabel, GroupedSample};
use gemination_core::synth::{synthesize_corpus, ClassSpec, CorpusSpec, CorpusToken, SplitMix64};
use gemination_core::Interval;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn burst_power_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        let mut rng = SplitMix64::new(seed);
        let sr = [8000u32, 16000, 44100, 48000][rng.below(4)];
        let n = 64 + rng.below(4000);
        let amp = 10f64.powf(-4.0 * rng.next_f64());
        let samples: Vec<f64> = (0..n).map(|_| amp * (2.0 * rng.next_f64() - 1.0)).collect();
        let wave = Waveform::new(samples.clone(), sr, "oracle").unwrap();
        let i0 = rng.below(n - 1);
        let i1 = i0 + 1 + rng.below(n - i0);
        let got = burst_power(&wave, Interval::new(i0 as f64 / sr as f64, i1 as f64 / sr as f64)).unwrap();
        let mut energy = 0.0;
        for x in &samples[i0..i1] {
            energy += x * x;
        }
        worst = worst.max(rel_err(got, energy / (i1 - i0) as f64));
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max relative error {worst:.2e} over 1000 signals in {elapsed:.2?}"),
    )
}

fn measured(token: &CorpusToken, config: &MeasureConfig) -> Option<DurationRecord> {
    let rows = measure_annotation(&token.wave, &token.truth.annotations, config);
    rows.first().and_then(|m| m.row.token()).map(|t| *t.record())
}

fn leaves(r: &DurationRecord) -> Vec<Option<f64>> {
    vec![r.vd(), Some(r.cld()), Some(r.bd()), r.cl1d(), r.b1d(), r.cl2d(), r.b2d()]
}

fn synthetic_recovery() -> Outcome {
    let start = Instant::now();
    let tokens = synthesize_corpus(&CorpusSpec::reference_geminates(200), 2024).map_err(|e| e.to_string())?;
    let config = MeasureConfig::default();
    let (mut close, mut counted) = (0, 0);
    for t in &tokens {
        let Some(got) = measured(t, &config) else { continue };
        let want = t.truth.record;
        if got.burst_count() == want.burst_count() {
            counted += 1;
            let all_close = leaves(&got).iter().zip(leaves(&want)).all(|(g, w)| match (g, w) {
                (Some(g), Some(w)) => (g - w).abs() <= 2.0,
                (None, None) => true,
                _ => false,
            });
            if all_close {
                close += 1;
            }
        }
    }
    let n = tokens.len() as f64;
    let elapsed = start.elapsed();
    check(
        close as f64 / n >= 0.95 && counted as f64 / n >= 0.98 && elapsed < Duration::from_secs(30),
        format!("{close}/{} within 2 ms, burst count {counted}/{} in {elapsed:.2?}", tokens.len(), tokens.len()),
    )
}

fn ratio_class(name: &str, gem_type: GemType, ratio: f64, vd: f64, closure: f64, burst: f64) -> ClassSpec {
    ClassSpec {
        name: name.into(),
        gem_type,
        weight: 1.0,
        vd_ms: vd,
        closure_ms: vec![closure],
        burst_ms: vec![burst],
        burst_amplitudes: vec![0.1],
        ratio: Some(ratio),
        consonant: None,
    }
}

fn ratio_discrimination() -> Outcome {
    let mut spec = CorpusSpec::reference_geminates(200);
    spec.relative_spread = 0.15;
    spec.classes = vec![
        ratio_class("singleton", GemType::None, 0.75, 85.07, 35.9, 19.58),
        ratio_class("geminate", GemType::Lexical, 1.84, 65.98, 85.69, 25.32),
    ];
    let tokens = synthesize_corpus(&spec, 606).map_err(|e| e.to_string())?;
    let config = MeasureConfig { ratio_threshold: 1.0, ..MeasureConfig::default() };
    let mut correct = 0;
    for t in &tokens {
        let rows = measure_annotation(&t.wave, &t.truth.annotations, &config);
        let Some(token) = rows.first().and_then(|m| m.row.token()) else { continue };
        let want = if t.class == "geminate" { Verdict::Geminate } else { Verdict::Singleton };
        if token.call().verdict == want {
            correct += 1;
        }
    }
    let accuracy = correct as f64 / tokens.len() as f64;
    check(accuracy >= 0.95, format!("accuracy {correct}/{} = {accuracy:.3}", tokens.len()))
}

fn pairwise_ss(values: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..values.len() {
        for k in j + 1..values.len() {
            s += (values[j] - values[k]).powi(2);
        }
    }
    s / values.len() as f64
}

/// Between-group SS from pairs of group means: Σ_{g<h} n_g n_h (m_g − m_h)² / N.
fn pairwise_between(groups: &[Vec<f64>]) -> f64 {
    let n: usize = groups.iter().map(Vec::len).sum();
    let mean = |g: &Vec<f64>| g.iter().sum::<f64>() / g.len() as f64;
    let mut s = 0.0;
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            s += (groups[a].len() * groups[b].len()) as f64 * (mean(&groups[a]) - mean(&groups[b])).powi(2);
        }
    }
    s / n as f64
}

fn anova_correctness() -> Outcome {
    let (mut ss_err, mut eta_err) = (0.0f64, 0.0f64);
    for seed in 0..200u64 {
        let mut rng = SplitMix64::new(seed ^ 0xA11C);
        let k = 2 + rng.below(4);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|g| {
                let n = 2 + rng.below(30);
                (0..n).map(|_| 50.0 + 10.0 * g as f64 * rng.next_f64() + 20.0 * rng.normal()).collect()
            })
            .collect();
        let named = groups.iter().enumerate().map(|(i, g)| (format!("g{i}"), g.clone())).collect();
        let result = one_way_anova(&GroupedSample::new(named).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let total = pairwise_ss(&groups.concat());
        let within: f64 = groups.iter().map(|g| pairwise_ss(g)).sum();
        let between = pairwise_between(&groups);
        ss_err = ss_err
            .max(rel_err(result.ss_within, within))
            .max(rel_err(result.ss_between, between))
            .max(rel_err(result.ss_between + result.ss_within, total));
        let (d1, d2) = (result.df_between as f64, result.df_within as f64);
        eta_err = eta_err.max((result.eta_sq - d1 * result.f / (d1 * result.f + d2)).abs());
    }
    let tail = 1.0 - f_cdf(8.521, 1, 390).map_err(|e| e.to_string())?;
    check(
        ss_err <= 1e-9 && eta_err <= 1e-12 && (0.0035..=0.0045).contains(&tail),
        format!("SS error {ss_err:.2e}, eta identity error {eta_err:.2e}, tail {tail:.5}"),
    )
}

fn effect_labels() -> Outcome {
    let cases = [
        (0.227, EffectLabel::Large),
        (0.104, EffectLabel::Medium),
        (0.013, EffectLabel::Small),
        (0.004, EffectLabel::Negligible),
    ];
    let got: Vec<String> = cases.iter().map(|(e, _)| format!("{e} {}", classify_effect_size(*e))).collect();
    check(cases.iter().all(|(e, want)| classify_effect_size(*e) == *want), got.join(", "))
}

fn additive(r: &DurationRecord) -> f64 {
    match r.releases() {
        Releases::Single(cb) => (r.cd() - (cb.closure_ms + cb.burst_ms)).abs(),
        Releases::Double { first, second } => {
            let (c1, c2) = (r.c1d().unwrap(), r.c2d().unwrap());
            [
                c1 - (first.closure_ms + first.burst_ms),
                c2 - (second.closure_ms + second.burst_ms),
                r.cd() - (c1 + c2),
                r.cld() - (first.closure_ms + second.closure_ms),
                r.bd() - (first.burst_ms + second.burst_ms),
            ]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
        }
    }
}

fn duration_additivity() -> Outcome {
    let tokens = synthesize_corpus(&CorpusSpec::reference_geminates(120), 99).map_err(|e| e.to_string())?;
    let config = MeasureConfig::default();
    let records: Vec<DurationRecord> = tokens.iter().filter_map(|t| measured(t, &config)).collect();
    let worst = records.iter().map(additive).fold(0.0f64, f64::max);
    let row = DurationRecord::double(Some(78.8), 48.9, 12.5, 39.0, 28.7).map_err(|e| e.to_string())?;
    let printed = [(row.cld(), 87.9), (row.bd(), 41.2), (row.cd(), 129.1), (row.c1d().unwrap(), 61.4)];
    let row_ok = printed.iter().all(|(got, want)| (got - want).abs() <= 0.01);
    check(
        worst <= 0.01 && row_ok && !records.is_empty(),
        format!("{} tokens, worst residual {worst:.2e} ms, printed row sums {}", records.len(), if row_ok { "hold" } else { "fail" }),
    )
}

fn cell_mean(cell: &Value) -> Option<f64> {
    (cell["status"] == "value").then(|| cell["mean"].as_f64()).flatten()
}

/// Duration cells are compared at the printed precision; a tiny slack
/// absorbs binary rounding at exactly half a printed unit.
fn expect(failures: &mut Vec<String>, what: String, got: Option<f64>, want: f64) {
    match got {
        Some(g) if (g - want).abs() <= 0.05 + 1e-9 => {}
        other => failures.push(format!("{what}: {other:?} vs {want}")),
    }
}

fn table_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("tokens.csv");
    fs::write(&csv, csv_bytes(&fixture_rows(&reference_groups()))).map_err(|e| e.to_string())?;
    let out_dir = dir.path().join("report");
    let out = gemination(&["report", "--tokens", path_str(&csv), "--out", path_str(&out_dir)]);
    if out.status.code() != Some(0) {
        return Err(format!("report failed: {}", stderr(&out)));
    }
    let json: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    let mut failures = Vec::new();
    let mut checked = 0;

    let measures = ["Vd", "Cd", "C1d", "C2d", "Cld", "Cl1d", "Cl2d", "Bd", "B1d", "B2d"];
    let printed: [(&str, &str, &[Option<f64>]); 6] = [
        ("lexical", "single", &[Some(70.9), Some(114.8), None, None, Some(89.1), None, None, Some(25.7), None, None]),
        (
            "lexical",
            "double",
            &[Some(78.8), Some(129.1), Some(61.4), Some(67.7), Some(87.9), Some(48.9), Some(39.0), Some(41.2), Some(12.5), Some(28.7)],
        ),
        ("lexical", "combined", &[Some(71.9), Some(116.6), None, None, Some(88.9), None, None, Some(27.6), None, None]),
        ("syntactic", "single", &[Some(56.3), Some(102.8), None, None, Some(83.0), None, None, Some(19.8), None, None]),
        (
            "syntactic",
            "double",
            &[Some(59.7), Some(97.2), Some(46.2), Some(50.9), Some(57.7), Some(35.3), Some(22.4), Some(39.5), Some(10.9), Some(28.6)],
        ),
        ("syntactic", "combined", &[Some(56.6), Some(102.2), None, None, Some(80.5), None, None, Some(21.7), None, None]),
    ];
    let rows = json["durations"].as_array().cloned().unwrap_or_default();
    for (gem_type, group, values) in printed {
        let Some(row) = rows.iter().find(|r| r["gem_type"] == gem_type && r["group"] == group) else {
            failures.push(format!("missing duration row {gem_type}/{group}"));
            continue;
        };
        for (measure, want) in measures.iter().zip(values) {
            let cell = row["cells"].as_array().and_then(|c| c.iter().find(|c| c["measure"] == *measure)).map(|c| &c["cell"]);
            match want {
                Some(w) => {
                    checked += 1;
                    expect(&mut failures, format!("{gem_type}/{group} {measure}"), cell.and_then(cell_mean), *w);
                }
                None => {
                    if cell.is_none_or(|c| c["status"] != "not_applicable") {
                        failures.push(format!("{gem_type}/{group} {measure} should be not applicable"));
                    }
                }
            }
        }
    }

    let classes = json["singleton_vs_geminate"].as_array().cloned().unwrap_or_default();
    let printed_classes = [("singleton", [85.07, 55.48, 35.9, 19.58]), ("geminate", [65.98, 111.01, 85.69, 25.32])];
    for (class, values) in printed_classes {
        let Some(row) = classes.iter().find(|r| r["class"] == class) else {
            failures.push(format!("missing {class} row"));
            continue;
        };
        for (key, want) in ["vd", "cd", "cld", "bd"].iter().zip(values) {
            checked += 1;
            expect(&mut failures, format!("{class} {key}"), cell_mean(&row[*key]), want);
        }
    }

    let counts = [
        ("MS", "lexical", 105, 15, 120),
        ("FS", "lexical", 105, 15, 120),
        ("all", "lexical", 210, 30, 240),
        ("MS", "syntactic", 69, 7, 76),
        ("FS", "syntactic", 68, 8, 76),
        ("all", "syntactic", 137, 15, 152),
    ];
    let count_rows = json["burst_counts"].as_array().cloned().unwrap_or_default();
    for (speaker, gem_type, single, double, total) in counts {
        checked += 1;
        let found = count_rows.iter().find(|r| r["speaker"] == speaker && r["gem_type"] == gem_type);
        let got = found.map(|r| (r["single"].as_u64(), r["double"].as_u64(), r["total"].as_u64()));
        if got != Some((Some(single), Some(double), Some(total))) {
            failures.push(format!("count {speaker}/{gem_type}: {got:?}"));
        }
    }

    if failures.is_empty() {
        Ok(format!("{checked} printed cells reproduced"))
    } else {
        Err(failures.join("; "))
    }
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn pipeline(root: &Path, jobs: &str) -> Result<(), String> {
    let corpus = root.join("corpus");
    let (audio, annotations) = (corpus.join("audio"), corpus.join("annotations"));
    let tokens = root.join("tokens.csv");
    let report = root.join("report");
    let steps: [Vec<&str>; 3] = [
        vec!["synth", "--tokens", "160", "--out", path_str(&corpus)],
        vec!["analyze", "--audio", path_str(&audio), "--annotations", path_str(&annotations), "--out", path_str(&tokens)],
        vec!["report", "--tokens", path_str(&tokens), "--out", path_str(&report)],
    ];
    for step in steps {
        let mut args = vec!["--seed", "4242", "--jobs", jobs];
        args.extend(step);
        let out = gemination(&args);
        if out.status.code() != Some(0) {
            return Err(format!("{} at --jobs {jobs}: {}", args[4], stderr(&out)));
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (one, eight) = (dir.path().join("jobs1"), dir.path().join("jobs8"));
    pipeline(&one, "1")?;
    pipeline(&eight, "8")?;
    let files = files_under(&one);
    if files != files_under(&eight) {
        return Err("output file sets differ".into());
    }
    let differing: Vec<String> = files
        .iter()
        .filter(|f| fs::read(one.join(f)).ok() != fs::read(eight.join(f)).ok())
        .map(|f| f.display().to_string())
        .collect();
    check(differing.is_empty(), format!("{} files compared, differing: {differing:?}", files.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("burst power oracle", burst_power_oracle),
        ("synthetic recovery", synthetic_recovery),
        ("ratio discrimination", ratio_discrimination),
        ("anova correctness", anova_correctness),
        ("effect size labels", effect_labels),
        ("duration additivity", duration_additivity),
        ("table reproduction", table_reproduction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
