mod common;

use std::fs;
use std::path::Path;

use common::{csv_bytes, fixture_rows, gemination, path_str, stderr, stdout, Group};
use gemination_core::acoustics::BurstCount;
use gemination_core::gemination::{read_tokens_csv, TokenRow};
use gemination_core::signal_io::{load_waveform, parse_annotations, write_waveform, GemType, Waveform};
use gemination_core::synth::CorpusSpec;
use serde_json::Value;

fn synth(dir: &Path, tokens: usize, seed: u64) -> (String, String) {
    let out = gemination(&["--seed", &seed.to_string(), "synth", "--tokens", &tokens.to_string(), "--out", path_str(dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    (path_str(&dir.join("audio")).to_string(), path_str(&dir.join("annotations")).to_string())
}

fn analyze(audio: &str, ann: &str, out: &Path) -> std::process::Output {
    gemination(&["analyze", "--audio", audio, "--annotations", ann, "--out", path_str(out)])
}

fn read_rows(path: &Path) -> Vec<TokenRow> {
    read_tokens_csv(fs::File::open(path).unwrap(), 1.0).unwrap()
}

#[test]
fn validate_accepts_a_clean_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = synth(dir.path(), 6, 3);
    let reports = dir.path().join("reports");
    let out = gemination(&["validate", "--audio", &audio, "--annotations", &ann, "--out", path_str(&reports)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("6 file(s) checked, 0 with errors"));
    assert_eq!(fs::read_to_string(reports.join("t0000.txt")).unwrap(), "ok\n");
}

#[test]
fn validate_reports_overlap_with_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = synth(dir.path(), 3, 3);
    let target = Path::new(&ann).join("t0001.ann");
    let mut text = fs::read_to_string(&target).unwrap();
    text.push_str("phone\tx\t0.01\t0.05\t\n");
    fs::write(&target, text).unwrap();
    let out = gemination(&["validate", "--audio", &audio, "--annotations", &ann]);
    assert_eq!(out.status.code(), Some(1));
    let s = stdout(&out);
    assert!(s.contains("OVERLAP"), "{s}");
    assert!(s.contains("t0001.ann:"), "{s}");
}

#[test]
fn validate_flags_missing_audio() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = synth(dir.path(), 3, 3);
    fs::remove_file(Path::new(&audio).join("t0002.wav")).unwrap();
    let out = gemination(&["validate", "--audio", &audio, "--annotations", &ann]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("PAIRING_ERROR"));
}

#[test]
fn missing_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let nowhere = dir.path().join("nowhere");
    let out = gemination(&["validate", "--audio", path_str(&nowhere), "--annotations", path_str(&nowhere)]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn analyze_empty_corpus_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = (dir.path().join("a"), dir.path().join("b"));
    fs::create_dir_all(&audio).unwrap();
    fs::create_dir_all(&ann).unwrap();
    let csv = dir.path().join("out/tokens.csv");
    let out = analyze(path_str(&audio), path_str(&ann), &csv);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("speaker,sentence_id,"));
}

#[test]
fn silent_consonant_is_recorded_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = synth(dir.path(), 8, 21);
    let ann_set = parse_annotations(Path::new(&ann).join("t0003.ann")).unwrap();
    let target = ann_set.targets().next().unwrap().clone();
    let wav_path = Path::new(&audio).join("t0003.wav");
    let wave = load_waveform(&wav_path).unwrap();
    let mut samples = wave.samples().to_vec();
    let range = wave.sample_range(target.start_s, target.end_s).unwrap();
    samples[range].iter_mut().for_each(|x| *x = 0.0);
    write_waveform(&wav_path, &Waveform::new(samples, wave.sample_rate_hz(), "silent").unwrap()).unwrap();

    let csv = dir.path().join("tokens.csv");
    let out = analyze(&audio, &ann, &csv);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_rows(&csv);
    assert_eq!(rows.len(), 8);
    let word = target.attr("word").unwrap();
    for row in &rows {
        match row {
            TokenRow::Failed { meta, error, .. } => {
                assert_eq!(meta.word, word);
                assert!(error.starts_with("NoBurstFound"), "{error}");
            }
            TokenRow::Measured(t) => assert_ne!(t.meta().word, word),
        }
    }
}

#[test]
fn analyze_recovers_class_means() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = CorpusSpec::reference_geminates(40);
    spec.relative_spread = 0.0;
    let spec_path = dir.path().join("corpus.toml");
    fs::write(&spec_path, spec.to_toml_string()).unwrap();
    let corpus = dir.path().join("corpus");
    let out = gemination(&["synth", "--spec", path_str(&spec_path), "--out", path_str(&corpus)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = dir.path().join("tokens.csv");
    let out = analyze(path_str(&corpus.join("audio")), path_str(&corpus.join("annotations")), &csv);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_rows(&csv);
    for class in &spec.classes {
        let count = if class.closure_ms.len() == 1 { BurstCount::Single } else { BurstCount::Double };
        let members: Vec<_> = rows
            .iter()
            .filter_map(TokenRow::token)
            .filter(|t| t.gem_type() == class.gem_type && t.burst_count() == count)
            .collect();
        assert!(!members.is_empty(), "{}", class.name);
        let mean = |f: &dyn Fn(&gemination_core::gemination::Token) -> f64| {
            members.iter().map(|t| f(t)).sum::<f64>() / members.len() as f64
        };
        let close = |got: f64, want: f64, what: &str| {
            assert!((got - want).abs() <= 2.0, "{} {what}: {got} vs {want}", class.name)
        };
        close(mean(&|t| t.record().vd().unwrap()), class.vd_ms, "Vd");
        close(mean(&|t| t.record().cld()), class.closure_ms.iter().sum(), "Cld");
        close(mean(&|t| t.record().bd()), class.burst_ms.iter().sum(), "Bd");
        if count == BurstCount::Double {
            close(mean(&|t| t.record().cl1d().unwrap()), class.closure_ms[0], "Cl1d");
            close(mean(&|t| t.record().b1d().unwrap()), class.burst_ms[0], "B1d");
            close(mean(&|t| t.record().cl2d().unwrap()), class.closure_ms[1], "Cl2d");
            close(mean(&|t| t.record().b2d().unwrap()), class.burst_ms[1], "B2d");
        }
    }
}

#[test]
fn report_rejects_malformed_csv_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let rows = fixture_rows(&common::reference_groups()[..1]);
    let text = String::from_utf8(csv_bytes(&rows[..3])).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut fields: Vec<&str> = lines[1].split(',').collect();
    fields[7] = "seventy";
    lines[1] = fields.join(",");
    let text = lines.join("\n") + "\n";
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, text).unwrap();
    let out = gemination(&["report", "--tokens", path_str(&csv), "--out", path_str(&dir.path().join("r"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn report_missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = gemination(&["report", "--tokens", path_str(&dir.path().join("none.csv")), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

fn report_json(dir: &Path, csv: &[u8], extra: &[&str]) -> Value {
    let path = dir.join("tokens.csv");
    fs::write(&path, csv).unwrap();
    let out_dir = dir.join("report");
    let mut args: Vec<&str> = extra.to_vec();
    args.extend(["report", "--tokens", path_str(&path), "--out", path_str(&out_dir)]);
    let out = gemination(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn all_singleton_tokens_leave_geminate_sections_empty() {
    let dir = tempfile::tempdir().unwrap();
    let groups = [Group { gem_type: GemType::None, counts: &[("MS", 5), ("FS", 5)], vd: 85.0, releases: &[(36.0, 19.5)] }];
    let json = report_json(dir.path(), &csv_bytes(&fixture_rows(&groups)), &[]);
    for family in json["anova"].as_array().unwrap() {
        for test in family["tests"].as_array().unwrap() {
            assert_eq!(test["outcome"]["status"], "insufficient_data", "{}", family["id"]);
        }
    }
    let geminate = &json["singleton_vs_geminate"][1];
    assert_eq!(geminate["vd"]["status"], "insufficient_data");
    assert_eq!(json["singleton_vs_geminate"][0]["n"], 10);
}

#[test]
fn report_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tokens.csv");
    fs::write(&csv, csv_bytes(&fixture_rows(&common::reference_groups()))).unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = gemination(&["report", "--tokens", path_str(&csv), "--out", path_str(&out_dir)]);
        assert_eq!(out.status.code(), Some(0));
        let mut files: Vec<_> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.iter().map(|f| (f.file_name().unwrap().to_owned(), fs::read(f).unwrap())).collect::<Vec<_>>()
    };
    let a = run("a");
    assert_eq!(a.len(), 5);
    assert_eq!(a, run("b"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# test config\nsignificance = 0.5\ntotal_df = true\n").unwrap();
    let csv = csv_bytes(&fixture_rows(&common::reference_groups()));
    let from_file = report_json(dir.path(), &csv, &["--config", path_str(&conf)]);
    assert_eq!(from_file["config"]["significance"], 0.5);
    assert_eq!(from_file["config"]["show_total_df"], true);
    let flagged = report_json(dir.path(), &csv, &["--config", path_str(&conf), "--significance", "0.01"]);
    assert_eq!(flagged["config"]["significance"], 0.01);
}

#[test]
fn bad_config_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "rise_factor = 10\nthreshold = 3\n").unwrap();
    let out = gemination(&["--config", path_str(&conf), "report", "--tokens", "x", "--out", "y"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("run.conf:2: unknown key 'threshold'"), "{}", stderr(&out));
    let out = gemination(&["--ratio-threshold=-1", "report", "--tokens", "x", "--out", "y"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synthetic_corpus_shows_stronger_second_burst() {
    let dir = tempfile::tempdir().unwrap();
    let (audio, ann) = synth(dir.path(), 120, 8);
    let csv = dir.path().join("tokens.csv");
    assert_eq!(analyze(&audio, &ann, &csv).status.code(), Some(0));
    let json = report_json(dir.path(), &fs::read(&csv).unwrap(), &[]);
    let power = json["anova"].as_array().unwrap().iter().find(|f| f["id"] == "burst_power").unwrap();
    let combined = power["tests"].as_array().unwrap().iter().find(|t| t["subset"] == "combined").unwrap();
    assert_eq!(combined["outcome"]["effect"], "large");
    let first = combined["groups"][0]["cell"]["mean"].as_f64().unwrap();
    let second = combined["groups"][1]["cell"]["mean"].as_f64().unwrap();
    assert!(second >= 2.0 * first, "{first} vs {second}");
}
