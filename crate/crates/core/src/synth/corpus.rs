use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stimulus::RAMP_MS;
use super::{synthesize_vcv, GroundTruth, ReleaseSpec, SplitMix64, StimulusLabels, StimulusSpec, SynthError};
use crate::gemination::{build_token, classify_gemination, token_fields, TokenMeta, TokenRow, TOKEN_COLUMNS};
use crate::signal_io::{encode_wav, serialize_annotations, GemType, Waveform};

/// Durations are drawn from a normal truncated at this fraction of the mean.
pub const TRUNCATION_FRACTION: f64 = 0.2;

pub const GROUND_TRUTH_COLUMNS: [&str; 8] = [
    "gt_file",
    "gt_class",
    "gt_consonant_start_s",
    "gt_consonant_end_s",
    "gt_burst1_start_s",
    "gt_burst1_end_s",
    "gt_burst2_start_s",
    "gt_burst2_end_s",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerSpec {
    pub name: String,
    pub f0_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    pub gem_type: GemType,
    /// Relative share of the corpus.
    pub weight: f64,
    pub vd_ms: f64,
    /// One entry per release; two entries make a double-burst class.
    pub closure_ms: Vec<f64>,
    pub burst_ms: Vec<f64>,
    pub burst_amplitudes: Vec<f64>,
    /// When set, Cd is drawn as `ratio × Vd` around this mean and the
    /// closure/burst means are scaled to fit it.
    #[serde(default)]
    pub ratio: Option<f64>,
    #[serde(default)]
    pub consonant: Option<String>,
}

fn default_sample_rate() -> u32 {
    44100
}
fn default_vowel_amplitude() -> f64 {
    0.5
}
fn default_post_vowel() -> f64 {
    60.0
}
fn default_speakers() -> Vec<SpeakerSpec> {
    vec![
        SpeakerSpec { name: "MS".into(), f0_hz: 120.0 },
        SpeakerSpec { name: "FS".into(), f0_hz: 210.0 },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n_tokens: usize,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: u32,
    /// Standard deviation of every drawn quantity as a fraction of its mean.
    #[serde(default)]
    pub relative_spread: f64,
    #[serde(default = "default_vowel_amplitude")]
    pub vowel_amplitude: f64,
    #[serde(default = "default_post_vowel")]
    pub post_vowel_ms: f64,
    #[serde(default)]
    pub voiced_closure: bool,
    #[serde(default = "default_speakers")]
    pub speakers: Vec<SpeakerSpec>,
    pub classes: Vec<ClassSpec>,
}

impl CorpusSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, SynthError> {
        let spec: CorpusSpec = toml::from_str(text).map_err(|e| SynthError::BadSpec(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("corpus spec is always representable as TOML")
    }

    /// Geminate classes at reference per-class means, weighted by reference
    /// single/double burst counts (12.5% lexical and 9.9%
    /// syntactic double bursts). Second bursts are twice the amplitude of
    /// first bursts.
    pub fn reference_geminates(n_tokens: usize) -> Self {
        let class = |name: &str, gem_type, weight, vd_ms, closure_ms: &[f64], burst_ms: &[f64]| ClassSpec {
            name: name.into(),
            gem_type,
            weight,
            vd_ms,
            closure_ms: closure_ms.to_vec(),
            burst_ms: burst_ms.to_vec(),
            burst_amplitudes: if closure_ms.len() == 1 { vec![0.1] } else { vec![0.05, 0.1] },
            ratio: None,
            consonant: None,
        };
        CorpusSpec {
            n_tokens,
            sample_rate_hz: default_sample_rate(),
            relative_spread: 0.1,
            vowel_amplitude: default_vowel_amplitude(),
            post_vowel_ms: default_post_vowel(),
            voiced_closure: false,
            speakers: default_speakers(),
            classes: vec![
                class("lexical_sb", GemType::Lexical, 210.0, 70.9, &[89.09], &[25.68]),
                class("lexical_db", GemType::Lexical, 30.0, 78.8, &[48.91, 38.97], &[12.49, 28.70]),
                class("syntactic_sb", GemType::Syntactic, 137.0, 56.3, &[83.04], &[19.76]),
                class("syntactic_db", GemType::Syntactic, 15.0, 59.7, &[35.29, 22.38], &[10.92, 28.56]),
            ],
        }
    }

    pub fn check(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::BadSpec(m));
        if !(0.0..1.0).contains(&self.relative_spread) {
            return bad(format!("relative_spread {} outside [0, 1)", self.relative_spread));
        }
        if self.speakers.is_empty() {
            return bad("at least one speaker is required".into());
        }
        if self.n_tokens > 0 && self.classes.is_empty() {
            return bad("at least one class is required".into());
        }
        for c in &self.classes {
            let n = c.closure_ms.len();
            if !(1..=2).contains(&n) || c.burst_ms.len() != n || c.burst_amplitudes.len() != n {
                return bad(format!(
                    "class '{}': closure_ms, burst_ms and burst_amplitudes must all have 1 or 2 entries",
                    c.name
                ));
            }
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return bad(format!("class '{}': weight must be non-negative", c.name));
            }
            if c.ratio.is_some_and(|r| !(r > 0.0)) {
                return bad(format!("class '{}': ratio must be positive", c.name));
            }
        }
        if self.n_tokens > 0 && !(self.classes.iter().map(|c| c.weight).sum::<f64>() > 0.0) {
            return bad("class weights sum to zero".into());
        }
        Ok(())
    }
}

/// Largest-remainder apportionment of `n` items over `weights`; ties go to
/// the earlier class.
pub fn apportion(weights: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    if n == 0 || total <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

fn truncated_normal(rng: &mut SplitMix64, mean: f64, spread: f64, floor: f64) -> f64 {
    if spread == 0.0 {
        return mean;
    }
    for _ in 0..1000 {
        let x = mean * (1.0 + spread * rng.normal());
        if x >= floor {
            return x;
        }
    }
    floor
}

/// One generated token together with its construction record.
#[derive(Debug, Clone)]
pub struct CorpusToken {
    pub id: String,
    pub class: String,
    pub stimulus: StimulusSpec,
    pub wave: Waveform,
    pub truth: GroundTruth,
}

/// Draws stimulus specs for every token. Class membership is apportioned
/// exactly and shuffled; each token then draws from its own substream.
pub fn plan_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<(String, StimulusSpec)>, SynthError> {
    spec.check()?;
    let weights: Vec<f64> = spec.classes.iter().map(|c| c.weight).collect();
    let counts = apportion(&weights, spec.n_tokens);
    let mut membership: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat_n(c, k))
        .collect();
    SplitMix64::new(seed).shuffle(&mut membership);

    let stops = ["t", "k", "p", "d", "g", "b"];
    let n_speakers = spec.speakers.len();
    let mut plan = Vec::with_capacity(spec.n_tokens);
    for (i, &c) in membership.iter().enumerate() {
        let class = &spec.classes[c];
        let mut rng = SplitMix64::new(SplitMix64::derive(seed, i as u64));
        let spread = spec.relative_spread;
        let draw = |rng: &mut SplitMix64, mean: f64| truncated_normal(rng, mean, spread, TRUNCATION_FRACTION * mean);
        let vd_floor = (TRUNCATION_FRACTION * class.vd_ms).max(2.0 * RAMP_MS);
        let vd_ms = truncated_normal(&mut rng, class.vd_ms, spread, vd_floor);

        let mut closures: Vec<f64> = class.closure_ms.clone();
        let mut bursts: Vec<f64> = class.burst_ms.clone();
        match class.ratio {
            Some(mean_ratio) => {
                let ratio = draw(&mut rng, mean_ratio);
                let scale = ratio * vd_ms / (closures.iter().sum::<f64>() + bursts.iter().sum::<f64>());
                closures.iter_mut().chain(bursts.iter_mut()).for_each(|x| *x *= scale);
            }
            None => {
                for k in 0..closures.len() {
                    closures[k] = draw(&mut rng, closures[k]);
                    bursts[k] = draw(&mut rng, bursts[k]);
                }
            }
        }
        let releases = (0..closures.len())
            .map(|k| ReleaseSpec {
                closure_ms: closures[k],
                burst_ms: bursts[k],
                amplitude: class.burst_amplitudes[k],
            })
            .collect();
        let speaker = &spec.speakers[i % n_speakers];
        let stop = stops[i % stops.len()];
        let consonant = class.consonant.clone().unwrap_or_else(|| {
            if class.gem_type.is_geminate() {
                format!("{stop}{stop}")
            } else {
                stop.to_string()
            }
        });
        let stimulus = StimulusSpec {
            vd_ms,
            releases,
            vowel_amplitude: spec.vowel_amplitude,
            f0_hz: speaker.f0_hz,
            post_vowel_ms: spec.post_vowel_ms,
            voiced_closure: spec.voiced_closure,
            sample_rate_hz: spec.sample_rate_hz,
            seed: rng.next_u64(),
            labels: StimulusLabels {
                speaker: speaker.name.clone(),
                sentence_id: (i / n_speakers + 1).to_string(),
                repetition: "1".into(),
                word: format!("w{i:04}"),
                vowel: "a".into(),
                consonant,
                post_vowel: "a".into(),
                gem_type: class.gem_type,
            },
        };
        plan.push((class.name.clone(), stimulus));
    }
    Ok(plan)
}

pub fn token_id(index: usize) -> String {
    format!("t{index:04}")
}

/// Synthesizes every planned token in parallel; order follows the token index.
pub fn synthesize_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<CorpusToken>, SynthError> {
    plan_corpus(spec, seed)?
        .into_par_iter()
        .enumerate()
        .map(|(i, (class, stimulus))| {
            let id = token_id(i);
            let (wave, mut truth) = synthesize_vcv(&stimulus)?;
            let wave = Waveform::new(wave.samples().to_vec(), wave.sample_rate_hz(), id.clone())
                .map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;
            truth.annotations = relabel(&truth, &id)?;
            Ok(CorpusToken { id, class, stimulus, wave, truth })
        })
        .collect()
}

fn relabel(truth: &GroundTruth, audio_ref: &str) -> Result<crate::signal_io::AnnotationSet, SynthError> {
    crate::signal_io::AnnotationSet::new(truth.annotations.segments().to_vec(), audio_ref)
        .map_err(|e| SynthError::SpecInfeasible(e.to_string()))
}

pub fn manifest_header() -> Vec<&'static str> {
    TOKEN_COLUMNS.iter().chain(GROUND_TRUTH_COLUMNS.iter()).copied().collect()
}

/// Token columns computed from the ground truth followed by the `gt_` columns.
pub fn manifest_fields(token: &CorpusToken) -> Result<Vec<String>, SynthError> {
    let truth = &token.truth;
    let labels = &token.stimulus.labels;
    let meta = TokenMeta {
        speaker: labels.speaker.clone(),
        sentence_id: labels.sentence_id.clone(),
        repetition: labels.repetition.clone(),
        word: labels.word.clone(),
        consonant: labels.consonant.clone(),
    };
    let call = classify_gemination(&truth.record, 1.0);
    let built = build_token(truth.record, &truth.burst_powers(), call, meta, labels.gem_type)
        .map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;
    let mut fields = token_fields(&TokenRow::Measured(built));
    fields.truncate(TOKEN_COLUMNS.len());
    let bursts: Vec<_> = truth.events.iter().filter(|e| e.peak_power.is_some()).collect();
    let time = |t: Option<f64>| t.map(|t| format!("{t:.6}")).unwrap_or_default();
    fields.push(token.id.clone());
    fields.push(token.class.clone());
    fields.push(time(Some(truth.consonant.start_s)));
    fields.push(time(Some(truth.consonant.end_s)));
    for k in 0..2 {
        fields.push(time(bursts.get(k).map(|b| b.start_s)));
        fields.push(time(bursts.get(k).map(|b| b.end_s)));
    }
    Ok(fields)
}

pub fn write_manifest<W: std::io::Write>(tokens: &[CorpusToken], out: W) -> Result<(), SynthError> {
    let io = |e: csv::Error| SynthError::Io { path: "manifest".into(), message: e.to_string() };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(manifest_header()).map_err(io)?;
    for t in tokens {
        w.write_record(manifest_fields(t)?).map_err(io)?;
    }
    w.flush().map_err(|e| SynthError::Io { path: "manifest".into(), message: e.to_string() })
}

/// Summary of a written corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSummary {
    pub n_tokens: usize,
    pub class_counts: Vec<(String, usize)>,
}

/// Writes `audio/<id>.wav`, `annotations/<id>.ann` and `manifest.csv`
/// under `out_dir`.
pub fn generate_corpus(spec: &CorpusSpec, seed: u64, out_dir: &Path) -> Result<CorpusSummary, SynthError> {
    let tokens = synthesize_corpus(spec, seed)?;
    let io = |path: &Path, e: std::io::Error| SynthError::Io { path: path.display().to_string(), message: e.to_string() };
    let audio_dir = out_dir.join("audio");
    let ann_dir = out_dir.join("annotations");
    for dir in [&audio_dir, &ann_dir] {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    tokens.par_iter().try_for_each(|t| {
        let wav = audio_dir.join(format!("{}.wav", t.id));
        std::fs::write(&wav, encode_wav(&t.wave)).map_err(|e| io(&wav, e))?;
        let ann = ann_dir.join(format!("{}.ann", t.id));
        std::fs::write(&ann, serialize_annotations(&t.truth.annotations)).map_err(|e| io(&ann, e))
    })?;
    let manifest = out_dir.join("manifest.csv");
    let mut buf = Vec::new();
    write_manifest(&tokens, &mut buf)?;
    std::fs::write(&manifest, buf).map_err(|e| io(&manifest, e))?;

    let class_counts = spec
        .classes
        .iter()
        .map(|c| (c.name.clone(), tokens.iter().filter(|t| t.class == c.name).count()))
        .collect();
    Ok(CorpusSummary { n_tokens: tokens.len(), class_counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apportionment_of_reference_counts() {
        assert_eq!(apportion(&[210.0, 30.0, 137.0, 15.0], 380), [204, 29, 133, 14]);
        assert_eq!(apportion(&[210.0, 30.0, 137.0, 15.0], 392), [210, 30, 137, 15]);
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 2), [1, 1, 0]);
        assert_eq!(apportion(&[1.0, 2.0], 0), [0, 0]);
    }

    #[test]
    fn plan_is_deterministic_and_exact() {
        let spec = CorpusSpec::reference_geminates(380);
        let a = plan_corpus(&spec, 11).unwrap();
        assert_eq!(a, plan_corpus(&spec, 11).unwrap());
        assert_ne!(a, plan_corpus(&spec, 12).unwrap());
        let count = |name: &str| a.iter().filter(|(c, _)| c == name).count();
        assert_eq!(
            [count("lexical_sb"), count("lexical_db"), count("syntactic_sb"), count("syntactic_db")],
            [204, 29, 133, 14]
        );
    }

    #[test]
    fn draws_respect_the_floor() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..10_000 {
            assert!(truncated_normal(&mut rng, 10.0, 0.9, 2.0) >= 2.0);
        }
        assert_eq!(truncated_normal(&mut rng, 10.0, 0.0, 2.0), 10.0);
    }

    #[test]
    fn ratio_classes_hit_the_drawn_ratio() {
        let mut spec = CorpusSpec::reference_geminates(20);
        spec.relative_spread = 0.0;
        for c in &mut spec.classes {
            c.ratio = Some(1.84);
        }
        for (_, s) in plan_corpus(&spec, 1).unwrap() {
            let cd: f64 = s.releases.iter().map(|r| r.closure_ms + r.burst_ms).sum();
            assert!((cd / s.vd_ms - 1.84).abs() < 1e-12);
        }
    }

    #[test]
    fn toml_round_trip() {
        let spec = CorpusSpec::reference_geminates(50);
        let back = CorpusSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        assert_eq!(back, spec);
        let minimal = r#"
            n_tokens = 3
            [[classes]]
            name = "sing"
            gem_type = "none"
            weight = 1
            vd_ms = 85.07
            closure_ms = [35.9]
            burst_ms = [19.58]
            burst_amplitudes = [0.1]
        "#;
        let s = CorpusSpec::from_toml_str(minimal).unwrap();
        assert_eq!(s.sample_rate_hz, 44100);
        assert_eq!(s.speakers.len(), 2);
        assert!(CorpusSpec::from_toml_str("n_tokens = 1\nclasses = []").is_err());
    }

    #[test]
    fn empty_corpus_has_header_only_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let summary = generate_corpus(&CorpusSpec::reference_geminates(0), 1, dir.path()).unwrap();
        assert_eq!(summary.n_tokens, 0);
        let text = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
    }
}
