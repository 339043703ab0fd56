use serde::{Deserialize, Serialize};

use super::{SplitMix64, SynthError};
use crate::acoustics::{burst_power, AcousticEvent, EventKind};
use crate::gemination::DurationRecord;
use crate::signal_io::{requantize, AnnotationSet, GemType, Segment, Tier, Waveform};
use crate::Interval;

/// Length of the raised-cosine on/off ramps of each vowel.
pub const RAMP_MS: f64 = 10.0;
const MURMUR_HZ: f64 = 120.0;
const MURMUR_LEVEL: f64 = 0.02;
const HARMONIC_CEILING_HZ: f64 = 4000.0;

/// One closure followed by its release burst.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleaseSpec {
    pub closure_ms: f64,
    pub burst_ms: f64,
    /// RMS of the burst, so its mean squared amplitude is `amplitude²`.
    pub amplitude: f64,
}

/// Labels written into the stimulus annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusLabels {
    pub speaker: String,
    pub sentence_id: String,
    pub repetition: String,
    pub word: String,
    pub vowel: String,
    pub consonant: String,
    pub post_vowel: String,
    pub gem_type: GemType,
}

impl Default for StimulusLabels {
    fn default() -> Self {
        StimulusLabels {
            speaker: "MS".into(),
            sentence_id: "1".into(),
            repetition: "1".into(),
            word: "atta".into(),
            vowel: "a".into(),
            consonant: "tt".into(),
            post_vowel: "a".into(),
            gem_type: GemType::Lexical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub vd_ms: f64,
    /// One release for a single burst, two for a double burst.
    pub releases: Vec<ReleaseSpec>,
    /// Peak amplitude of the vowels.
    pub vowel_amplitude: f64,
    pub f0_hz: f64,
    pub post_vowel_ms: f64,
    pub voiced_closure: bool,
    pub sample_rate_hz: u32,
    pub seed: u64,
    pub labels: StimulusLabels,
}

impl StimulusSpec {
    pub fn single(vd_ms: f64, closure_ms: f64, burst_ms: f64, amplitude: f64) -> Self {
        StimulusSpec {
            vd_ms,
            releases: vec![ReleaseSpec { closure_ms, burst_ms, amplitude }],
            ..StimulusSpec::base()
        }
    }

    pub fn double(vd_ms: f64, first: ReleaseSpec, second: ReleaseSpec) -> Self {
        StimulusSpec { vd_ms, releases: vec![first, second], ..StimulusSpec::base() }
    }

    fn base() -> Self {
        StimulusSpec {
            vd_ms: 0.0,
            releases: Vec::new(),
            vowel_amplitude: 0.5,
            f0_hz: 120.0,
            post_vowel_ms: 60.0,
            voiced_closure: false,
            sample_rate_hz: 44100,
            seed: 0,
            labels: StimulusLabels::default(),
        }
    }

    pub fn check(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::SpecInfeasible(m));
        if self.sample_rate_hz == 0 {
            return bad("sample rate must be positive".into());
        }
        if !(1..=2).contains(&self.releases.len()) {
            return bad(format!("{} releases; expected 1 or 2", self.releases.len()));
        }
        for (name, v) in [("Vd", self.vd_ms), ("post-vowel", self.post_vowel_ms)] {
            if !(v >= 2.0 * RAMP_MS) || !v.is_finite() {
                return bad(format!("{name} of {v} ms is shorter than its two {RAMP_MS} ms ramps"));
            }
        }
        for r in &self.releases {
            if !(r.closure_ms > 0.0 && r.burst_ms > 0.0 && r.closure_ms.is_finite() && r.burst_ms.is_finite()) {
                return bad(format!("closure {} ms and burst {} ms must be positive", r.closure_ms, r.burst_ms));
            }
            if !(r.amplitude > 0.0 && r.amplitude <= 1.0) {
                return bad(format!("burst amplitude {} outside (0, 1]", r.amplitude));
            }
        }
        if !(self.vowel_amplitude > 0.0 && self.vowel_amplitude <= 1.0) {
            return bad(format!("vowel amplitude {} outside (0, 1]", self.vowel_amplitude));
        }
        if !(self.f0_hz > 0.0 && self.f0_hz < self.sample_rate_hz as f64 / 2.0) {
            return bad(format!("f0 {} Hz out of range", self.f0_hz));
        }
        let sr = self.sample_rate_hz as f64;
        let ticks = |ms: f64| (ms * sr / 1000.0).round() as usize;
        if self.releases.iter().any(|r| ticks(r.closure_ms) == 0 || ticks(r.burst_ms) == 0) {
            return bad("a closure or burst is shorter than one sample".into());
        }
        Ok(())
    }
}

/// Exact construction record of a synthesized stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub annotations: AnnotationSet,
    pub vowel: Interval,
    pub consonant: Interval,
    /// Closure/burst tiling of the consonant with burst powers measured on
    /// the final quantized samples.
    pub events: Vec<AcousticEvent>,
    /// Durations in ms at sample-tick resolution.
    pub record: DurationRecord,
}

impl GroundTruth {
    pub fn burst_powers(&self) -> Vec<f64> {
        self.events.iter().filter_map(|e| e.peak_power).collect()
    }
}

/// Band-limited pulse train: harmonics of f0 with 1/h amplitudes up to a
/// fixed ceiling, scaled to a unit peak.
fn vowel_cycle_source(n: usize, f0: f64, sr: f64) -> Vec<f64> {
    let ceiling = HARMONIC_CEILING_HZ.min(0.45 * sr);
    let harmonics = ((ceiling / f0).floor() as usize).max(1);
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            (1..=harmonics)
                .map(|h| (2.0 * std::f64::consts::PI * h as f64 * f0 * t).sin() / h as f64)
                .sum()
        })
        .collect();
    let peak = raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    raw.into_iter().map(|x| x / peak).collect()
}

fn ramped_vowel(n: usize, ramp: usize, f0: f64, sr: f64, amplitude: f64) -> Vec<f64> {
    let mut v = vowel_cycle_source(n, f0, sr);
    for (i, x) in v.iter_mut().enumerate() {
        let edge = i.min(n - 1 - i);
        let gain = if edge < ramp {
            let s = (std::f64::consts::FRAC_PI_2 * (edge as f64 + 0.5) / ramp as f64).sin();
            s * s
        } else {
            1.0
        };
        *x *= amplitude * gain;
    }
    v
}

/// White Gaussian noise under an exponential decay that falls to half its
/// initial amplitude at the end of the burst, scaled to mean square `amp²`.
fn burst(n: usize, amplitude: f64, rng: &mut SplitMix64) -> Vec<f64> {
    let tau = n as f64 / std::f64::consts::LN_2;
    let raw: Vec<f64> = (0..n).map(|i| rng.normal() * (-(i as f64) / tau).exp()).collect();
    let ms = raw.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let scale = if ms > 0.0 { amplitude / ms.sqrt() } else { 0.0 };
    raw.into_iter().map(|x| (x * scale).clamp(-1.0, 1.0)).collect()
}

pub fn synthesize_vcv(spec: &StimulusSpec) -> Result<(Waveform, GroundTruth), SynthError> {
    spec.check()?;
    let sr = spec.sample_rate_hz as f64;
    let ticks = |ms: f64| (ms * sr / 1000.0).round() as usize;
    let ramp = ticks(RAMP_MS);
    let mut rng = SplitMix64::new(spec.seed);

    let n_vowel = ticks(spec.vd_ms);
    let mut samples = ramped_vowel(n_vowel, ramp, spec.f0_hz, sr, spec.vowel_amplitude);
    let mut bounds = vec![n_vowel];
    for r in &spec.releases {
        let n_cl = ticks(r.closure_ms);
        let start = samples.len();
        samples.extend((0..n_cl).map(|i| {
            if spec.voiced_closure {
                let t = (start + i) as f64 / sr;
                MURMUR_LEVEL * spec.vowel_amplitude * (2.0 * std::f64::consts::PI * MURMUR_HZ * t).sin()
            } else {
                0.0
            }
        }));
        bounds.push(samples.len());
        samples.extend(burst(ticks(r.burst_ms), r.amplitude, &mut rng));
        bounds.push(samples.len());
    }
    let n_post = ticks(spec.post_vowel_ms);
    samples.extend(ramped_vowel(n_post, ramp, spec.f0_hz, sr, spec.vowel_amplitude));
    let total = samples.len();
    let samples: Vec<f64> = samples.into_iter().map(requantize).collect();
    let wave = Waveform::new(samples, spec.sample_rate_hz, format!("synth-{}", spec.seed))
        .map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;

    let t = |n: usize| n as f64 / sr;
    let mut events = Vec::with_capacity(4);
    for (k, pair) in bounds.windows(2).enumerate() {
        let iv = Interval::new(t(pair[0]), t(pair[1]));
        let (kind, peak_power) = if k % 2 == 0 {
            (EventKind::Closure, None)
        } else {
            let p = burst_power(&wave, iv).map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;
            (EventKind::Burst, Some(p))
        };
        events.push(AcousticEvent { kind, start_s: iv.start_s, end_s: iv.end_s, peak_power });
    }
    let ms = |a: usize, b: usize| (b - a) as f64 * 1000.0 / sr;
    let vd = Some(ms(0, n_vowel));
    let record = match bounds.as_slice() {
        [a, b, c] => DurationRecord::single(vd, ms(*a, *b), ms(*b, *c)),
        [a, b, c, d, e] => DurationRecord::double(vd, ms(*a, *b), ms(*b, *c), ms(*c, *d), ms(*d, *e)),
        _ => unreachable!("one or two releases were checked"),
    }
    .map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;

    let vowel = Interval::new(0.0, t(n_vowel));
    let consonant = Interval::new(t(n_vowel), t(*bounds.last().unwrap()));
    let l = &spec.labels;
    let segments = vec![
        Segment::new(Tier::Word, l.word.clone(), 0.0, t(total))
            .with_attr("speaker", l.speaker.clone())
            .with_attr("sentence_id", l.sentence_id.clone())
            .with_attr("repetition", l.repetition.clone()),
        Segment::new(Tier::Phone, l.vowel.clone(), vowel.start_s, vowel.end_s),
        Segment::new(Tier::Phone, l.consonant.clone(), consonant.start_s, consonant.end_s)
            .with_attr("gem_type", l.gem_type.as_str())
            .with_attr("speaker", l.speaker.clone())
            .with_attr("sentence_id", l.sentence_id.clone())
            .with_attr("repetition", l.repetition.clone())
            .with_attr("word", l.word.clone()),
        Segment::new(Tier::Phone, l.post_vowel.clone(), consonant.end_s, t(total)),
    ];
    let annotations = AnnotationSet::new(segments, wave.source_path())
        .map_err(|e| SynthError::SpecInfeasible(e.to_string()))?;
    Ok((wave, GroundTruth { annotations, vowel, consonant, events, record }))
}
