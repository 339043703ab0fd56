use super::{build_token, classify_gemination, extract_durations, TokenMeta, TokenRow};
use crate::acoustics::{detect_acoustic_events, DetectorConfig};
use crate::signal_io::{phonemes, AnnotationSet, Segment, Tier, Waveform};
use crate::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub detector: DetectorConfig,
    pub ratio_threshold: f64,
    /// Largest gap allowed between the vowel's end and the consonant's start.
    pub contiguity_tolerance_s: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            detector: DetectorConfig::default(),
            ratio_threshold: super::DEFAULT_RATIO_THRESHOLD,
            contiguity_tolerance_s: 1e-4,
        }
    }
}

/// A token row with the consonant it was measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub target: Segment,
    pub row: TokenRow,
}

fn enclosing_word<'a>(ann: &'a AnnotationSet, target: &Segment) -> Option<&'a Segment> {
    let mid = 0.5 * (target.start_s + target.end_s);
    ann.tier(Tier::Word).find(|w| w.start_s <= mid && mid < w.end_s)
}

/// Measures every stop consonant carrying a `gem_type`. Failures are
/// recorded on the row instead of aborting.
pub fn measure_annotation(wave: &Waveform, ann: &AnnotationSet, config: &MeasureConfig) -> Vec<Measurement> {
    ann.targets()
        .filter(|t| phonemes::is_stop(&t.label))
        .map(|target| Measurement { target: target.clone(), row: measure_target(wave, ann, target, config) })
        .collect()
}

fn measure_target(wave: &Waveform, ann: &AnnotationSet, target: &Segment, config: &MeasureConfig) -> TokenRow {
    let meta = TokenMeta::from_annotation(target, enclosing_word(ann, target));
    let gem_type = match target.gem_type() {
        Some(Ok(g)) => g,
        other => {
            let value = match other {
                Some(Err(v)) => v,
                _ => String::new(),
            };
            return TokenRow::Failed { meta, gem_type: None, error: format!("BadGemType: '{value}'") };
        }
    };
    let failed = |meta: TokenMeta, code: &str, message: String| TokenRow::Failed {
        meta,
        gem_type: Some(gem_type),
        error: format!("{code}: {message}"),
    };
    if let Err(e) = meta.require_complete(&target.locator()) {
        return failed(meta, e.code(), e.to_string());
    }
    let vowel = ann
        .preceding_phone(target, config.contiguity_tolerance_s)
        .filter(|v| phonemes::is_vowel(&v.label));
    let consonant = Interval::new(target.start_s, target.end_s);
    let events = match detect_acoustic_events(wave, consonant, vowel.map(|v| Interval::new(v.start_s, v.end_s)), &config.detector) {
        Ok(events) => events,
        Err(e) => return failed(meta, e.code(), e.to_string()),
    };
    let result = extract_durations(&events, vowel).and_then(|record| {
        let powers: Vec<f64> = events.bursts().filter_map(|b| b.peak_power).collect();
        let call = classify_gemination(&record, config.ratio_threshold);
        build_token(record, &powers, call, meta.clone(), gem_type)
    });
    match result {
        Ok(token) => TokenRow::Measured(token),
        Err(e) => failed(meta, e.code(), e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustics::BurstCount;
    use crate::synth::{synthesize_vcv, ReleaseSpec, StimulusSpec};

    fn assert_near(got: f64, want: f64, tol: f64, what: &str) {
        assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}");
    }

    #[test]
    fn recovers_single_burst_stimulus() {
        let spec = StimulusSpec::single(70.9, 89.1, 25.7, 0.1);
        let (wave, gt) = synthesize_vcv(&spec).unwrap();
        let rows = measure_annotation(&wave, &gt.annotations, &MeasureConfig::default());
        assert_eq!(rows.len(), 1);
        let token = rows[0].row.token().expect("measured");
        assert_eq!(token.burst_count(), BurstCount::Single);
        let r = token.record();
        assert_near(r.vd().unwrap(), gt.record.vd().unwrap(), 1e-9, "Vd");
        assert_near(r.cld(), gt.record.cld(), 2.0, "Cld");
        assert_near(r.bd(), gt.record.bd(), 2.0, "Bd");
    }

    #[test]
    fn recovers_double_burst_stimulus() {
        let spec = StimulusSpec::double(
            78.8,
            ReleaseSpec { closure_ms: 48.9, burst_ms: 12.5, amplitude: 0.05 },
            ReleaseSpec { closure_ms: 39.0, burst_ms: 28.7, amplitude: 0.1 },
        );
        let (wave, gt) = synthesize_vcv(&spec).unwrap();
        let rows = measure_annotation(&wave, &gt.annotations, &MeasureConfig::default());
        let token = rows[0].row.token().expect("measured");
        assert_eq!(token.burst_count(), BurstCount::Double);
        let (r, g) = (token.record(), gt.record);
        assert_near(r.cl1d().unwrap(), g.cl1d().unwrap(), 2.0, "Cl1d");
        assert_near(r.b1d().unwrap(), g.b1d().unwrap(), 2.0, "B1d");
        assert_near(r.cl2d().unwrap(), g.cl2d().unwrap(), 2.0, "Cl2d");
        assert_near(r.b2d().unwrap(), g.b2d().unwrap(), 2.0, "B2d");
        let p = token.burst_powers();
        assert!(p[1] > p[0]);
    }

    #[test]
    fn silent_consonant_is_reported_not_fatal() {
        let spec = StimulusSpec::single(70.9, 89.1, 25.7, 0.1);
        let (wave, gt) = synthesize_vcv(&spec).unwrap();
        let mut samples = wave.samples().to_vec();
        let range = wave.sample_range(gt.consonant.start_s, gt.consonant.end_s).unwrap();
        samples[range].iter_mut().for_each(|x| *x = 0.0);
        let silent = Waveform::new(samples, wave.sample_rate_hz(), "silent").unwrap();
        let rows = measure_annotation(&silent, &gt.annotations, &MeasureConfig::default());
        match &rows[0].row {
            TokenRow::Failed { error, .. } => assert!(error.starts_with("NoBurstFound"), "{error}"),
            other => panic!("{other:?}"),
        }
    }
}
