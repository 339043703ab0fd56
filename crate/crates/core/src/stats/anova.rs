use std::fmt;

use serde::Serialize;

use super::{f_sf, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptives {
    pub mean: f64,
    /// Sample standard deviation over √n.
    pub standard_error: f64,
    pub n: usize,
    /// False when n = 1 and the standard error is set to 0 by convention.
    pub se_defined: bool,
}

pub fn descriptive(values: &[f64]) -> Result<Descriptives, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::InvalidArgument(format!("non-finite value {v}")));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(Descriptives { mean, standard_error: 0.0, n, se_defined: false });
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Descriptives { mean, standard_error: (var / n as f64).sqrt(), n, se_defined: true })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedSample {
    groups: Vec<(String, Vec<f64>)>,
}

impl GroupedSample {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        if groups.len() < 2 {
            return Err(StatsError::TooFewGroups(groups.len()));
        }
        if let Some((label, _)) = groups.iter().find(|(_, v)| v.is_empty()) {
            return Err(StatsError::EmptyGroup(label.clone()));
        }
        if let Some(v) = groups.iter().flat_map(|(_, v)| v).find(|v| !v.is_finite()) {
            return Err(StatsError::InvalidArgument(format!("non-finite value {v}")));
        }
        let n: usize = groups.iter().map(|(_, v)| v.len()).sum();
        if n < groups.len() + 1 {
            return Err(StatsError::InsufficientData(format!(
                "{n} observations in {} groups",
                groups.len()
            )));
        }
        Ok(GroupedSample { groups })
    }

    pub fn groups(&self) -> &[(String, Vec<f64>)] {
        &self.groups
    }

    pub fn total_count(&self) -> usize {
        self.groups.iter().map(|(_, v)| v.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectLabel {
    Negligible,
    Small,
    Medium,
    Large,
}

impl fmt::Display for EffectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectLabel::Negligible => "negligible",
            EffectLabel::Small => "small",
            EffectLabel::Medium => "medium",
            EffectLabel::Large => "large",
        })
    }
}

pub const SMALL_EFFECT: f64 = 0.0099;
pub const MEDIUM_EFFECT: f64 = 0.0588;
pub const LARGE_EFFECT: f64 = 0.1379;

/// Cohen's bands for η², each closed below and open above.
pub fn classify_effect_size(eta_sq: f64) -> EffectLabel {
    if eta_sq < SMALL_EFFECT {
        EffectLabel::Negligible
    } else if eta_sq < MEDIUM_EFFECT {
        EffectLabel::Small
    } else if eta_sq < LARGE_EFFECT {
        EffectLabel::Medium
    } else {
        EffectLabel::Large
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: u64,
    pub df_within: u64,
    pub p: f64,
    pub eta_sq: f64,
    pub effect_label: EffectLabel,
    pub ss_between: f64,
    pub ss_within: f64,
}

impl AnovaResult {
    /// N − 1, the total degrees of freedom.
    pub fn df_total(&self) -> u64 {
        self.df_between + self.df_within
    }
}

/// Relative size of SS_within below which groups count as internally constant.
const ZERO_VARIANCE_TOLERANCE: f64 = 1e-12;

pub fn one_way_anova(sample: &GroupedSample) -> Result<AnovaResult, StatsError> {
    let groups = sample.groups();
    let n_total = sample.total_count();
    let grand = groups.iter().flat_map(|(_, v)| v).sum::<f64>() / n_total as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    let mut scale = 0.0f64;
    for (_, values) in groups {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        ss_between += values.len() as f64 * (mean - grand).powi(2);
        ss_within += values.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
        scale = values.iter().fold(scale, |m, x| m.max(x.abs()));
    }
    let total_scale = n_total as f64 * scale * scale;
    if ss_within <= ZERO_VARIANCE_TOLERANCE * total_scale {
        return Err(StatsError::ZeroWithinVariance);
    }
    let df_between = (groups.len() - 1) as u64;
    let df_within = (n_total - groups.len()) as u64;
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    let p = f_sf(f, df_between, df_within)?;
    let eta_sq = ss_between / (ss_between + ss_within);
    Ok(AnovaResult {
        f,
        df_between,
        df_within,
        p,
        eta_sq,
        effect_label: classify_effect_size(eta_sq),
        ss_between,
        ss_within,
    })
}

/// p to three decimals, with values below 0.001 shown as "<0.001".
pub fn format_p(p: f64) -> String {
    if p < 0.001 {
        "<0.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(groups: &[&[f64]]) -> GroupedSample {
        GroupedSample::new(
            groups.iter().enumerate().map(|(i, g)| (format!("g{i}"), g.to_vec())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn descriptives() {
        let d = descriptive(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!((d.mean, d.standard_error), (2.0, 0.0));
        let d = descriptive(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.mean, 2.0);
        assert!((d.standard_error - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let d = descriptive(&[4.0]).unwrap();
        assert!(!d.se_defined);
        assert_eq!(d.standard_error, 0.0);
        assert_eq!(descriptive(&[]), Err(StatsError::EmptyInput));
    }

    #[test]
    fn identical_groups() {
        let r = one_way_anova(&sample(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]])).unwrap();
        assert_eq!(r.f, 0.0);
        assert_eq!(r.eta_sq, 0.0);
        assert!((r.p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_groups() {
        let r = one_way_anova(&sample(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]])).unwrap();
        assert!((r.ss_between - 1.5).abs() < 1e-12);
        assert!((r.ss_within - 4.0).abs() < 1e-12);
        assert_eq!((r.df_between, r.df_within), (1, 4));
        assert!((r.f - 1.5).abs() < 1e-12);
        assert!((r.eta_sq - 1.5 / 5.5).abs() < 1e-12);
        assert_eq!(r.df_total(), 5);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            GroupedSample::new(vec![("a".into(), vec![1.0, 2.0])]).unwrap_err(),
            StatsError::TooFewGroups(1)
        );
        assert!(matches!(
            GroupedSample::new(vec![("a".into(), vec![1.0]), ("b".into(), vec![])]),
            Err(StatsError::EmptyGroup(_))
        ));
        assert!(matches!(
            GroupedSample::new(vec![("a".into(), vec![1.0]), ("b".into(), vec![2.0])]),
            Err(StatsError::InsufficientData(_))
        ));
        assert_eq!(
            one_way_anova(&sample(&[&[1.0, 1.0], &[3.0, 3.0]])).unwrap_err(),
            StatsError::ZeroWithinVariance
        );
    }

    #[test]
    fn effect_labels() {
        assert_eq!(classify_effect_size(0.227), EffectLabel::Large);
        assert_eq!(classify_effect_size(0.104), EffectLabel::Medium);
        assert_eq!(classify_effect_size(0.013), EffectLabel::Small);
        assert_eq!(classify_effect_size(0.004), EffectLabel::Negligible);
        assert_eq!(classify_effect_size(SMALL_EFFECT), EffectLabel::Small);
        assert_eq!(classify_effect_size(MEDIUM_EFFECT), EffectLabel::Medium);
        assert_eq!(classify_effect_size(LARGE_EFFECT), EffectLabel::Large);
        assert_eq!(classify_effect_size(0.0), EffectLabel::Negligible);
        assert_eq!(classify_effect_size(1.0), EffectLabel::Large);
    }

    #[test]
    fn eta_from_f_and_df() {
        // F = 30.562 with within-df 58 gives η² ≈ 0.3451
        let eta: f64 = 30.562 / (30.562 + 58.0);
        assert!((eta - 0.3451).abs() < 5e-5);
        assert_eq!(format!("{eta:.3}"), "0.345");
    }

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(0.0004), "<0.001");
        assert_eq!(format_p(0.0037), "0.004");
        assert_eq!(format_p(0.378), "0.378");
        assert_eq!(format_p(1.0), "1.000");
    }

    fn groups_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 2..12), 2..6)
    }

    proptest! {
        #[test]
        fn eta_f_identity(groups in groups_strategy()) {
            let s = GroupedSample::new(groups.into_iter().enumerate().map(|(i, g)| (i.to_string(), g)).collect()).unwrap();
            if let Ok(r) = one_way_anova(&s) {
                let (d1, d2) = (r.df_between as f64, r.df_within as f64);
                let implied = r.f * d1 / (r.f * d1 + d2);
                prop_assert!((r.eta_sq - implied).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(&r.p));
                prop_assert!((0.0..=1.0).contains(&r.eta_sq));
            }
        }

        #[test]
        fn invariant_under_relabeling_and_permutation(groups in groups_strategy(), seed in any::<u64>()) {
            let labeled: Vec<(String, Vec<f64>)> =
                groups.iter().cloned().enumerate().map(|(i, g)| (i.to_string(), g)).collect();
            let mut shuffled = labeled.clone();
            shuffled.reverse();
            let mut rng = crate::synth::SplitMix64::new(seed);
            for (label, values) in &mut shuffled {
                rng.shuffle(values);
                label.push('x');
            }
            let a = one_way_anova(&GroupedSample::new(labeled).unwrap());
            let b = one_way_anova(&GroupedSample::new(shuffled).unwrap());
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((a.f - b.f).abs() <= 1e-9 * a.f.max(1.0));
                    prop_assert!((a.eta_sq - b.eta_sq).abs() <= 1e-12);
                    prop_assert!((a.p - b.p).abs() <= 1e-9);
                }
                (Err(a), Err(b)) => prop_assert_eq!(a, b),
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
