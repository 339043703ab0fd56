use std::fmt::Write as _;

use serde::Serialize;

use super::{descriptive, format_p, one_way_anova, Descriptives, EffectLabel, GroupedSample};
use crate::acoustics::BurstCount;
use crate::gemination::{natural_cmp, Token};
use crate::signal_io::GemType;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportConfig {
    /// p below this is marked significant.
    pub significance: f64,
    /// Adds the N − 1 total degrees of freedom next to (k − 1, N − k).
    pub show_total_df: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { significance: 0.05, show_total_df: false }
    }
}

/// One table cell: a summary, an explicit gap, or a slot that does not
/// apply to the row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Cell {
    Value(Descriptives),
    InsufficientData,
    NotApplicable,
}

impl Cell {
    fn of(values: &[f64]) -> Cell {
        descriptive(values).map_or(Cell::InsufficientData, Cell::Value)
    }

    pub fn mean(&self) -> Option<f64> {
        match self {
            Cell::Value(d) => Some(d.mean),
            _ => None,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Cell::Value(d) => d.n,
            _ => 0,
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Value(d) => format!("{:.2}", d.mean),
            Cell::InsufficientData => "n/a".to_string(),
            Cell::NotApplicable => "-".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Measure {
    Vd,
    Cd,
    C1d,
    C2d,
    Cld,
    Cl1d,
    Cl2d,
    Bd,
    B1d,
    B2d,
    Ratio,
    Power1,
    Power2,
}

const DURATION_MEASURES: [Measure; 10] = [
    Measure::Vd,
    Measure::Cd,
    Measure::C1d,
    Measure::C2d,
    Measure::Cld,
    Measure::Cl1d,
    Measure::Cl2d,
    Measure::Bd,
    Measure::B1d,
    Measure::B2d,
];

impl Measure {
    fn name(self) -> &'static str {
        match self {
            Measure::Vd => "Vd",
            Measure::Cd => "Cd",
            Measure::C1d => "C1d",
            Measure::C2d => "C2d",
            Measure::Cld => "Cld",
            Measure::Cl1d => "Cl1d",
            Measure::Cl2d => "Cl2d",
            Measure::Bd => "Bd",
            Measure::B1d => "B1d",
            Measure::B2d => "B2d",
            Measure::Ratio => "Cd/Vd",
            Measure::Power1 => "P_burst1",
            Measure::Power2 => "P_burst2",
        }
    }

    fn value(self, t: &Token) -> Option<f64> {
        let r = t.record();
        match self {
            Measure::Vd => r.vd(),
            Measure::Cd => Some(r.cd()),
            Measure::C1d => r.c1d(),
            Measure::C2d => r.c2d(),
            Measure::Cld => Some(r.cld()),
            Measure::Cl1d => r.cl1d(),
            Measure::Cl2d => r.cl2d(),
            Measure::Bd => Some(r.bd()),
            Measure::B1d => r.b1d(),
            Measure::B2d => r.b2d(),
            Measure::Ratio => t.ratio(),
            Measure::Power1 => t.burst_powers().first().copied(),
            Measure::Power2 => t.burst_powers().get(1).copied(),
        }
    }

    /// Only present on double-burst tokens.
    fn is_split(self) -> bool {
        matches!(
            self,
            Measure::C1d | Measure::C2d | Measure::Cl1d | Measure::Cl2d | Measure::B1d | Measure::B2d
        )
    }
}

fn values(tokens: &[&Token], m: Measure) -> Vec<f64> {
    tokens.iter().filter_map(|t| m.value(t)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurstCountRow {
    /// Speaker code, or "all" for the totals.
    pub speaker: String,
    pub gem_type: GemType,
    pub single: usize,
    pub double: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DurationGroup {
    Single,
    Double,
    Combined,
}

impl DurationGroup {
    fn as_str(self) -> &'static str {
        match self {
            DurationGroup::Single => "single",
            DurationGroup::Double => "double",
            DurationGroup::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCell {
    pub measure: &'static str,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationRow {
    pub gem_type: GemType,
    pub group: DurationGroup,
    pub n: usize,
    pub cells: Vec<NamedCell>,
}

impl DurationRow {
    pub fn cell(&self, measure: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.measure == measure).map(|c| &c.cell)
    }
}

/// Singleton or pooled-geminate summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRow {
    pub class: &'static str,
    pub n: usize,
    pub vd: Cell,
    pub cd: Cell,
    pub cld: Cell,
    pub bd: Cell,
    /// Mean of per-token Cd/Vd.
    pub ratio_mean: Cell,
    /// Mean Cd over mean Vd.
    pub ratio_of_means: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: &'static str,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AnovaOutcome {
    Computed {
        f: f64,
        df_between: u64,
        df_within: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        df_total: Option<u64>,
        p: f64,
        p_text: String,
        eta_sq: f64,
        effect: EffectLabel,
        significant: bool,
    },
    InsufficientData {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTest {
    pub subset: &'static str,
    pub measure: &'static str,
    pub groups: Vec<GroupSummary>,
    pub outcome: AnovaOutcome,
}

impl AnovaTest {
    pub fn effect(&self) -> Option<EffectLabel> {
        match &self.outcome {
            AnovaOutcome::Computed { effect, .. } => Some(*effect),
            AnovaOutcome::InsufficientData { .. } => None,
        }
    }

    pub fn is_insufficient(&self) -> bool {
        matches!(self.outcome, AnovaOutcome::InsufficientData { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaFamily {
    pub id: &'static str,
    pub title: &'static str,
    pub tests: Vec<AnovaTest>,
}

impl AnovaFamily {
    pub fn all_insufficient(&self) -> bool {
        self.tests.iter().all(AnovaTest::is_insufficient)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub n_tokens: usize,
    pub config: ReportConfig,
    pub burst_counts: Vec<BurstCountRow>,
    pub durations: Vec<DurationRow>,
    pub singleton_vs_geminate: Vec<ClassRow>,
    pub anova: Vec<AnovaFamily>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn family(&self, id: &str) -> Option<&AnovaFamily> {
        self.anova.iter().find(|f| f.id == id)
    }

    pub fn duration_row(&self, gem_type: GemType, group: DurationGroup) -> Option<&DurationRow> {
        self.durations.iter().find(|r| r.gem_type == gem_type && r.group == group)
    }

    pub fn burst_count_row(&self, speaker: &str, gem_type: GemType) -> Option<&BurstCountRow> {
        self.burst_counts.iter().find(|r| r.speaker == speaker && r.gem_type == gem_type)
    }
}

const GEMINATE_TYPES: [GemType; 2] = [GemType::Lexical, GemType::Syntactic];

fn count_rows(tokens: &[&Token]) -> Vec<BurstCountRow> {
    let mut speakers: Vec<&str> = tokens.iter().map(|t| t.meta().speaker.as_str()).collect();
    speakers.sort_by(|a, b| natural_cmp(a, b));
    speakers.dedup();
    let mut types = GEMINATE_TYPES.to_vec();
    if tokens.iter().any(|t| t.gem_type() == GemType::None) {
        types.push(GemType::None);
    }
    let row = |speaker: Option<&str>, gem_type: GemType| {
        let matching: Vec<_> = tokens
            .iter()
            .filter(|t| t.gem_type() == gem_type && speaker.is_none_or(|s| t.meta().speaker == s))
            .collect();
        let double = matching.iter().filter(|t| t.burst_count() == BurstCount::Double).count();
        BurstCountRow {
            speaker: speaker.unwrap_or("all").to_string(),
            gem_type,
            single: matching.len() - double,
            double,
            total: matching.len(),
        }
    };
    let mut rows = Vec::new();
    for s in &speakers {
        rows.extend(types.iter().map(|&g| row(Some(s), g)));
    }
    rows.extend(types.iter().map(|&g| row(None, g)));
    rows
}

fn duration_rows(tokens: &[&Token]) -> Vec<DurationRow> {
    let mut rows = Vec::new();
    for gem_type in GEMINATE_TYPES {
        for group in [DurationGroup::Single, DurationGroup::Double, DurationGroup::Combined] {
            let members: Vec<&Token> = tokens
                .iter()
                .copied()
                .filter(|t| t.gem_type() == gem_type)
                .filter(|t| match group {
                    DurationGroup::Single => t.burst_count() == BurstCount::Single,
                    DurationGroup::Double => t.burst_count() == BurstCount::Double,
                    DurationGroup::Combined => true,
                })
                .collect();
            let cells = DURATION_MEASURES
                .iter()
                .map(|&m| NamedCell {
                    measure: m.name(),
                    cell: if m.is_split() && group != DurationGroup::Double {
                        Cell::NotApplicable
                    } else {
                        Cell::of(&values(&members, m))
                    },
                })
                .collect();
            rows.push(DurationRow { gem_type, group, n: members.len(), cells });
        }
    }
    rows
}

fn class_row(class: &'static str, members: &[&Token]) -> ClassRow {
    let cell = |m| Cell::of(&values(members, m));
    let (vd, cd) = (cell(Measure::Vd), cell(Measure::Cd));
    // Cd over the tokens that also have Vd, so both means cover the same set.
    let with_vd: Vec<&Token> = members.iter().copied().filter(|t| t.record().vd().is_some()).collect();
    let ratio_of_means = match (vd.mean(), Cell::of(&values(&with_vd, Measure::Cd)).mean()) {
        (Some(v), Some(c)) if v > 0.0 => Some(c / v),
        _ => None,
    };
    ClassRow {
        class,
        n: members.len(),
        vd,
        cd,
        cld: cell(Measure::Cld),
        bd: cell(Measure::Bd),
        ratio_mean: cell(Measure::Ratio),
        ratio_of_means,
    }
}

fn run_test(
    subset: &'static str,
    measure: &'static str,
    groups: Vec<(&'static str, Vec<f64>)>,
    config: &ReportConfig,
) -> AnovaTest {
    let summaries = groups.iter().map(|(label, v)| GroupSummary { label, cell: Cell::of(v) }).collect();
    let sample = groups.into_iter().map(|(l, v)| (l.to_string(), v)).collect();
    let outcome = match GroupedSample::new(sample).and_then(|s| one_way_anova(&s)) {
        Ok(r) => AnovaOutcome::Computed {
            f: r.f,
            df_between: r.df_between,
            df_within: r.df_within,
            df_total: config.show_total_df.then(|| r.df_total()),
            p: r.p,
            p_text: format_p(r.p),
            eta_sq: r.eta_sq,
            effect: r.effect_label,
            significant: r.p < config.significance,
        },
        Err(e) => AnovaOutcome::InsufficientData { reason: e.to_string() },
    };
    AnovaTest { subset, measure, groups: summaries, outcome }
}

const SUBSETS: [(&str, Option<GemType>); 3] =
    [("lexical", Some(GemType::Lexical)), ("syntactic", Some(GemType::Syntactic)), ("combined", None)];

fn subset<'a>(tokens: &[&'a Token], gem_type: Option<GemType>) -> Vec<&'a Token> {
    tokens
        .iter()
        .copied()
        .filter(|t| t.gem_type().is_geminate() && gem_type.is_none_or(|g| t.gem_type() == g))
        .collect()
}

fn by_count<'a>(tokens: &[&'a Token], count: BurstCount) -> Vec<&'a Token> {
    tokens.iter().copied().filter(|t| t.burst_count() == count).collect()
}

fn anova_families(tokens: &[&Token], config: &ReportConfig) -> Vec<AnovaFamily> {
    let mut power = Vec::new();
    for (name, g) in SUBSETS {
        let db = by_count(&subset(tokens, g), BurstCount::Double);
        power.push(run_test(
            name,
            "P_burst",
            vec![("first", values(&db, Measure::Power1)), ("second", values(&db, Measure::Power2))],
            config,
        ));
    }

    let mut releases = Vec::new();
    for (name, g) in &SUBSETS[..2] {
        let db = by_count(&subset(tokens, *g), BurstCount::Double);
        for (label, first, second) in [
            ("consonant", Measure::C1d, Measure::C2d),
            ("closure", Measure::Cl1d, Measure::Cl2d),
            ("burst", Measure::B1d, Measure::B2d),
        ] {
            releases.push(run_test(
                name,
                label,
                vec![("first", values(&db, first)), ("second", values(&db, second))],
                config,
            ));
        }
    }

    let mut counts = Vec::new();
    for (name, g) in SUBSETS {
        let members = subset(tokens, g);
        let (sb, db) = (by_count(&members, BurstCount::Single), by_count(&members, BurstCount::Double));
        for m in [Measure::Cd, Measure::Cld, Measure::Bd] {
            counts.push(run_test(
                name,
                m.name(),
                vec![("single", values(&sb, m)), ("double", values(&db, m))],
                config,
            ));
        }
    }

    let lexical = subset(tokens, Some(GemType::Lexical));
    let syntactic = subset(tokens, Some(GemType::Syntactic));
    let types = [Measure::Vd, Measure::Cd, Measure::Ratio]
        .into_iter()
        .map(|m| {
            run_test(
                "geminates",
                m.name(),
                vec![("lexical", values(&lexical, m)), ("syntactic", values(&syntactic, m))],
                config,
            )
        })
        .collect();

    let mut ratio = Vec::new();
    for (name, g) in &SUBSETS[..2] {
        let members = subset(tokens, *g);
        ratio.push(run_test(
            name,
            Measure::Ratio.name(),
            vec![
                ("single", values(&by_count(&members, BurstCount::Single), Measure::Ratio)),
                ("double", values(&by_count(&members, BurstCount::Double), Measure::Ratio)),
            ],
            config,
        ));
    }

    vec![
        AnovaFamily {
            id: "burst_power",
            title: "Burst power, first vs second burst (double-burst geminates)",
            tests: power,
        },
        AnovaFamily {
            id: "release_durations",
            title: "First vs second consonant durations (double-burst geminates)",
            tests: releases,
        },
        AnovaFamily {
            id: "burst_count_durations",
            title: "Single vs double burst durations",
            tests: counts,
        },
        AnovaFamily { id: "gemination_type", title: "Lexical vs syntactic geminates", tests: types },
        AnovaFamily { id: "burst_count_ratio", title: "Single vs double burst Cd/Vd", tests: ratio },
    ]
}

/// Assembles every table from `tokens`. Tokens are ordered by speaker,
/// sentence, repetition and word first, so the output depends only on the
/// token set and its input order among exact metadata ties.
pub fn build_report(tokens: &[Token], config: &ReportConfig) -> Report {
    let mut sorted: Vec<&Token> = tokens.iter().collect();
    sorted.sort_by(|a, b| a.meta().natural_cmp(b.meta()));

    let singletons: Vec<&Token> = sorted.iter().copied().filter(|t| !t.gem_type().is_geminate()).collect();
    let geminates = subset(&sorted, None);

    let mut notes = vec![
        "Degrees of freedom are (k - 1, N - k).".to_string(),
        "Cd/Vd is given both as the mean of per-token ratios and as mean Cd over mean Vd.".to_string(),
        "n/a marks a cell without enough tokens; - marks a slot that does not apply.".to_string(),
        "Split durations (C1d .. B2d) and burst power use double-burst tokens only.".to_string(),
    ];
    if config.show_total_df {
        notes.push("df_total is N - 1, for comparison with tables that report total degrees of freedom.".to_string());
    }
    let missing_vd = sorted.iter().filter(|t| t.record().vd().is_none()).count();
    if missing_vd > 0 {
        notes.push(format!("{missing_vd} token(s) without a preceding vowel are left out of Vd and Cd/Vd."));
    }

    Report {
        n_tokens: sorted.len(),
        config: *config,
        burst_counts: count_rows(&sorted),
        durations: duration_rows(&sorted),
        singleton_vs_geminate: vec![class_row("singleton", &singletons), class_row("geminate", &geminates)],
        anova: anova_families(&sorted, config),
        notes,
    }
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn cell_se(cell: &Cell) -> String {
    match cell {
        Cell::Value(d) if d.se_defined => format!("{:.2}", d.standard_error),
        Cell::Value(_) => "n/a".to_string(),
        _ => String::new(),
    }
}

pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Tokens: {}", report.n_tokens);
    let _ = writeln!(s, "Significance threshold: p < {}", report.config.significance);

    let _ = writeln!(s, "\nBurst counts");
    let _ = writeln!(s, "{:<10} {:<10} {:>7} {:>7} {:>7}", "speaker", "gem_type", "single", "double", "total");
    for r in &report.burst_counts {
        let _ = writeln!(s, "{:<10} {:<10} {:>7} {:>7} {:>7}", r.speaker, r.gem_type.as_str(), r.single, r.double, r.total);
    }

    let _ = writeln!(s, "\nMean durations (ms)");
    let _ = write!(s, "{:<10} {:<9} {:>5}", "gem_type", "group", "n");
    for m in DURATION_MEASURES {
        let _ = write!(s, " {:>8}", m.name());
    }
    s.push('\n');
    for r in &report.durations {
        let _ = write!(s, "{:<10} {:<9} {:>5}", r.gem_type.as_str(), r.group.as_str(), r.n);
        for c in &r.cells {
            let _ = write!(s, " {:>8}", c.cell.text());
        }
        s.push('\n');
    }

    let _ = writeln!(s, "\nSingleton vs geminate (ms)");
    let _ = writeln!(
        s,
        "{:<10} {:>5} {:>8} {:>8} {:>8} {:>8} {:>12} {:>14}",
        "class", "n", "Vd", "Cd", "Cld", "Bd", "mean Cd/Vd", "Cd/Vd of means"
    );
    for r in &report.singleton_vs_geminate {
        let ratio_of_means = r.ratio_of_means.map_or("n/a".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(
            s,
            "{:<10} {:>5} {:>8} {:>8} {:>8} {:>8} {:>12} {:>14}",
            r.class,
            r.n,
            r.vd.text(),
            r.cd.text(),
            r.cld.text(),
            r.bd.text(),
            r.ratio_mean.text(),
            ratio_of_means
        );
    }

    for family in &report.anova {
        let _ = writeln!(s, "\nANOVA: {}", family.title);
        let _ = write!(s, "{:<10} {:<10} {:>10} {:>10}", "subset", "measure", "F", "df");
        if report.config.show_total_df {
            let _ = write!(s, " {:>8}", "df_total");
        }
        let _ = writeln!(s, " {:>7} {:>7} {:<10} significant", "p", "eta2", "effect");
        for t in &family.tests {
            let _ = write!(s, "{:<10} {:<10} ", t.subset, t.measure);
            match &t.outcome {
                AnovaOutcome::Computed { f, df_between, df_within, df_total, p_text, eta_sq, effect, significant, .. } => {
                    let _ = write!(s, "{:>10.3} {:>10}", f, format!("({df_between}, {df_within})"));
                    if let Some(total) = df_total {
                        let _ = write!(s, " {total:>8}");
                    }
                    let _ = writeln!(
                        s,
                        " {:>7} {:>7.3} {:<10} {}",
                        p_text,
                        eta_sq,
                        effect.to_string(),
                        if *significant { "yes" } else { "no" }
                    );
                }
                AnovaOutcome::InsufficientData { reason } => {
                    let _ = writeln!(s, "insufficient data ({reason})");
                }
            }
        }
    }

    let _ = writeln!(s, "\nNotes");
    for n in &report.notes {
        let _ = writeln!(s, "- {n}");
    }
    s
}

/// Plot-ready CSV series as (file name, contents): group means and standard
/// errors behind the burst power, release duration and vowel/consonant
/// duration comparisons.
pub fn series_csv(report: &Report) -> Vec<(&'static str, String)> {
    const HEADER: &str = "subset,measure,group,n,mean,standard_error\n";
    let family_csv = |id: &str| {
        let mut s = HEADER.to_string();
        for t in report.family(id).map(|f| f.tests.as_slice()).unwrap_or_default() {
            for g in &t.groups {
                let mean = g.cell.mean().map_or(String::new(), |m| format!("{m:.6e}"));
                let se = match g.cell {
                    Cell::Value(d) if d.se_defined => format!("{:.6e}", d.standard_error),
                    _ => String::new(),
                };
                let _ = writeln!(s, "{},{},{},{},{},{}", t.subset, t.measure, g.label, g.cell.n(), mean, se);
            }
        }
        s
    };
    let mut durations = HEADER.to_string();
    for r in &report.durations {
        for c in r.cells.iter().filter(|c| c.cell != Cell::NotApplicable) {
            let mean = c.cell.mean().map_or(String::new(), |m| format!("{m:.4}"));
            let _ = writeln!(
                durations,
                "{},{},{},{},{},{}",
                r.gem_type,
                c.measure,
                r.group.as_str(),
                c.cell.n(),
                mean,
                cell_se(&c.cell)
            );
        }
    }
    vec![
        ("burst_power.csv", family_csv("burst_power")),
        ("release_durations.csv", family_csv("release_durations")),
        ("vowel_consonant_durations.csv", durations),
    ]
}

pub const SERIES_FILES: [&str; 3] = ["burst_power.csv", "release_durations.csv", "vowel_consonant_durations.csv"];
