//! Closure/burst landmark detection inside a stop consonant.
//!
//! Bursts are found as supra-threshold runs of the short-time energy. The
//! threshold sits `rise_factor` above the quietest stretch of the interval or
//! `rel_floor` below the preceding vowel's peak, whichever is higher. Run
//! edges are then moved to the frame where energy is halfway between the
//! closure floor and the burst level next to the edge, which removes the
//! smearing introduced by the analysis window.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::energy::{short_time_energy, EnergyContour};
use super::power::burst_power;
use super::AcousticsError;
use crate::signal_io::Waveform;
use crate::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub window_s: f64,
    pub hop_s: f64,
    /// Threshold factor over the closure floor.
    pub rise_factor: f64,
    /// Threshold fraction of the vowel's peak frame energy.
    pub rel_floor: f64,
    /// Shortest sub-threshold gap that separates two bursts.
    pub min_gap_s: f64,
    /// Energy must stay below threshold this long to close a burst.
    pub min_offset_s: f64,
    /// Length of the quietest run used for the closure floor.
    pub floor_run_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            window_s: 0.005,
            hop_s: 0.001,
            rise_factor: 10.0,
            rel_floor: 0.001,
            min_gap_s: 0.015,
            min_offset_s: 0.003,
            floor_run_s: 0.020,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("window_s", self.window_s),
            ("hop_s", self.hop_s),
            ("rise_factor", self.rise_factor),
            ("rel_floor", self.rel_floor),
            ("min_gap_s", self.min_gap_s),
            ("min_offset_s", self.min_offset_s),
            ("floor_run_s", self.floor_run_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Closure,
    Burst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticEvent {
    pub kind: EventKind,
    pub start_s: f64,
    pub end_s: f64,
    /// Mean squared amplitude over the event; bursts only.
    pub peak_power: Option<f64>,
}

impl AcousticEvent {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.start_s, self.end_s)
    }
}

/// Alternating closure/burst events tiling the front of a consonant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventSequence {
    events: Vec<AcousticEvent>,
    consonant: Interval,
}

impl EventSequence {
    /// Checks the alternation, containment and burst-count invariants.
    pub fn new(events: Vec<AcousticEvent>, consonant: Interval) -> Result<Self, AcousticsError> {
        let fail = |why: String| Err(AcousticsError::InconsistentEvents(why));
        if !(events.len() == 2 || events.len() == 4) {
            return fail(format!("expected 2 or 4 events, got {}", events.len()));
        }
        for (i, ev) in events.iter().enumerate() {
            let expected = if i % 2 == 0 { EventKind::Closure } else { EventKind::Burst };
            if ev.kind != expected {
                return fail(format!("event {i} is a {:?}, expected {expected:?}", ev.kind));
            }
            if !(ev.start_s < ev.end_s) {
                return fail(format!("event {i} has start {} >= end {}", ev.start_s, ev.end_s));
            }
            if ev.start_s < consonant.start_s - 1e-9 || ev.end_s > consonant.end_s + 1e-9 {
                return fail(format!("event {i} leaves the consonant interval"));
            }
            if ev.kind == EventKind::Burst && !ev.peak_power.is_some_and(|p| p >= 0.0) {
                return fail(format!("burst {i} lacks a non-negative power"));
            }
            if i > 0 && (ev.start_s - events[i - 1].end_s).abs() > 1e-9 {
                return fail(format!("event {i} does not start where event {} ends", i - 1));
            }
        }
        Ok(EventSequence { events, consonant })
    }

    pub fn events(&self) -> &[AcousticEvent] {
        &self.events
    }

    pub fn consonant(&self) -> Interval {
        self.consonant
    }

    pub fn bursts(&self) -> impl Iterator<Item = &AcousticEvent> {
        self.events.iter().filter(|e| e.kind == EventKind::Burst)
    }

    pub fn closures(&self) -> impl Iterator<Item = &AcousticEvent> {
        self.events.iter().filter(|e| e.kind == EventKind::Closure)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BurstCount {
    Single,
    Double,
}

impl BurstCount {
    pub fn as_str(self) -> &'static str {
        match self {
            BurstCount::Single => "single",
            BurstCount::Double => "double",
        }
    }
}

impl fmt::Display for BurstCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BurstCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(BurstCount::Single),
            "double" => Ok(BurstCount::Double),
            other => Err(format!("unknown burst count '{other}'")),
        }
    }
}

pub fn classify_burst_count(events: &EventSequence) -> BurstCount {
    if events.bursts().count() == 2 {
        BurstCount::Double
    } else {
        BurstCount::Single
    }
}

/// Intermediate quantities of one detection, exposed for plotting and tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionTrace {
    pub contour: EnergyContour,
    pub closure_floor: f64,
    pub vowel_peak: f64,
    pub threshold: f64,
}

pub fn detect_acoustic_events(
    wave: &Waveform,
    consonant: Interval,
    vowel: Option<Interval>,
    config: &DetectorConfig,
) -> Result<EventSequence, AcousticsError> {
    detect_with_trace(wave, consonant, vowel, config).map(|(events, _)| events)
}

pub fn detect_with_trace(
    wave: &Waveform,
    consonant: Interval,
    vowel: Option<Interval>,
    config: &DetectorConfig,
) -> Result<(EventSequence, DetectionTrace), AcousticsError> {
    config.validate().map_err(AcousticsError::BadConfig)?;
    let contour = short_time_energy(wave, config.window_s, config.hop_s, consonant)?;
    let vowel_peak = match vowel {
        Some(v) => short_time_energy(wave, config.window_s, config.hop_s, v)?.max(),
        None => 0.0,
    };
    let hop = contour.frame_hop_s();
    let frames = |s: f64| ((s / hop).round() as usize).max(1);

    let energies = contour.energies();
    let floor = closure_floor(energies, frames(config.floor_run_s));
    let threshold = (floor * config.rise_factor).max(vowel_peak * config.rel_floor);
    let trace = DetectionTrace {
        contour: contour.clone(),
        closure_floor: floor,
        vowel_peak,
        threshold,
    };

    let mut runs = supra_runs(energies, threshold);
    bridge(&mut runs, frames(config.min_offset_s));
    // energy present from the first frame is the preceding vowel's decay
    runs.retain(|r| r.0 > 0);
    bridge(&mut runs, frames(config.min_gap_s));

    match runs.len() {
        0 => return Err(AcousticsError::NoBurstFound(consonant)),
        1 | 2 => {}
        _ => {
            let candidates = runs
                .iter()
                .map(|&(on, off)| (contour.time_of(on), contour.time_of(off)))
                .collect();
            return Err(AcousticsError::MoreThanTwoBursts { candidates });
        }
    }

    let last = energies.len() - 1;
    let window_frames = frames(config.window_s);
    let mut edges: Vec<(usize, Option<usize>)> = Vec::with_capacity(runs.len());
    let mut lower = 1;
    for (k, &(on, off)) in runs.iter().enumerate() {
        let onset = refine_onset(energies, on, off, lower, window_frames, floor);
        let upper = runs.get(k + 1).map_or(last, |next| next.0 - 1);
        // a burst still running at the last frame ends with the consonant
        let offset = (off < last)
            .then(|| refine_offset(energies, onset, off, upper, window_frames, floor));
        edges.push((onset, offset));
        lower = offset.map_or(last, |o| o + 1);
    }

    let mut events = Vec::with_capacity(4);
    let mut cursor = consonant.start_s;
    for (onset, offset) in edges {
        let on_s = contour.time_of(onset);
        let off_s = offset.map_or(consonant.end_s, |o| contour.time_of(o));
        events.push(AcousticEvent {
            kind: EventKind::Closure,
            start_s: cursor,
            end_s: on_s,
            peak_power: None,
        });
        let power = burst_power(wave, Interval::new(on_s, off_s))?;
        events.push(AcousticEvent {
            kind: EventKind::Burst,
            start_s: on_s,
            end_s: off_s,
            peak_power: Some(power),
        });
        cursor = off_s;
    }
    Ok((EventSequence::new(events, consonant)?, trace))
}

/// Median energy of the lowest-mean run of `run` consecutive frames.
fn closure_floor(energies: &[f64], run: usize) -> f64 {
    if energies.is_empty() {
        return 0.0;
    }
    let run = run.min(energies.len());
    let mut best_start = 0;
    let mut sum: f64 = energies[..run].iter().sum();
    let mut best = sum;
    for start in 1..=energies.len() - run {
        sum += energies[start + run - 1] - energies[start - 1];
        if sum < best {
            best = sum;
            best_start = start;
        }
    }
    let mut window = energies[best_start..best_start + run].to_vec();
    window.sort_by(f64::total_cmp);
    let mid = window.len() / 2;
    if window.len() % 2 == 1 {
        window[mid]
    } else {
        0.5 * (window[mid - 1] + window[mid])
    }
}

/// Maximal runs `(first, last)` of frames strictly above `threshold`.
fn supra_runs(energies: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &e) in energies.iter().enumerate() {
        match (e > threshold, open) {
            (true, None) => open = Some(i),
            (false, Some(start)) => {
                runs.push((start, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        runs.push((start, energies.len() - 1));
    }
    runs
}

/// Joins neighbouring runs separated by fewer than `min_gap` sub-threshold frames.
fn bridge(runs: &mut Vec<(usize, usize)>, min_gap: usize) {
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for &(on, off) in runs.iter() {
        match merged.last_mut() {
            Some(prev) if on - prev.1 - 1 < min_gap => prev.1 = off,
            _ => merged.push((on, off)),
        }
    }
    *runs = merged;
}

fn half_level(floor: f64, level: f64) -> f64 {
    floor + 0.5 * (level - floor)
}

/// Frame nearest the half-level crossing on the rising edge of run `on..=off`.
fn refine_onset(energies: &[f64], on: usize, off: usize, lower: usize, window: usize, floor: f64) -> usize {
    let to = (on + window).min(off);
    let level = energies[on..=to].iter().copied().fold(0.0, f64::max);
    let half = half_level(floor, level);
    let from = on.saturating_sub(window).max(lower);
    let Some(cross) = (from..=to).find(|&f| energies[f] >= half) else {
        return on;
    };
    if cross > from && (energies[cross - 1] - half).abs() < (energies[cross] - half).abs() {
        cross - 1
    } else {
        cross
    }
}

/// Last frame in `from..=to` at or above `target`, moved one frame later when
/// that frame is nearer the target.
fn last_crossing(energies: &[f64], from: usize, to: usize, target: impl Fn(usize) -> f64) -> Option<usize> {
    let cross = (from..=to).rev().find(|&f| energies[f] >= target(f))?;
    let next_is_nearer = cross < to
        && (energies[cross + 1] - target(cross + 1)).abs() < (energies[cross] - target(cross)).abs();
    Some(if next_is_nearer { cross + 1 } else { cross })
}

/// Least-squares line through `ln(E - floor)` over `frames`, or `None` with
/// fewer than three usable frames.
fn log_trend(energies: &[f64], frames: std::ops::RangeInclusive<usize>, floor: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = frames
        .filter(|&f| energies[f] > floor)
        .map(|f| (f as f64, (energies[f] - floor).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Offset of a burst that starts at `onset` and whose supra-threshold run
/// ends at `off`.
///
/// A first estimate takes half the energy of the last frame lying a full
/// window inside the run. Frames whose windows fall entirely between the
/// onset and that estimate then give the burst's decay trend, and the offset
/// is placed where energy drops to half the trend extrapolated to the same
/// frame.
fn refine_offset(energies: &[f64], onset: usize, off: usize, upper: usize, window: usize, floor: f64) -> usize {
    let to = (off + window).min(upper);
    let level = energies[off.saturating_sub(window).max(onset)];
    let Some(first) = last_crossing(energies, onset + 1, to, |_| half_level(floor, level)) else {
        return off.max(onset + 1);
    };
    let inset = window.div_ceil(2);
    let (a, b) = (onset + inset, first.saturating_sub(inset));
    if b <= a {
        return first;
    }
    let Some((intercept, slope)) = log_trend(energies, a..=b, floor) else {
        return first;
    };
    let trend = |f: usize| floor + (intercept + slope * f as f64).exp();
    last_crossing(energies, onset + 1, to, |f| half_level(floor, trend(f))).unwrap_or(first)
}
