use serde::Serialize;

use super::AcousticsError;
use crate::signal_io::Waveform;
use crate::Interval;

/// Windowed short-time energy sampled at a fixed hop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyContour {
    frame_energies: Vec<f64>,
    frame_hop_s: f64,
    frame_len_s: f64,
    origin_s: f64,
}

impl EnergyContour {
    pub fn energies(&self) -> &[f64] {
        &self.frame_energies
    }

    pub fn len(&self) -> usize {
        self.frame_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_energies.is_empty()
    }

    pub fn frame_hop_s(&self) -> f64 {
        self.frame_hop_s
    }

    pub fn frame_len_s(&self) -> f64 {
        self.frame_len_s
    }

    /// Center time of the first frame.
    pub fn origin_s(&self) -> f64 {
        self.origin_s
    }

    pub fn time_of(&self, frame: usize) -> f64 {
        self.origin_s + frame as f64 * self.frame_hop_s
    }

    pub fn max(&self) -> f64 {
        self.frame_energies.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the largest frame energy (first one on ties).
    pub fn argmax(&self) -> Option<usize> {
        self.frame_energies
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, &e)| match best {
                Some((_, b)) if b >= e => best,
                _ => Some((i, e)),
            })
            .map(|(i, _)| i)
    }
}

/// Raised-cosine (Hann-shaped) taper of length `n`, sampled at half-sample
/// offsets so every weight is positive and the taper is symmetric.
pub fn raised_cosine(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let s = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).sin();
            s * s
        })
        .collect()
}

/// Mean of `w²` over the taper: the energy a unit constant signal produces.
pub fn mean_square_gain(window: &[f64]) -> f64 {
    window.iter().map(|w| w * w).sum::<f64>() / window.len() as f64
}

/// Frame energy `(1/N) Σ (w_j x_j)²` with frames centered every hop from the
/// start of `interval` up to (excluding) its end. Samples outside the
/// waveform count as zero.
pub fn short_time_energy(
    wave: &Waveform,
    window_s: f64,
    hop_s: f64,
    interval: Interval,
) -> Result<EnergyContour, AcousticsError> {
    let sr = wave.sample_rate_hz() as f64;
    if !(window_s > 0.0) || !(hop_s > 0.0) {
        return Err(AcousticsError::DegenerateWindow { samples: 0 });
    }
    let win = (window_s * sr).round() as usize;
    if win < 2 {
        return Err(AcousticsError::DegenerateWindow { samples: win });
    }
    let hop = ((hop_s * sr).round() as usize).max(1);
    let range = wave
        .sample_range(interval.start_s, interval.end_s)
        .filter(|r| !r.is_empty())
        .ok_or(AcousticsError::IntervalOutOfRange(interval))?;

    let taper = raised_cosine(win);
    let samples = wave.samples();
    let half = (win / 2) as i64;
    let energies = (range.start..range.end)
        .step_by(hop)
        .map(|center| {
            let first = center as i64 - half;
            let acc: f64 = taper
                .iter()
                .enumerate()
                .filter_map(|(j, w)| {
                    let idx = first + j as i64;
                    (idx >= 0 && (idx as usize) < samples.len()).then(|| {
                        let v = w * samples[idx as usize];
                        v * v
                    })
                })
                .sum();
            acc / win as f64
        })
        .collect();

    Ok(EnergyContour {
        frame_energies: energies,
        frame_hop_s: hop as f64 / sr,
        frame_len_s: win as f64 / sr,
        origin_s: range.start as f64 / sr,
    })
}
