use super::AcousticsError;
use crate::signal_io::Waveform;
use crate::Interval;

/// Mean squared amplitude, `(1/N) Σ x_i²`. `None` for an empty slice.
pub fn mean_square(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    Some(samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64)
}

/// Burst power: energy over the interval divided by its sample count.
pub fn burst_power(wave: &Waveform, interval: Interval) -> Result<f64, AcousticsError> {
    let range = wave
        .sample_range(interval.start_s, interval.end_s)
        .ok_or(AcousticsError::IntervalOutOfRange(interval))?;
    mean_square(&wave.samples()[range]).ok_or(AcousticsError::EmptyInterval(interval))
}
