use serde::Serialize;

use super::GeminationError;
use crate::acoustics::{BurstCount, EventKind, EventSequence};
use crate::signal_io::Segment;

/// Closure and burst of one release, in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureBurst {
    pub closure_ms: f64,
    pub burst_ms: f64,
}

impl ClosureBurst {
    pub fn total_ms(&self) -> f64 {
        self.closure_ms + self.burst_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Releases {
    Single(ClosureBurst),
    Double { first: ClosureBurst, second: ClosureBurst },
}

/// Durational parameters of one consonant token.
///
/// Only the leaf durations are stored; every sum is derived from them, so the
/// additivity relations hold by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DurationRecord {
    vd_ms: Option<f64>,
    releases: Releases,
}

fn check_leaf(name: &str, v: f64) -> Result<f64, GeminationError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(GeminationError::InconsistentEvents(format!("{name} = {v} ms is not a non-negative duration")))
    }
}

impl DurationRecord {
    pub fn single(vd_ms: Option<f64>, cld_ms: f64, bd_ms: f64) -> Result<Self, GeminationError> {
        if let Some(v) = vd_ms {
            check_leaf("Vd", v)?;
        }
        Ok(DurationRecord {
            vd_ms,
            releases: Releases::Single(ClosureBurst {
                closure_ms: check_leaf("Cld", cld_ms)?,
                burst_ms: check_leaf("Bd", bd_ms)?,
            }),
        })
    }

    pub fn double(
        vd_ms: Option<f64>,
        cl1d_ms: f64,
        b1d_ms: f64,
        cl2d_ms: f64,
        b2d_ms: f64,
    ) -> Result<Self, GeminationError> {
        if let Some(v) = vd_ms {
            check_leaf("Vd", v)?;
        }
        Ok(DurationRecord {
            vd_ms,
            releases: Releases::Double {
                first: ClosureBurst {
                    closure_ms: check_leaf("Cl1d", cl1d_ms)?,
                    burst_ms: check_leaf("B1d", b1d_ms)?,
                },
                second: ClosureBurst {
                    closure_ms: check_leaf("Cl2d", cl2d_ms)?,
                    burst_ms: check_leaf("B2d", b2d_ms)?,
                },
            },
        })
    }

    pub fn releases(&self) -> &Releases {
        &self.releases
    }

    pub fn burst_count(&self) -> BurstCount {
        match self.releases {
            Releases::Single(_) => BurstCount::Single,
            Releases::Double { .. } => BurstCount::Double,
        }
    }

    pub fn vd(&self) -> Option<f64> {
        self.vd_ms
    }

    pub fn cd(&self) -> f64 {
        match self.releases {
            Releases::Single(r) => r.total_ms(),
            Releases::Double { first, second } => first.total_ms() + second.total_ms(),
        }
    }

    pub fn cld(&self) -> f64 {
        match self.releases {
            Releases::Single(r) => r.closure_ms,
            Releases::Double { first, second } => first.closure_ms + second.closure_ms,
        }
    }

    pub fn bd(&self) -> f64 {
        match self.releases {
            Releases::Single(r) => r.burst_ms,
            Releases::Double { first, second } => first.burst_ms + second.burst_ms,
        }
    }

    fn split(&self) -> Option<(ClosureBurst, ClosureBurst)> {
        match self.releases {
            Releases::Single(_) => None,
            Releases::Double { first, second } => Some((first, second)),
        }
    }

    pub fn c1d(&self) -> Option<f64> {
        self.split().map(|(a, _)| a.total_ms())
    }

    pub fn c2d(&self) -> Option<f64> {
        self.split().map(|(_, b)| b.total_ms())
    }

    pub fn cl1d(&self) -> Option<f64> {
        self.split().map(|(a, _)| a.closure_ms)
    }

    pub fn cl2d(&self) -> Option<f64> {
        self.split().map(|(_, b)| b.closure_ms)
    }

    pub fn b1d(&self) -> Option<f64> {
        self.split().map(|(a, _)| a.burst_ms)
    }

    pub fn b2d(&self) -> Option<f64> {
        self.split().map(|(_, b)| b.burst_ms)
    }

    /// Cd/Vd; absent when there is no preceding vowel or it has zero length.
    pub fn ratio(&self) -> Option<f64> {
        self.vd_ms.filter(|&v| v > 0.0).map(|v| self.cd() / v)
    }
}

fn ms(start_s: f64, end_s: f64) -> f64 {
    (end_s - start_s) * 1000.0
}

pub fn extract_durations(
    events: &EventSequence,
    vowel: Option<&Segment>,
) -> Result<DurationRecord, GeminationError> {
    let evs = events.events();
    let kinds: Vec<EventKind> = evs.iter().map(|e| e.kind).collect();
    let vd = vowel.map(|v| ms(v.start_s, v.end_s));
    use EventKind::{Burst, Closure};
    match kinds.as_slice() {
        [Closure, Burst] => DurationRecord::single(
            vd,
            ms(evs[0].start_s, evs[0].end_s),
            ms(evs[1].start_s, evs[1].end_s),
        ),
        [Closure, Burst, Closure, Burst] => DurationRecord::double(
            vd,
            ms(evs[0].start_s, evs[0].end_s),
            ms(evs[1].start_s, evs[1].end_s),
            ms(evs[2].start_s, evs[2].end_s),
            ms(evs[3].start_s, evs[3].end_s),
        ),
        other => Err(GeminationError::InconsistentEvents(format!(
            "event kinds {other:?} do not alternate closure/burst"
        ))),
    }
}
