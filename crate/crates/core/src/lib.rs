//! Acoustic measurement of consonant gemination in VCV tokens: audio and
//! annotation I/O, closure/burst detection, duration extraction, group
//! statistics and a synthetic stimulus generator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod acoustics;
pub mod gemination;
pub mod signal_io;
pub mod stats;
pub mod synth;

/// Half-open time span `[start_s, end_s)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn new(start_s: f64, end_s: f64) -> Self {
        Interval { start_s, end_s }
    }

    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.4}, {:.4}]", self.start_s, self.end_s)
    }
}
