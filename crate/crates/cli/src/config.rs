//! Run configuration: built-in defaults, then a flat `key = value` file,
//! then command-line flags.

use std::path::Path;

use gemination_core::acoustics::DetectorConfig;
use gemination_core::gemination::{MeasureConfig, DEFAULT_RATIO_THRESHOLD};
use gemination_core::signal_io::ValidationConfig;
use gemination_core::stats::ReportConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub detector: DetectorConfig,
    pub ratio_threshold: f64,
    pub significance: f64,
    /// Show N − 1 total degrees of freedom next to (k − 1, N − k).
    pub total_df: bool,
    /// Worker threads for per-file work. 0 uses every available core.
    pub jobs: usize,
    pub seed: u64,
    /// Reject `gem_type` on non-stop phones during validation.
    pub stop_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            detector: DetectorConfig::default(),
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            significance: 0.05,
            total_df: false,
            jobs: 0,
            seed: 1,
            stop_only: false,
        }
    }
}

/// Every key accepted in a config file. Flags use the same names with
/// hyphens.
pub const KEYS: [&str; 13] = [
    "window_s",
    "hop_s",
    "rise_factor",
    "rel_floor",
    "min_gap_s",
    "min_offset_s",
    "floor_run_s",
    "ratio_threshold",
    "significance",
    "total_df",
    "jobs",
    "seed",
    "stop_only",
];

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.replace('-', "_");
        let real = || value.parse::<f64>().map_err(|_| format!("'{value}' is not a number"));
        let whole = || value.parse::<u64>().map_err(|_| format!("'{value}' is not a non-negative integer"));
        let flag = || parse_bool(value).ok_or_else(|| format!("'{value}' is not a boolean"));
        let d = &mut self.detector;
        match key.as_str() {
            "window_s" => d.window_s = real()?,
            "hop_s" => d.hop_s = real()?,
            "rise_factor" => d.rise_factor = real()?,
            "rel_floor" => d.rel_floor = real()?,
            "min_gap_s" => d.min_gap_s = real()?,
            "min_offset_s" => d.min_offset_s = real()?,
            "floor_run_s" => d.floor_run_s = real()?,
            "ratio_threshold" => self.ratio_threshold = real()?,
            "significance" => self.significance = real()?,
            "total_df" => self.total_df = flag()?,
            "jobs" => self.jobs = whole()? as usize,
            "seed" => self.seed = whole()?,
            "stop_only" => self.stop_only = flag()?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Applies a config file's `key = value` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_str(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |m: String| CliError::Data(format!("{origin}:{}: {m}", idx + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| at("expected key = value".into()))?;
            self.set(key.trim(), value.trim()).map_err(at)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_str(&text, &path.display().to_string())
    }

    pub fn check(&self) -> Result<(), CliError> {
        self.detector.validate().map_err(|m| CliError::Data(format!("detector config: {m}")))?;
        if !(self.ratio_threshold.is_finite() && self.ratio_threshold > 0.0) {
            return Err(CliError::Data(format!("ratio_threshold {} must be positive", self.ratio_threshold)));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(CliError::Data(format!("significance {} must lie in (0, 1)", self.significance)));
        }
        Ok(())
    }

    pub fn measure(&self) -> MeasureConfig {
        MeasureConfig { detector: self.detector, ratio_threshold: self.ratio_threshold, ..MeasureConfig::default() }
    }

    pub fn validation(&self) -> ValidationConfig {
        ValidationConfig { stop_only: self.stop_only, ..ValidationConfig::default() }
    }

    pub fn report(&self) -> ReportConfig {
        ReportConfig { significance: self.significance, show_total_df: self.total_df }
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Data(format!("thread pool: {e}")))
    }
}
