//! Mono 16-bit PCM RIFF/WAVE reading and writing.
//!
//! Anything other than a single-channel, 16-bit, format-code-1 file is
//! rejected rather than converted, so burst powers stay comparable across
//! recordings.

use std::fs;
use std::path::Path;

use super::{SignalError, Waveform};

const PCM_FORMAT: u16 = 1;
const FULL_SCALE: f64 = 32768.0;

/// Reads a mono 16-bit PCM WAV file and normalizes samples by 1/32768.
pub fn load_waveform(path: impl AsRef<Path>) -> Result<Waveform, SignalError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| SignalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_wav(&bytes, &path.display().to_string())
}

/// Decodes WAV bytes already in memory. `label` becomes the waveform's source path.
pub fn decode_wav(bytes: &[u8], label: &str) -> Result<Waveform, SignalError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(SignalError::NotWav);
    }

    let mut fmt: Option<Fmt> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(SignalError::TruncatedFile("incomplete chunk header".into()));
        }
        let tag = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                SignalError::TruncatedFile(format!(
                    "chunk '{}' declares {size} bytes but file ends early",
                    String::from_utf8_lossy(tag)
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match tag {
            b"fmt " => fmt = Some(Fmt::parse(body)?),
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| SignalError::TruncatedFile("missing fmt chunk".into()))?;
    fmt.check()?;
    let data = data.ok_or_else(|| SignalError::TruncatedFile("missing data chunk".into()))?;
    if data.len() % 2 != 0 {
        return Err(SignalError::TruncatedFile(
            "data chunk holds a partial 16-bit sample".into(),
        ));
    }

    let samples = data
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / FULL_SCALE)
        .collect();
    Waveform::new(samples, fmt.sample_rate, label)
}

/// Writes `wave` as mono 16-bit PCM. Samples are rounded to the nearest
/// multiple of 1/32768 and clipped to the i16 range.
pub fn write_waveform(path: impl AsRef<Path>, wave: &Waveform) -> Result<(), SignalError> {
    let path = path.as_ref();
    fs::write(path, encode_wav(wave)).map_err(|source| SignalError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn encode_wav(wave: &Waveform) -> Vec<u8> {
    let data_len = wave.samples().len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&wave.sample_rate_hz().to_le_bytes());
    out.extend_from_slice(&(wave.sample_rate_hz() * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in wave.samples() {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

/// Nearest 16-bit code for a normalized sample.
pub fn quantize(sample: f64) -> i16 {
    (sample * FULL_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

/// Snaps a normalized sample onto the 16-bit grid, i.e. `quantize(s) / 32768`.
pub fn requantize(sample: f64) -> f64 {
    quantize(sample) as f64 / FULL_SCALE
}

struct Fmt {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

impl Fmt {
    fn parse(body: &[u8]) -> Result<Self, SignalError> {
        if body.len() < 16 {
            return Err(SignalError::TruncatedFile("fmt chunk shorter than 16 bytes".into()));
        }
        let u16_at = |i: usize| u16::from_le_bytes([body[i], body[i + 1]]);
        Ok(Fmt {
            format: u16_at(0),
            channels: u16_at(2),
            sample_rate: u32::from_le_bytes(body[4..8].try_into().unwrap()),
            bits: u16_at(14),
        })
    }

    fn check(&self) -> Result<(), SignalError> {
        if self.format != PCM_FORMAT {
            return Err(SignalError::UnsupportedFormat(format!(
                "format code {} (only PCM = 1 is accepted)",
                self.format
            )));
        }
        if self.channels != 1 {
            return Err(SignalError::UnsupportedFormat(format!(
                "{} channels (only mono is accepted)",
                self.channels
            )));
        }
        if self.bits != 16 {
            return Err(SignalError::UnsupportedFormat(format!(
                "{} bits per sample (only 16 is accepted)",
                self.bits
            )));
        }
        if self.sample_rate == 0 {
            return Err(SignalError::UnsupportedFormat("sample rate of 0 Hz".into()));
        }
        Ok(())
    }
}
