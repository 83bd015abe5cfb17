//! IQ capture files: interleaved 32-bit float I/Q pairs with a small header.
//!
//! Layout (all little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "WVCLIQ1\0"
//! 8       2     version (u16, currently 1)
//! 10      8     sample_rate_hz (f64)
//! 18      8     sample_count (u64)
//! 26      8·n   payload: f32 I, f32 Q per sample
//! ```

use crate::error::{Error, Result};
use crate::waveform::ComplexFrame;
use num_complex::Complex64;
use std::path::Path;

pub const CAPTURE_MAGIC: [u8; 8] = *b"WVCLIQ1\0";
pub const CAPTURE_VERSION: u16 = 1;

/// Serializes the frame to a capture file. Samples are narrowed to f32.
pub fn write_capture(path: &Path, frame: &ComplexFrame) -> Result<()> {
    let mut bytes = Vec::with_capacity(26 + 8 * frame.len());
    bytes.extend_from_slice(&CAPTURE_MAGIC);
    bytes.extend_from_slice(&CAPTURE_VERSION.to_le_bytes());
    bytes.extend_from_slice(&frame.sample_rate_hz().to_le_bytes());
    bytes.extend_from_slice(&(frame.len() as u64).to_le_bytes());
    for s in frame.samples() {
        bytes.extend_from_slice(&(s.re as f32).to_le_bytes());
        bytes.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads and validates a capture file.
pub fn read_capture(path: &Path) -> Result<ComplexFrame> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 26 {
        return Err(Error::Format(format!(
            "capture {} shorter than its header",
            path.display()
        )));
    }
    if bytes[..8] != CAPTURE_MAGIC {
        return Err(Error::Format(format!(
            "capture {} has wrong magic",
            path.display()
        )));
    }
    let version = u16::from_le_bytes(bytes[8..10].try_into().unwrap());
    if version != CAPTURE_VERSION {
        return Err(Error::Format(format!(
            "capture {} has unsupported version {version}",
            path.display()
        )));
    }
    let sample_rate_hz = f64::from_le_bytes(bytes[10..18].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[18..26].try_into().unwrap()) as usize;
    let payload = &bytes[26..];
    if payload.len() != 8 * count {
        return Err(Error::Format(format!(
            "capture {} payload is {} bytes, expected {}",
            path.display(),
            payload.len(),
            8 * count
        )));
    }
    let mut samples = Vec::with_capacity(count);
    for pair in payload.chunks_exact(8) {
        let re = f32::from_le_bytes(pair[..4].try_into().unwrap());
        let im = f32::from_le_bytes(pair[4..].try_into().unwrap());
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Format(format!(
                "capture {} contains non-finite samples",
                path.display()
            )));
        }
        samples.push(Complex64::new(re as f64, im as f64));
    }
    if samples.is_empty() {
        return Err(Error::Format(format!(
            "capture {} contains no samples",
            path.display()
        )));
    }
    ComplexFrame::new(samples, sample_rate_hz)
}
