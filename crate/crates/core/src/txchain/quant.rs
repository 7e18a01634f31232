use alloc::vec::Vec;

use super::IqWaveform;
use crate::{Error, Result};

/// A Q1.15 sample for a 16-bit DAC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FixedWord16(pub i16);

impl FixedWord16 {
    pub const FULL_SCALE: f64 = 32768.0;

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / Self::FULL_SCALE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantized {
    pub words: Vec<FixedWord16>,
    /// Samples clipped to the 16-bit range.
    pub saturated: usize,
}

/// `round(sample · scale · 32768)` saturated to `[-32768, 32767]`.
///
/// +1.0 at unit scale saturates to 32767; -1.0 encodes exactly as -32768.
pub fn quantize_q15(w: &IqWaveform, scale: f64) -> Result<Quantized> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "scale",
            reason: "must be positive",
        });
    }
    let mut saturated = 0;
    let words = w
        .samples
        .iter()
        .map(|&x| {
            let v = libm::round(x * scale * FixedWord16::FULL_SCALE);
            let clamped = v.clamp(f64::from(i16::MIN), f64::from(i16::MAX));
            if clamped != v {
                saturated += 1;
            }
            FixedWord16(clamped as i16)
        })
        .collect();
    Ok(Quantized { words, saturated })
}

/// Inverse of [`quantize_q15`] up to rounding and saturation.
pub fn dequantize(words: &[FixedWord16], scale: f64) -> Vec<f64> {
    words.iter().map(|w| w.to_f64() / scale).collect()
}
