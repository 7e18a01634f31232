//! Digital BPSK transmit chain: chips → zero-stuffing → RRC shaping → fs/4
//! up-conversion → Q1.15 words for a 16-bit DAC.
//!
//! With the default parameters (7.68 MHz chips, 4 samples per chip) the
//! chain runs at 30.72 MHz, the IF sits at 7.68 MHz and the DAC's third
//! image lands at 2 · 30.72 + 7.68 = 69.12 MHz.

mod mem;
mod quant;
mod rrc;
mod shaping;
mod spectrum;

pub use mem::{format_mem_lines, parse_mem_lines};
pub use quant::{dequantize, quantize_q15, FixedWord16, Quantized};
pub use rrc::{design_rrc, rrc_value, RrcSpec};
pub use shaping::{downconvert_fs4, fs4_carrier, shape, upconvert_fs4};
pub use spectrum::{spectrum, SpectrumConfig, SpectrumReport};

use alloc::vec::Vec;

use crate::{Error, Result};

/// Chip rate of the reference configuration, Hz.
pub const DEFAULT_CHIP_RATE: f64 = 7.68e6;
/// Samples per chip of the reference configuration.
pub const DEFAULT_SPS: usize = 4;
/// Transmission bandwidth allowance, Hz.
pub const BANDWIDTH_ALLOWANCE: f64 = 16e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Baseband,
    If,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Baseband => "baseband",
            Stage::If => "if",
        }
    }
}

/// A real-valued sampled signal at one point of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct IqWaveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub stage: Stage,
}

impl IqWaveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64, stage: Stage) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sample_rate",
                reason: "must be positive and finite",
            });
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: "must be finite",
            });
        }
        Ok(Self {
            samples,
            sample_rate,
            stage,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean power per sample.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.energy() / self.samples.len() as f64
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Occupied bandwidth `(1 + β) · chip_rate`, Hz.
pub fn occupied_bandwidth(spec: &RrcSpec) -> f64 {
    (1.0 + spec.rolloff) * spec.chip_rate
}

/// Warns when the occupied bandwidth exceeds the allowance.
pub fn bandwidth_warning(spec: &RrcSpec, allowance_hz: f64) -> Option<alloc::string::String> {
    let bw = occupied_bandwidth(spec);
    (bw > allowance_hz).then(|| {
        alloc::format!(
            "occupied bandwidth {:.3} MHz exceeds the {:.3} MHz allowance",
            bw / 1e6,
            allowance_hz / 1e6
        )
    })
}
