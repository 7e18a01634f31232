use alloc::vec;
use alloc::vec::Vec;

use super::{design_rrc, IqWaveform, RrcSpec, Stage};
use crate::{Error, Result};

/// Zero-stuffs `chips` by `sps` and filters with the RRC taps.
///
/// The output holds the full convolution, `chips.len() · sps + order`
/// samples, so the peak for chip `k` sits at `k · sps + order / 2`.
pub fn shape(chips: &[i8], spec: &RrcSpec) -> Result<IqWaveform> {
    let taps = design_rrc(spec)?;
    let mut out = vec![0.0; chips.len() * spec.sps + spec.order];
    for (k, &chip) in chips.iter().enumerate() {
        if chip == 0 {
            continue;
        }
        let amp = f64::from(chip);
        let start = k * spec.sps;
        for (o, h) in out[start..start + taps.len()].iter_mut().zip(&taps) {
            *o += amp * h;
        }
    }
    IqWaveform::new(out, spec.sample_rate(), Stage::Baseband)
}

/// The fs/4 carrier `cos(π n / 2)`: 1, 0, -1, 0, ...
pub fn fs4_carrier(n: usize) -> f64 {
    match n % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// Mixes a baseband waveform up to a quarter of its sample rate.
pub fn upconvert_fs4(baseband: &IqWaveform) -> Result<IqWaveform> {
    if baseband.stage != Stage::Baseband {
        return Err(Error::WrongStage {
            expected: "baseband",
            found: baseband.stage.as_str(),
        });
    }
    let samples = baseband
        .samples
        .iter()
        .enumerate()
        .map(|(n, &x)| x * fs4_carrier(n))
        .collect();
    IqWaveform::new(samples, baseband.sample_rate, Stage::If)
}

/// Mixes an IF waveform back to baseband with the carrier aligned to
/// sample `offset` (where the transmitted sample 0 arrives).
///
/// The factor 2 restores the baseband amplitude; the image at fs/2 is left
/// for the following matched filter.
pub fn downconvert_fs4(if_samples: &[f64], offset: usize) -> Vec<f64> {
    if_samples
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            let phase = (n + 4 - offset % 4) % 4;
            2.0 * x * fs4_carrier(phase)
        })
        .collect()
}
