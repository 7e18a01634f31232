//! DAC output spectrum with Nyquist-zone images.
//!
//! The sampled sequence is analysed with an averaged (Welch, Hann window)
//! periodogram over `[0, fs/2]`. A DAC repeats that spectrum around every
//! multiple of `fs`, so the analysis grid above `fs/2` is filled by folding
//! and, when requested, weighted by the zero-order-hold response
//! `|sin(πf/fs) / (πf/fs)|²`.
//!
//! Each complete Nyquist zone `[z·fs/2, (z+1)·fs/2]` carries one image. Its
//! centre is the power centroid of the zone's bins within
//! [`SpectrumConfig::band_threshold_db`] of the zone maximum, taken on the
//! replica spectrum before hold weighting: the hold changes image levels,
//! not where the DAC puts them. The reported level is the band power after
//! weighting.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fft::{fft_in_place, Complex64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    /// Periodogram segment length (power of two); the bin width is
    /// `fs / segment_len`.
    pub segment_len: usize,
    /// Bins more than this far below a zone's maximum are ignored when
    /// locating its image.
    pub band_threshold_db: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            segment_len: 4096,
            band_threshold_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub frequencies: Vec<f64>,
    /// Power per bin, dB (floored at -300 dB).
    pub magnitudes_db: Vec<f64>,
    /// Image centres, ascending, Hz.
    pub peaks: Vec<f64>,
    /// Band power of each image after weighting, dB.
    pub peak_levels_db: Vec<f64>,
    pub zoh_applied: bool,
    pub bin_width: f64,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}

fn to_db(p: f64) -> f64 {
    10.0 * libm::log10(p.max(1e-30))
}

fn welch(samples: &[f64], seg: usize) -> Vec<f64> {
    let window: Vec<f64> = (0..seg)
        .map(|n| 0.5 - 0.5 * libm::cos(2.0 * PI * n as f64 / seg as f64))
        .collect();
    let norm: f64 = window.iter().map(|w| w * w).sum();
    let hop = seg / 2;
    let starts: Vec<usize> = if samples.len() <= seg {
        vec![0]
    } else {
        (0..=(samples.len() - seg) / hop).map(|i| i * hop).collect()
    };
    let mut psd = vec![0.0; seg / 2 + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); seg];
    for &start in &starts {
        for (n, b) in buf.iter_mut().enumerate() {
            let x = samples.get(start + n).copied().unwrap_or(0.0);
            *b = Complex64::new(x * window[n], 0.0);
        }
        fft_in_place(&mut buf, false);
        for (p, b) in psd.iter_mut().zip(&buf) {
            *p += b.norm_sqr() / norm;
        }
    }
    let count = starts.len() as f64;
    psd.iter_mut().for_each(|p| *p /= count);
    psd
}

/// Spectrum of a DAC driven with `samples` at `fs`, analysed up to
/// `analysis_bw`.
pub fn spectrum(
    samples: &[f64],
    fs: f64,
    analysis_bw: f64,
    apply_zoh: bool,
    config: &SpectrumConfig,
) -> Result<SpectrumReport> {
    if samples.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !(fs > 0.0) || !(analysis_bw >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "frequency",
            reason: "must be positive",
        });
    }
    let seg = config.segment_len;
    if seg < 4 || !seg.is_power_of_two() {
        return Err(Error::InvalidParameter {
            name: "segment_len",
            reason: "must be a power of two of at least 4",
        });
    }
    let psd = welch(samples, seg);
    let bin_width = fs / seg as f64;
    let last_bin = libm::floor(analysis_bw / bin_width + 1e-9) as usize;

    // folded replica power, before and after hold weighting
    let raw: Vec<f64> = (0..=last_bin)
        .map(|i| {
            let m = i % seg;
            psd[if m > seg / 2 { seg - m } else { m }]
        })
        .collect();
    let frequencies: Vec<f64> = (0..=last_bin).map(|i| i as f64 * bin_width).collect();
    let weighted: Vec<f64> = if apply_zoh {
        raw.iter()
            .zip(&frequencies)
            .map(|(p, f)| {
                let s = sinc(f / fs);
                p * s * s
            })
            .collect()
    } else {
        raw.clone()
    };

    let half = seg / 2;
    let mut zones: Vec<(usize, usize)> = (0..)
        .map(|z| (z * half, (z + 1) * half))
        .take_while(|&(_, hi)| hi <= last_bin)
        .collect();
    if zones.is_empty() {
        zones.push((0, last_bin));
    }
    let ratio = libm::pow(10.0, -config.band_threshold_db / 10.0);
    let mut peaks = Vec::new();
    let mut peak_levels_db = Vec::new();
    for (lo, hi) in zones {
        let zone_max = raw[lo..=hi].iter().fold(0.0f64, |m, &p| m.max(p));
        if zone_max <= 0.0 {
            continue;
        }
        let floor = zone_max * ratio;
        let (mut sum_p, mut sum_pf, mut band) = (0.0, 0.0, 0.0);
        for i in lo..=hi {
            if raw[i] >= floor {
                sum_p += raw[i];
                sum_pf += raw[i] * frequencies[i];
                band += weighted[i];
            }
        }
        peaks.push(sum_pf / sum_p);
        peak_levels_db.push(to_db(band));
    }

    Ok(SpectrumReport {
        magnitudes_db: weighted.iter().map(|&p| to_db(p)).collect(),
        frequencies,
        peaks,
        peak_levels_db,
        zoh_applied: apply_zoh,
        bin_width,
    })
}
