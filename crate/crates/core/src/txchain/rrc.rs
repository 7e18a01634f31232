use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{DEFAULT_CHIP_RATE, DEFAULT_SPS};
use crate::{Error, Result};

/// Root-raised-cosine filter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrcSpec {
    /// Roll-off β in [0, 1].
    pub rolloff: f64,
    /// Samples per chip.
    pub sps: usize,
    /// Filter order; the filter has `order + 1` taps.
    pub order: usize,
    /// Chip rate, Hz.
    pub chip_rate: f64,
}

impl Default for RrcSpec {
    fn default() -> Self {
        Self {
            rolloff: 0.25,
            sps: DEFAULT_SPS,
            order: 32,
            chip_rate: DEFAULT_CHIP_RATE,
        }
    }
}

impl RrcSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::InvalidParameter {
                name: "rolloff",
                reason: "must lie in [0, 1]",
            });
        }
        if self.sps == 0 {
            return Err(Error::InvalidParameter {
                name: "sps",
                reason: "must be at least 1",
            });
        }
        if self.order % 2 != 0 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: "must be even",
            });
        }
        if !(self.chip_rate > 0.0 && self.chip_rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "chip_rate",
                reason: "must be positive",
            });
        }
        Ok(())
    }

    pub fn sample_rate(&self) -> f64 {
        self.chip_rate * self.sps as f64
    }

    /// Delay of the filter peak, in samples.
    pub fn group_delay(&self) -> usize {
        self.order / 2
    }

    pub fn taps(&self) -> usize {
        self.order + 1
    }
}

/// Unnormalized RRC impulse response at `t` chip periods.
///
/// The removable singularities at `t = 0` and `|t| = 1/(4β)` use their
/// analytic limits.
pub fn rrc_value(t: f64, beta: f64) -> f64 {
    const EPS: f64 = 1e-12;
    if t.abs() < EPS {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && (t.abs() - 1.0 / (4.0 * beta)).abs() < EPS {
        let a = PI / (4.0 * beta);
        return beta
            * FRAC_1_SQRT_2
            * ((1.0 + 2.0 / PI) * libm::sin(a) + (1.0 - 2.0 / PI) * libm::cos(a));
    }
    let num = libm::sin(PI * t * (1.0 - beta)) + 4.0 * beta * t * libm::cos(PI * t * (1.0 + beta));
    let den = PI * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
    num / den
}

/// `order + 1` symmetric RRC taps normalized to unit energy.
pub fn design_rrc(spec: &RrcSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let center = spec.order / 2;
    let half: Vec<f64> = (0..=center)
        .map(|i| rrc_value((center - i) as f64 / spec.sps as f64, spec.rolloff))
        .collect();
    // mirror so that tap[i] == tap[order - i] holds bit for bit
    let mut taps: Vec<f64> = half.clone();
    taps.extend(half.iter().rev().skip(1));
    let norm = libm::sqrt(taps.iter().map(|h| h * h).sum::<f64>());
    for h in &mut taps {
        *h /= norm;
    }
    Ok(taps)
}
