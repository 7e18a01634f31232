//! Combined C/S correlation of LS codes and interference-free window
//! measurement.
//!
//! Two modes are provided. [`CorrMode::Aperiodic`] correlates the assembled
//! ternary chip sequences (gaps included) without wraparound; inside
//! `|τ| <= gap` this equals the sum of the C-part and S-part aperiodic
//! correlations. [`CorrMode::Periodic`] evaluates
//!
//! ```text
//! R_ij(τ) = Σ_n C_i[n] C_j[(n+τ) mod N] + Σ_n S_i[n] S_j[(n+τ) mod N]
//! ```
//!
//! on the parts alone. All values are exact integers.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::golay::aperiodic_xcorr;
use crate::lscode::{CodeId, LsCode, LsCodeSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CorrMode {
    #[default]
    Aperiodic,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrKind {
    Auto,
    Cross,
}

fn check_parts(a: &LsCode, b: &LsCode) -> Result<()> {
    if a.part_len() != b.part_len() {
        return Err(Error::LengthMismatch {
            left: a.part_len(),
            right: b.part_len(),
        });
    }
    Ok(())
}

fn periodic_xcorr(a: &[i8], b: &[i8], lag: isize) -> i64 {
    let n = a.len();
    let shift = lag.rem_euclid(n as isize) as usize;
    a.iter()
        .enumerate()
        .map(|(i, &x)| i64::from(x) * i64::from(b[(i + shift) % n]))
        .sum()
}

/// Combined correlation of two codes at one lag.
pub fn combined_corr(a: &LsCode, b: &LsCode, lag: isize, mode: CorrMode) -> Result<i64> {
    check_parts(a, b)?;
    Ok(match mode {
        CorrMode::Aperiodic => aperiodic_xcorr(a.chips(), b.chips(), lag),
        CorrMode::Periodic => {
            periodic_xcorr(a.c_part(), b.c_part(), lag)
                + periodic_xcorr(a.s_part(), b.s_part(), lag)
        }
    })
}

/// Aperiodic correlation of the parts alone, ignoring the gap layout.
pub fn parts_corr(a: &LsCode, b: &LsCode, lag: isize) -> Result<i64> {
    check_parts(a, b)?;
    Ok(aperiodic_xcorr(a.c_part(), b.c_part(), lag) + aperiodic_xcorr(a.s_part(), b.s_part(), lag))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationProfile {
    /// First lag of `values`; lags are consecutive.
    pub first_lag: isize,
    pub values: Vec<i64>,
    pub mode: CorrMode,
    pub kind: CorrKind,
    pub ids: (Option<CodeId>, Option<CodeId>),
    /// Part length N of the correlated codes.
    pub part_len: usize,
}

impl CorrelationProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lags(&self) -> impl Iterator<Item = isize> + '_ {
        (0..self.values.len()).map(move |i| self.first_lag + i as isize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (isize, i64)> + '_ {
        self.lags().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, lag: isize) -> Option<i64> {
        let idx = lag.checked_sub(self.first_lag)?;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn last_lag(&self) -> isize {
        self.first_lag + self.values.len() as isize - 1
    }
}

/// Correlation values for every lag in `lags`.
///
/// Aperiodic profiles only visit the nonzero chips of `a`, which halves the
/// work for LS codes; results are identical to calling [`combined_corr`] per
/// lag.
pub fn corr_profile(
    a: &LsCode,
    b: &LsCode,
    lags: RangeInclusive<isize>,
    mode: CorrMode,
) -> Result<CorrelationProfile> {
    check_parts(a, b)?;
    let kind = if a.chips() == b.chips() {
        CorrKind::Auto
    } else {
        CorrKind::Cross
    };
    let first_lag = *lags.start();
    let values = match mode {
        CorrMode::Aperiodic => {
            let support: Vec<(usize, i64)> = a
                .chips()
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i, i64::from(x)))
                .collect();
            let bc = b.chips();
            lags.map(|lag| {
                support
                    .iter()
                    .filter_map(|&(i, x)| {
                        let j = i as isize + lag;
                        (j >= 0 && (j as usize) < bc.len()).then(|| x * i64::from(bc[j as usize]))
                    })
                    .sum()
            })
            .collect()
        }
        CorrMode::Periodic => lags
            .map(|lag| combined_corr(a, b, lag, mode).expect("lengths checked"))
            .collect(),
    };
    Ok(CorrelationProfile {
        first_lag,
        values,
        mode,
        kind,
        ids: (a.id(), b.id()),
        part_len: a.part_len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfwMeasurement {
    /// Largest W such that the profile is exactly zero at every
    /// `0 < |τ| <= W`, capped by the lags examined on both sides.
    pub width: usize,
    /// Peak (2N) over the largest sidelobe magnitude seen anywhere in the
    /// profile at `τ != 0`, in dB. Infinite when every such value is zero.
    pub dynamic_range_db: f64,
}

/// Measures the zero window around τ = 0.
pub fn measure_ifw(profile: &CorrelationProfile) -> IfwMeasurement {
    let pos_reach = profile.last_lag().max(0) as usize;
    let neg_reach = (-profile.first_lag).max(0) as usize;
    let reach = if profile.is_empty() {
        0
    } else {
        pos_reach.min(neg_reach)
    };
    let nonzero = |lag: isize| profile.value_at(lag).is_some_and(|v| v != 0);
    let width = (1..=reach)
        .find(|&w| nonzero(w as isize) || nonzero(-(w as isize)))
        .map_or(reach, |w| w - 1);

    let peak = 2.0 * profile.part_len as f64;
    let worst = profile
        .iter()
        .filter(|&(lag, _)| lag != 0)
        .map(|(_, v)| v.unsigned_abs())
        .max()
        .unwrap_or(0);
    let dynamic_range_db = if worst == 0 {
        f64::INFINITY
    } else {
        20.0 * libm::log10(peak / worst as f64)
    };
    IfwMeasurement {
        width,
        dynamic_range_db,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    /// Indices into the code set.
    pub i: usize,
    pub j: usize,
    pub ids: (Option<CodeId>, Option<CodeId>),
    pub kind: CorrKind,
    /// Value at τ = 0.
    pub zero_lag: i64,
    pub ifw: IfwMeasurement,
    /// Largest |R| at `0 < |τ| <= width` (always 0, kept for reporting).
    pub max_inside: u64,
    /// Largest |R| at `|τ| > width` within the examined range.
    pub max_outside: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub mode: CorrMode,
    pub pairs: Vec<PairReport>,
    /// Smallest window over all pairs.
    pub min_ifw: usize,
}

/// Profiles every unordered pair of the set (autos included) and aggregates
/// the windows.
pub fn correlation_report(
    set: &LsCodeSet,
    lags: RangeInclusive<isize>,
    mode: CorrMode,
) -> Result<CorrelationReport> {
    if set.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut pairs = Vec::new();
    for (i, a) in set.codes.iter().enumerate() {
        for (j, b) in set.codes.iter().enumerate().skip(i) {
            let profile = corr_profile(a, b, lags.clone(), mode)?;
            let ifw = measure_ifw(&profile);
            let w = ifw.width as isize;
            let (mut max_inside, mut max_outside) = (0u64, 0u64);
            for (lag, v) in profile.iter().filter(|&(lag, _)| lag != 0) {
                let slot = if lag.abs() <= w {
                    &mut max_inside
                } else {
                    &mut max_outside
                };
                *slot = (*slot).max(v.unsigned_abs());
            }
            pairs.push(PairReport {
                i,
                j,
                ids: profile.ids,
                kind: if i == j {
                    CorrKind::Auto
                } else {
                    CorrKind::Cross
                },
                zero_lag: profile.value_at(0).unwrap_or(0),
                ifw,
                max_inside,
                max_outside,
            });
        }
    }
    let min_ifw = pairs.iter().map(|p| p.ifw.width).min().unwrap_or(0);
    Ok(CorrelationReport {
        mode,
        pairs,
        min_ifw,
    })
}
