//! Binary Golay complementary pairs.
//!
//! All arithmetic is exact: correlations are accumulated in `i64` and the
//! complementarity checks compare against exact integers.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::{Error, Result};

/// Largest supported doubling exponent (pair length 2^16).
pub const MAX_EXPONENT: u32 = 16;

/// Aperiodic cross-correlation `sum_n a[n] * b[n + lag]`.
///
/// Works for any integer-valued chips (bipolar or ternary) and sequences of
/// different lengths. Lags with no overlap give 0.
pub fn aperiodic_xcorr(a: &[i8], b: &[i8], lag: isize) -> i64 {
    let (a_start, b_start) = if lag >= 0 {
        (0usize, lag as usize)
    } else {
        (lag.unsigned_abs(), 0usize)
    };
    if a_start >= a.len() || b_start >= b.len() {
        return 0;
    }
    a[a_start..]
        .iter()
        .zip(&b[b_start..])
        .map(|(&x, &y)| i64::from(x) * i64::from(y))
        .sum()
}

/// A non-empty sequence of +1/-1 chips.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipolarSequence(Vec<i8>);

impl BipolarSequence {
    pub fn new(elements: Vec<i8>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((index, &value)) = elements
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 1 && v != -1)
        {
            return Err(Error::InvalidChip { index, value });
        }
        Ok(Self(elements))
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&x| -x).collect())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// `self ⧺ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Self(v)
    }
}

impl Deref for BipolarSequence {
    type Target = [i8];

    fn deref(&self) -> &[i8] {
        &self.0
    }
}

/// Two equal-length bipolar sequences whose aperiodic autocorrelations sum
/// to an impulse of height 2N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GolayPair {
    c: BipolarSequence,
    s: BipolarSequence,
}

impl GolayPair {
    /// Builds a pair and checks it exhaustively.
    pub fn new(c: BipolarSequence, s: BipolarSequence) -> Result<Self> {
        let pair = Self::from_parts(c, s)?;
        let report = verify_complementary(&pair);
        if !report.is_complementary {
            return Err(Error::InvalidParameter {
                name: "pair",
                reason: "sequences are not complementary",
            });
        }
        Ok(pair)
    }

    /// Builds a pair checking only the lengths. Use [`verify_complementary`]
    /// to inspect candidate pairs that may not be complementary.
    pub fn from_parts(c: BipolarSequence, s: BipolarSequence) -> Result<Self> {
        if c.len() != s.len() {
            return Err(Error::LengthMismatch {
                left: c.len(),
                right: s.len(),
            });
        }
        Ok(Self { c, s })
    }

    pub fn c(&self) -> &BipolarSequence {
        &self.c
    }

    pub fn s(&self) -> &BipolarSequence {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn negated(&self) -> Self {
        Self {
            c: self.c.negated(),
            s: self.s.negated(),
        }
    }

    /// Sum of the C and S aperiodic cross-correlations with another pair.
    pub fn cross_sum(&self, other: &GolayPair, lag: isize) -> i64 {
        aperiodic_xcorr(&self.c, &other.c, lag) + aperiodic_xcorr(&self.s, &other.s, lag)
    }
}

/// Golay pair of length 2^k by recursive doubling from `((+1), (+1))`.
///
/// Each step maps `(c, s)` to `(c ⧺ s, c ⧺ -s)`.
pub fn generate_pair(k: u32) -> Result<GolayPair> {
    if k > MAX_EXPONENT {
        return Err(Error::SizeLimit {
            what: "golay exponent",
            value: k as usize,
            max: MAX_EXPONENT as usize,
        });
    }
    let mut c = alloc::vec![1i8];
    let mut s = alloc::vec![1i8];
    for _ in 0..k {
        let mut nc = Vec::with_capacity(2 * c.len());
        nc.extend_from_slice(&c);
        nc.extend_from_slice(&s);
        let mut ns = Vec::with_capacity(2 * c.len());
        ns.extend_from_slice(&c);
        ns.extend(s.iter().map(|&x| -x));
        c = nc;
        s = ns;
    }
    Ok(GolayPair {
        c: BipolarSequence(c),
        s: BipolarSequence(s),
    })
}

/// The mate `(reverse(s), -reverse(c))`.
///
/// Its C/S cross-correlations with `p` sum to zero at every lag.
pub fn mate(p: &GolayPair) -> GolayPair {
    GolayPair {
        c: p.s.reversed(),
        s: p.c.reversed().negated(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplementarityReport {
    pub is_complementary: bool,
    /// Lag of the largest-magnitude sidelobe sum (0 when there is none).
    pub worst_lag: isize,
    pub worst_value: i64,
    /// Autocorrelation sum at lag 0, 2N for any bipolar pair.
    pub peak: i64,
}

/// Exhaustively checks the autocorrelation sums over lags 1..N-1.
///
/// Negative lags mirror the positive ones and are not re-evaluated.
pub fn verify_complementary(p: &GolayPair) -> ComplementarityReport {
    let peak = p.cross_sum(p, 0);
    let mut worst_lag = 0isize;
    let mut worst_value = 0i64;
    for lag in 1..p.len() as isize {
        let v = p.cross_sum(p, lag);
        if v.abs() > worst_value.abs() {
            worst_lag = lag;
            worst_value = v;
        }
    }
    ComplementarityReport {
        is_complementary: worst_value == 0,
        worst_lag,
        worst_value,
        peak,
    }
}
