//! Radix-2 FFT and FFT-based real cross-correlation.
//!
//! Kept in-crate because the core has to build without `std`. Twiddles are
//! computed directly per stage from `libm`, so results are bit-reproducible
//! across platforms that share the same libm.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

pub use num_complex::Complex64;

/// In-place FFT. `inverse` computes the unscaled inverse transform.
///
/// Panics if the buffer length is not a power of two.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let angle = sign * 2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * *w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

/// Forward FFT of a real sequence zero-padded to `size`.
pub fn real_spectrum(x: &[f64], size: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for (b, &v) in buf.iter_mut().zip(x) {
        b.re = v;
    }
    fft_in_place(&mut buf, false);
    buf
}

/// `r[L] = Σ_n x[n + L] · y[n]` for every lag in `lags`.
///
/// Lags outside the overlap come out as (numerically) zero.
pub fn cross_correlate(x: &[f64], y: &[f64], lags: RangeInclusive<isize>) -> Vec<f64> {
    if x.is_empty() || y.is_empty() {
        return lags.map(|_| 0.0).collect();
    }
    let size = (x.len() + y.len()).next_power_of_two();
    let fy = real_spectrum(y, size);
    cross_correlate_with(x, &fy, y.len(), lags)
}

/// Like [`cross_correlate`] with the spectrum of `y` precomputed by
/// [`real_spectrum`] at a size of at least `x.len() + y.len()`.
pub fn cross_correlate_with(
    x: &[f64],
    y_spectrum: &[Complex64],
    y_len: usize,
    lags: RangeInclusive<isize>,
) -> Vec<f64> {
    let size = y_spectrum.len();
    assert!(
        size >= x.len() + y_len,
        "spectrum too short for linear correlation"
    );
    let mut fx = real_spectrum(x, size);
    for (a, b) in fx.iter_mut().zip(y_spectrum) {
        *a *= b.conj();
    }
    fft_in_place(&mut fx, true);
    let scale = 1.0 / size as f64;
    lags.map(|lag| {
        let in_range = lag > -(y_len as isize) && lag < x.len() as isize;
        if in_range {
            fx[lag.rem_euclid(size as isize) as usize].re * scale
        } else {
            0.0
        }
    })
    .collect()
}

/// Direct O(N·L) evaluation of [`cross_correlate`].
pub fn cross_correlate_direct(x: &[f64], y: &[f64], lags: RangeInclusive<isize>) -> Vec<f64> {
    lags.map(|lag| {
        y.iter()
            .enumerate()
            .filter_map(|(n, &yv)| {
                let i = n as isize + lag;
                (i >= 0 && (i as usize) < x.len()).then(|| x[i as usize] * yv)
            })
            .sum()
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, &v)| {
                        let a = -2.0 * PI * (k * t) as f64 / n as f64;
                        v * Complex64::new(libm::cos(a), libm::sin(a))
                    })
                    .sum()
            })
            .collect()
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn matches_direct_dft() {
        let mut seed = 7u64;
        for n in [1usize, 2, 8, 64, 256] {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(lcg(&mut seed), lcg(&mut seed)))
                .collect();
            let mut fast = x.clone();
            fft_in_place(&mut fast, false);
            for (a, b) in fast.iter().zip(dft(&x)) {
                assert!((a - b).norm_sqr() < 1e-18 * (n * n) as f64);
            }
            fft_in_place(&mut fast, true);
            for (a, b) in fast.iter().zip(&x) {
                assert!((a / n as f64 - b).norm_sqr() < 1e-24);
            }
        }
    }

    #[test]
    #[should_panic]
    fn rejects_odd_sizes() {
        let mut buf = vec![Complex64::new(0.0, 0.0); 12];
        fft_in_place(&mut buf, false);
    }

    #[test]
    fn correlation_matches_direct() {
        let mut seed = 99u64;
        let x: Vec<f64> = (0..300).map(|_| lcg(&mut seed)).collect();
        let y: Vec<f64> = (0..77).map(|_| lcg(&mut seed)).collect();
        let fast = cross_correlate(&x, &y, -100..=320);
        let slow = cross_correlate_direct(&x, &y, -100..=320);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(cross_correlate(&[], &y, 0..=3).iter().all(|&v| v == 0.0));
    }
}
