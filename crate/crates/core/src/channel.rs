//! 2x2 tapped-delay-line channel on the real IF signal, plus seeded AWGN.
//!
//! Path weights are real: a sign flip is the only phase the real BPSK chain
//! can carry. Delays are whole samples.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::txchain::IqWaveform;
use crate::{Error, Result};

pub const MAX_GAIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTap {
    /// Delay in samples.
    pub delay: usize,
    /// Real amplitude, sign included.
    pub gain: f64,
}

impl PathTap {
    pub fn new(delay: usize, gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain.abs() > MAX_GAIN {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: "|gain| must be <= 10",
            });
        }
        Ok(Self { delay, gain })
    }
}

/// Taps for each (receive, transmit) antenna pair: `taps[r][t]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MimoChannel {
    pub taps: [[Vec<PathTap>; 2]; 2],
}

impl MimoChannel {
    /// Single unit tap on each direct path, nothing across.
    pub fn identity() -> Self {
        let unit = PathTap {
            delay: 0,
            gain: 1.0,
        };
        Self {
            taps: [[vec![unit], vec![]], [vec![], vec![unit]]],
        }
    }

    pub fn max_delay(&self) -> usize {
        self.taps
            .iter()
            .flatten()
            .flatten()
            .map(|t| t.delay)
            .max()
            .unwrap_or(0)
    }

    pub fn paths(&self, rx: usize, tx: usize) -> &[PathTap] {
        &self.taps[rx][tx]
    }
}

/// Sums every delayed, scaled transmit signal at each receive antenna.
///
/// Outputs are `input length + max_delay` samples long.
pub fn apply_mimo(ch: &MimoChannel, tx: &[IqWaveform; 2]) -> Result<[IqWaveform; 2]> {
    if tx[0].sample_rate != tx[1].sample_rate {
        return Err(Error::RateMismatch);
    }
    if tx[0].len() != tx[1].len() {
        return Err(Error::LengthMismatch {
            left: tx[0].len(),
            right: tx[1].len(),
        });
    }
    let out_len = tx[0].len() + ch.max_delay();
    let receive = |r: usize| -> Result<IqWaveform> {
        let mut out = vec![0.0; out_len];
        for (t, wave) in tx.iter().enumerate() {
            for tap in &ch.taps[r][t] {
                for (o, x) in out[tap.delay..].iter_mut().zip(&wave.samples) {
                    *o += tap.gain * x;
                }
            }
        }
        IqWaveform::new(out, tx[0].sample_rate, tx[0].stage)
    };
    Ok([receive(0)?, receive(1)?])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Signal-to-noise ratio against the measured signal power. Infinity
    /// disables the noise.
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        snr_db: f64::INFINITY,
        seed: 0,
    };

    pub fn is_active(&self) -> bool {
        self.snr_db.is_finite()
    }
}

/// Adds white Gaussian noise at `snr_db` below the signal's mean power.
pub fn add_awgn(w: &IqWaveform, noise: &NoiseSpec) -> Result<IqWaveform> {
    if !noise.is_active() {
        return Ok(w.clone());
    }
    let power = w.power();
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let sigma = libm::sqrt(power / libm::pow(10.0, noise.snr_db / 10.0));
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = w
        .samples
        .iter()
        .map(|&x| {
            let n: f64 = StandardNormal.sample(&mut rng);
            x + sigma * n
        })
        .collect();
    IqWaveform::new(samples, w.sample_rate, w.stage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayWarning {
    pub rx: usize,
    pub tx: usize,
    pub delay: usize,
    /// Window limit in samples.
    pub limit: usize,
}

/// Flags every path whose delay reaches the interference-free window
/// (`ifw_chips · sps` samples). Never an error.
pub fn validate_delay_spread(ch: &MimoChannel, ifw_chips: usize, sps: usize) -> Vec<DelayWarning> {
    let limit = ifw_chips * sps;
    let mut out = Vec::new();
    for (rx, row) in ch.taps.iter().enumerate() {
        for (tx, taps) in row.iter().enumerate() {
            for tap in taps.iter().filter(|t| t.delay >= limit) {
                out.push(DelayWarning {
                    rx,
                    tx,
                    delay: tap.delay,
                    limit,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txchain::Stage;

    fn wave(samples: Vec<f64>) -> IqWaveform {
        IqWaveform::new(samples, 30.72e6, Stage::If).unwrap()
    }

    fn ramp(n: usize, k: f64) -> IqWaveform {
        wave((0..n).map(|i| libm::sin(i as f64 * k)).collect())
    }

    fn single(rx: usize, tx: usize, taps: Vec<PathTap>) -> MimoChannel {
        let mut ch = MimoChannel::default();
        ch.taps[rx][tx] = taps;
        ch
    }

    #[test]
    fn identity_passes_through() {
        let tx = [ramp(50, 0.3), ramp(50, 0.7)];
        let rx = apply_mimo(&MimoChannel::identity(), &tx).unwrap();
        assert_eq!(rx[0].samples, tx[0].samples);
        assert_eq!(rx[1].samples, tx[1].samples);
    }

    #[test]
    fn delay_shifts() {
        let tx = [ramp(20, 0.3), ramp(20, 0.7)];
        let ch = single(1, 0, vec![PathTap::new(5, 1.0).unwrap()]);
        let rx = apply_mimo(&ch, &tx).unwrap();
        assert_eq!(rx[1].len(), 25);
        assert!(rx[1].samples[..5].iter().all(|&x| x == 0.0));
        assert_eq!(&rx[1].samples[5..], tx[0].samples.as_slice());
        assert!(rx[0].samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn two_taps_match_direct_sum() {
        let x = ramp(300, 0.11);
        let tx = [x.clone(), ramp(300, 0.5)];
        let ch = single(
            0,
            0,
            vec![
                PathTap::new(0, 1.0).unwrap(),
                PathTap::new(100, 0.5).unwrap(),
            ],
        );
        let rx = apply_mimo(&ch, &tx).unwrap();
        for n in 0..400 {
            let a = x.samples.get(n).copied().unwrap_or(0.0);
            let b = if n >= 100 {
                x.samples.get(n - 100).copied().unwrap_or(0.0)
            } else {
                0.0
            };
            assert_eq!(rx[0].samples[n], a + 0.5 * b);
        }
    }

    #[test]
    fn input_checks() {
        let a = ramp(10, 0.1);
        let b = IqWaveform::new(vec![0.0; 10], 1.0, Stage::If).unwrap();
        assert_eq!(
            apply_mimo(&MimoChannel::identity(), &[a.clone(), b]),
            Err(Error::RateMismatch)
        );
        assert!(matches!(
            apply_mimo(&MimoChannel::identity(), &[a, ramp(11, 0.1)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(PathTap::new(0, 10.5).is_err());
        assert!(PathTap::new(0, f64::NAN).is_err());
        assert!(PathTap::new(0, -10.0).is_ok());
    }

    #[test]
    fn superposition_across_transmitters() {
        let tx = [ramp(200, 0.2), ramp(200, 0.9)];
        let mut ch = MimoChannel::default();
        ch.taps[0][0] = vec![PathTap::new(3, 0.8).unwrap()];
        ch.taps[0][1] = vec![PathTap::new(17, -0.4).unwrap()];
        ch.taps[1][0] = vec![PathTap::new(9, 0.3).unwrap()];
        ch.taps[1][1] = vec![
            PathTap::new(1, 1.1).unwrap(),
            PathTap::new(30, 0.2).unwrap(),
        ];
        let both = apply_mimo(&ch, &tx).unwrap();
        let silent = wave(vec![0.0; 200]);
        let only0 = apply_mimo(&ch, &[tx[0].clone(), silent.clone()]).unwrap();
        let only1 = apply_mimo(&ch, &[silent, tx[1].clone()]).unwrap();
        for r in 0..2 {
            for n in 0..both[r].len() {
                let sum = only0[r].samples[n] + only1[r].samples[n];
                assert!((both[r].samples[n] - sum).abs() <= 1e-12 * sum.abs().max(1.0));
            }
        }
    }

    #[test]
    fn noise_off_and_deterministic() {
        let w = ramp(1000, 0.4);
        assert_eq!(add_awgn(&w, &NoiseSpec::NONE).unwrap(), w);
        let spec = NoiseSpec {
            snr_db: 10.0,
            seed: 42,
        };
        assert_eq!(add_awgn(&w, &spec).unwrap(), add_awgn(&w, &spec).unwrap());
        let other = NoiseSpec { seed: 43, ..spec };
        assert_ne!(add_awgn(&w, &spec).unwrap(), add_awgn(&w, &other).unwrap());
        assert_eq!(add_awgn(&wave(vec![0.0; 4]), &spec), Err(Error::ZeroPower));
    }

    #[test]
    fn noise_power_at_20db() {
        let n = 1_000_000;
        let w = wave(
            (0..n)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        );
        let noisy = add_awgn(
            &w,
            &NoiseSpec {
                snr_db: 20.0,
                seed: 7,
            },
        )
        .unwrap();
        let p: f64 = noisy
            .samples
            .iter()
            .zip(&w.samples)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n as f64;
        assert!((p - 0.01).abs() <= 0.02 * 0.01, "noise power {p}");
    }

    #[test]
    fn delay_spread_warnings() {
        let ch = MimoChannel::identity();
        assert!(validate_delay_spread(&ch, 4000, 4).is_empty());
        let ch = single(0, 1, vec![PathTap::new(16000, 0.5).unwrap()]);
        let w = validate_delay_spread(&ch, 4000, 4);
        assert_eq!(
            w,
            vec![DelayWarning {
                rx: 0,
                tx: 1,
                delay: 16000,
                limit: 16000
            }]
        );
        let ch = single(0, 1, vec![PathTap::new(15999, 0.5).unwrap()]);
        assert!(validate_delay_spread(&ch, 4000, 4).is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linear_in_the_input(
                a in -3.0f64..3.0,
                b in -3.0f64..3.0,
                delays in proptest::collection::vec(0usize..40, 1..4),
                gains in proptest::collection::vec(-2.0f64..2.0, 4),
            ) {
                let x = [ramp(64, 0.37), ramp(64, 1.3)];
                let y = [ramp(64, 0.05), ramp(64, 2.1)];
                let mut ch = MimoChannel::default();
                for (i, d) in delays.iter().enumerate() {
                    ch.taps[i % 2][(i / 2) % 2].push(PathTap::new(*d, gains[i]).unwrap());
                }
                let mix = |p: &IqWaveform, q: &IqWaveform| {
                    wave(p.samples.iter().zip(&q.samples).map(|(u, v)| a * u + b * v).collect())
                };
                let lhs = apply_mimo(&ch, &[mix(&x[0], &y[0]), mix(&x[1], &y[1])]).unwrap();
                let rx = apply_mimo(&ch, &x).unwrap();
                let ry = apply_mimo(&ch, &y).unwrap();
                for r in 0..2 {
                    for n in 0..lhs[r].len() {
                        let rhs = a * rx[r].samples[n] + b * ry[r].samples[n];
                        prop_assert!((lhs[r].samples[n] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * 10.0);
                    }
                }
            }
        }
    }
}
