//! Simulated CDM sounding receiver.
//!
//! Both transmitters send their LS code at the same time. Each receive
//! antenna correlates its signal against the pulse-shaped IF reference of
//! each code (a sliding correlator evaluated with FFTs), normalised so that
//! a unit path shows up as 1.0 at its delay. Inside the interference-free
//! window the other code contributes nothing, so every estimate only sees
//! its own transmitter.
//!
//! Paths are extracted by successive cancellation: the strongest sample is
//! taken as a path, the reference autocorrelation scaled by that gain is
//! subtracted, and the search repeats until the residual drops below the
//! detection threshold. This removes the pulse sidelobes that a plain
//! local-maximum search would report as extra paths.

use alloc::vec::Vec;

use crate::channel::{add_awgn, apply_mimo, MimoChannel, NoiseSpec};
use crate::fft::{cross_correlate, cross_correlate_with, real_spectrum};
use crate::lscode::LsCode;
use crate::txchain::{
    dequantize, design_rrc, downconvert_fs4, quantize_q15, shape, upconvert_fs4, IqWaveform,
    RrcSpec,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SounderConfig {
    /// Last CIR lag, in samples.
    pub max_lag: usize,
    /// Paths weaker than this relative to the main path are not reported.
    /// [`estimate_mimo`] measures it against the strongest path at each
    /// receive antenna.
    pub threshold_db: f64,
    /// Upper bound on reported paths per estimate.
    pub max_paths: usize,
}

impl SounderConfig {
    /// Window covering delays below `ifw_chips` chips.
    pub fn for_window(ifw_chips: usize, sps: usize) -> Self {
        Self {
            max_lag: (ifw_chips * sps).saturating_sub(1),
            ..Self::default()
        }
    }
}

impl Default for SounderConfig {
    fn default() -> Self {
        Self {
            max_lag: 4000 * 4 - 1,
            threshold_db: -40.0,
            max_paths: 16,
        }
    }
}

/// A transmitted waveform prepared for correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundingReference {
    samples: Vec<f64>,
    energy: f64,
    /// Normalised autocorrelation over lags `-max_lag..=max_lag`.
    acf: Vec<f64>,
    max_lag: usize,
}

impl SoundingReference {
    pub fn new(samples: Vec<f64>, max_lag: usize) -> Result<Self> {
        let energy: f64 = samples.iter().map(|x| x * x).sum();
        if samples.is_empty() || energy == 0.0 {
            return Err(Error::EmptySequence);
        }
        let reach = max_lag as isize;
        let acf = cross_correlate(&samples, &samples, -reach..=reach)
            .into_iter()
            .map(|v| v / energy)
            .collect();
        Ok(Self {
            samples,
            energy,
            acf,
            max_lag,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    fn acf_at(&self, lag: isize) -> f64 {
        let idx = lag + self.max_lag as isize;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.acf.get(i).copied())
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirPeak {
    /// Delay in samples.
    pub delay: usize,
    /// Estimated path amplitude (sign included).
    pub gain: f64,
    /// Gain relative to the strongest path of the same estimate.
    pub relative_gain: f64,
    /// `20 log10 |relative_gain|`, never above 0 dB.
    pub level_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CirEstimate {
    /// Normalised correlation at lags `0..=max_lag`.
    pub values: Vec<f64>,
    /// Paths sorted by delay.
    pub peaks: Vec<CirPeak>,
    /// Correlation left after cancelling the reported paths.
    pub residual: Vec<f64>,
}

impl CirEstimate {
    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.abs())
    }

    /// Strongest path magnitude, 0 when nothing was detected.
    pub fn main_level(&self) -> f64 {
        self.peaks.iter().fold(0.0f64, |m, p| m.max(p.gain.abs()))
    }

    pub fn residual_max(&self) -> f64 {
        self.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Correlation magnitudes at or below this fraction of the level a unit path
/// carrying all of `rx`'s energy would produce are rounding noise.
const NUMERIC_FLOOR: f64 = 1e-9;

fn extract_paths(
    values: &[f64],
    reference: &SoundingReference,
    config: &SounderConfig,
    floor: f64,
) -> (Vec<CirPeak>, Vec<f64>) {
    let mut residual = values.to_vec();
    let mut found: Vec<(usize, f64)> = Vec::new();
    let mut main = 0.0f64;
    let ratio = libm::pow(10.0, config.threshold_db / 20.0);
    while found.len() < config.max_paths {
        let Some((delay, gain)) = residual
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        else {
            break;
        };
        if gain.abs() <= floor || (main > 0.0 && gain.abs() < main * ratio) {
            break;
        }
        main = main.max(gain.abs());
        for (lag, r) in residual.iter_mut().enumerate() {
            *r -= gain * reference.acf_at(lag as isize - delay as isize);
        }
        found.push((delay, gain));
    }
    let main = found.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let mut peaks: Vec<CirPeak> = found
        .into_iter()
        .map(|(delay, gain)| {
            let relative_gain = gain / main;
            CirPeak {
                delay,
                gain,
                relative_gain,
                level_db: 20.0 * libm::log10(relative_gain.abs()),
            }
        })
        .collect();
    peaks.sort_by_key(|p| p.delay);
    (peaks, residual)
}

/// Sliding correlation of `rx` against one code's reference plus path
/// extraction.
pub fn matched_cir(
    rx: &[f64],
    reference: &SoundingReference,
    config: &SounderConfig,
) -> Result<CirEstimate> {
    if rx.is_empty() {
        return Err(Error::EmptySequence);
    }
    let max_lag = config.max_lag.min(reference.max_lag);
    let size = (rx.len() + reference.samples.len()).next_power_of_two();
    let spectrum = real_spectrum(&reference.samples, size);
    matched_cir_with(rx, reference, &spectrum, max_lag, config)
}

fn correlate(
    rx: &[f64],
    reference: &SoundingReference,
    spectrum: &[crate::fft::Complex64],
    max_lag: usize,
) -> (Vec<f64>, f64) {
    let values: Vec<f64> =
        cross_correlate_with(rx, spectrum, reference.samples.len(), 0..=max_lag as isize)
            .into_iter()
            .map(|v| v / reference.energy)
            .collect();
    let rx_energy: f64 = rx.iter().map(|x| x * x).sum();
    let floor = NUMERIC_FLOOR * libm::sqrt(rx_energy / reference.energy);
    (values, floor)
}

fn matched_cir_with(
    rx: &[f64],
    reference: &SoundingReference,
    spectrum: &[crate::fft::Complex64],
    max_lag: usize,
    config: &SounderConfig,
) -> Result<CirEstimate> {
    let (values, floor) = correlate(rx, reference, spectrum, max_lag);
    let (peaks, residual) = extract_paths(&values, reference, config, floor);
    Ok(CirEstimate {
        values,
        peaks,
        residual,
    })
}

/// `estimates[r][code]` for every receive antenna and code.
pub type CirMatrix = [[CirEstimate; 2]; 2];

pub fn estimate_mimo(
    rx: &[IqWaveform],
    refs: &[SoundingReference],
    config: &SounderConfig,
) -> Result<CirMatrix> {
    if rx.len() != 2 {
        return Err(Error::CountMismatch {
            expected: 2,
            found: rx.len(),
        });
    }
    if refs.len() != 2 {
        return Err(Error::CountMismatch {
            expected: 2,
            found: refs.len(),
        });
    }
    if rx.iter().any(IqWaveform::is_empty) {
        return Err(Error::EmptySequence);
    }
    let longest = rx.iter().map(IqWaveform::len).max().unwrap_or(0);
    let size =
        (longest + refs.iter().map(|r| r.samples.len()).max().unwrap_or(0)).next_power_of_two();
    let spectra = [
        real_spectrum(&refs[0].samples, size),
        real_spectrum(&refs[1].samples, size),
    ];
    let ratio = libm::pow(10.0, config.threshold_db / 20.0);
    let one = |r: usize| -> [CirEstimate; 2] {
        let corr = [0, 1].map(|c| {
            let max_lag = config.max_lag.min(refs[c].max_lag);
            correlate(&rx[r].samples, &refs[c], &spectra[c], max_lag)
        });
        // the threshold follows the strongest path at this antenna, so an
        // estimate holding only leakage from the other code stays empty
        let main = corr
            .iter()
            .flat_map(|(v, _)| v.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut out = corr.into_iter().enumerate().map(|(c, (values, floor))| {
            let (peaks, residual) =
                extract_paths(&values, &refs[c], config, floor.max(main * ratio));
            CirEstimate {
                values,
                peaks,
                residual,
            }
        });
        [
            out.next().expect("two codes"),
            out.next().expect("two codes"),
        ]
    };
    Ok([one(0), one(1)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub sps: usize,
    pub chip_rate: f64,
    /// Interference-free window in chips; delays at or beyond it are flagged.
    pub ifw_chips: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMetric {
    pub rx: usize,
    pub tx: usize,
    pub true_delay: usize,
    pub true_gain: f64,
    pub in_window: bool,
    /// Closest reported delay, if any path was reported.
    pub estimated_delay: Option<usize>,
    pub estimated_gain: Option<f64>,
    pub delay_error: Option<usize>,
    /// `|ĝ - g| / |g|`.
    pub gain_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundingMetrics {
    pub paths: Vec<PathMetric>,
    /// Largest unexplained level per `[rx][tx]` relative to the strongest
    /// path at that receiver, dB (floored at -300).
    pub interference_db: [[f64; 2]; 2],
    /// Main path over the worst interference anywhere, dB.
    pub dynamic_range_db: f64,
    /// Shortest and longest resolvable delay, seconds.
    pub resolvable_delay_s: (f64, f64),
}

impl SoundingMetrics {
    pub fn out_of_window(&self) -> impl Iterator<Item = &PathMetric> {
        self.paths.iter().filter(|p| !p.in_window)
    }

    pub fn all_exact(&self) -> bool {
        self.paths
            .iter()
            .filter(|p| p.in_window)
            .all(|p| p.delay_error == Some(0))
    }

    pub fn worst_gain_error(&self) -> f64 {
        self.paths
            .iter()
            .filter(|p| p.in_window)
            .map(|p| p.gain_error.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn worst_interference_db(&self) -> f64 {
        self.interference_db
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn level_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (20.0 * libm::log10(ratio)).max(-300.0)
    } else {
        -300.0
    }
}

/// Compares estimates against the true channel.
///
/// Reported paths that match no true delay count as interference together
/// with the cancellation residual.
pub fn evaluate(est: &CirMatrix, truth: &MimoChannel, config: &EvalConfig) -> SoundingMetrics {
    let limit = config.ifw_chips * config.sps;
    let mut paths = Vec::new();
    let mut interference_db = [[-300.0; 2]; 2];
    for r in 0..2 {
        let reference_level = est[r]
            .iter()
            .map(CirEstimate::main_level)
            .fold(0.0, f64::max);
        for t in 0..2 {
            let e = &est[r][t];
            let taps = truth.paths(r, t);
            for tap in taps {
                let nearest = e.peaks.iter().min_by_key(|p| p.delay.abs_diff(tap.delay));
                paths.push(PathMetric {
                    rx: r,
                    tx: t,
                    true_delay: tap.delay,
                    true_gain: tap.gain,
                    in_window: tap.delay < limit,
                    estimated_delay: nearest.map(|p| p.delay),
                    estimated_gain: nearest.map(|p| p.gain),
                    delay_error: nearest.map(|p| p.delay.abs_diff(tap.delay)),
                    gain_error: nearest.map(|p| (p.gain - tap.gain).abs() / tap.gain.abs()),
                });
            }
            let spurious = e
                .peaks
                .iter()
                .filter(|p| !taps.iter().any(|tap| tap.delay == p.delay))
                .fold(0.0f64, |m, p| m.max(p.gain.abs()));
            let unexplained = spurious.max(e.residual_max());
            interference_db[r][t] = if reference_level > 0.0 {
                level_db(unexplained / reference_level)
            } else {
                -300.0
            };
        }
    }
    let worst = interference_db
        .iter()
        .flatten()
        .copied()
        .fold(-300.0, f64::max);
    SoundingMetrics {
        paths,
        interference_db,
        dynamic_range_db: -worst,
        resolvable_delay_s: (
            1.0 / config.chip_rate,
            config.ifw_chips as f64 / config.chip_rate,
        ),
    }
}

/// Samples of the BPSK decision variable for every non-gap chip.
///
/// `delay` is the arrival sample of the code (from a CIR peak). The signal
/// is mixed back to baseband with the carrier aligned to that delay,
/// matched-filtered and read at the chip instants. Points are scaled by the
/// chain's filter gain, so a noiseless path of gain `g` lands at `±g`.
pub fn constellation(rx: &[f64], code: &LsCode, spec: &RrcSpec, delay: usize) -> Result<Vec<f64>> {
    if rx.is_empty() {
        return Err(Error::EmptySequence);
    }
    let taps = design_rrc(spec)?;
    let gain = 2.0 * taps.iter().step_by(2).map(|h| h * h).sum::<f64>();
    let bb = downconvert_fs4(rx, delay);
    let filtered = |p: usize| -> f64 {
        taps.iter()
            .enumerate()
            .filter_map(|(i, h)| p.checked_sub(i).and_then(|m| bb.get(m)).map(|x| h * x))
            .sum()
    };
    Ok((0..code.len())
        .filter(|&k| code.is_part_chip(k))
        .map(|k| filtered(delay + k * spec.sps + spec.order) / gain)
        .collect())
}

/// Error vector magnitude of decision points against the chips they carry,
/// relative to the fitted cluster amplitude.
pub fn evm(points: &[f64], chips: &[i8]) -> f64 {
    let n = points.len().min(chips.len());
    if n == 0 {
        return 0.0;
    }
    let amp = points
        .iter()
        .zip(chips)
        .map(|(p, &c)| p * f64::from(c))
        .sum::<f64>()
        / n as f64;
    if amp == 0.0 {
        return f64::INFINITY;
    }
    let err = points
        .iter()
        .zip(chips)
        .map(|(p, &c)| {
            let e = p - amp * f64::from(c);
            e * e
        })
        .sum::<f64>()
        / n as f64;
    libm::sqrt(err) / amp.abs()
}

/// Part chips of a code in transmission order (the symbols a constellation
/// carries).
pub fn part_chips(code: &LsCode) -> Vec<i8> {
    code.chips()
        .iter()
        .enumerate()
        .filter(|&(k, _)| code.is_part_chip(k))
        .map(|(_, &c)| c)
        .collect()
}

/// Transmit-side settings of a sounding run.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundingSetup {
    pub codes: [LsCode; 2],
    pub spec: RrcSpec,
    /// Pass the transmit waveforms through the Q1.15 DAC model.
    pub quantize: bool,
    pub config: SounderConfig,
}

/// Per-run products of [`run_sounding`].
#[derive(Debug, Clone, PartialEq)]
pub struct SoundingRun {
    pub tx: [IqWaveform; 2],
    pub rx: [IqWaveform; 2],
    pub estimates: CirMatrix,
}

impl SoundingSetup {
    /// The IF waveform each antenna transmits (and the receiver's reference).
    pub fn transmit_waveforms(&self) -> Result<[IqWaveform; 2]> {
        let one = |code: &LsCode| -> Result<IqWaveform> {
            let w = upconvert_fs4(&shape(code.chips(), &self.spec)?)?;
            if !self.quantize {
                return Ok(w);
            }
            let scale = q15_scale(&w);
            let q = quantize_q15(&w, scale)?;
            IqWaveform::new(dequantize(&q.words, scale), w.sample_rate, w.stage)
        };
        Ok([one(&self.codes[0])?, one(&self.codes[1])?])
    }

    pub fn references(&self, tx: &[IqWaveform; 2]) -> Result<[SoundingReference; 2]> {
        Ok([
            SoundingReference::new(tx[0].samples.clone(), self.config.max_lag)?,
            SoundingReference::new(tx[1].samples.clone(), self.config.max_lag)?,
        ])
    }
}

/// Scale that maps a waveform's peak just inside Q1.15 full scale.
pub fn q15_scale(w: &IqWaveform) -> f64 {
    let peak = w.peak();
    if peak > 0.0 {
        32767.0 / (32768.0 * peak)
    } else {
        1.0
    }
}

/// Transmit both codes at once through `channel`, add noise per receive
/// antenna (seeds `noise.seed` and `noise.seed + 1`) and estimate the CIRs.
pub fn run_sounding(
    setup: &SoundingSetup,
    channel: &MimoChannel,
    noise: &NoiseSpec,
) -> Result<SoundingRun> {
    let tx = setup.transmit_waveforms()?;
    let refs = setup.references(&tx)?;
    run_with_references(&tx, &refs, channel, noise, &setup.config)
}

/// [`run_sounding`] with precomputed transmit waveforms and references.
pub fn run_with_references(
    tx: &[IqWaveform; 2],
    refs: &[SoundingReference; 2],
    channel: &MimoChannel,
    noise: &NoiseSpec,
    config: &SounderConfig,
) -> Result<SoundingRun> {
    let clean = apply_mimo(channel, tx)?;
    let rx = [
        add_awgn(&clean[0], noise)?,
        add_awgn(
            &clean[1],
            &NoiseSpec {
                seed: noise.seed.wrapping_add(1),
                ..*noise
            },
        )?,
    ];
    let estimates = estimate_mimo(&rx, refs, config)?;
    Ok(SoundingRun {
        tx: tx.clone(),
        rx,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PathTap;
    use crate::golay::generate_pair;
    use crate::lscode::{code_set, expand};
    use crate::txchain::Stage;
    use alloc::vec;

    const K: u32 = 8;
    const GAP: usize = 256;

    fn setup() -> SoundingSetup {
        let tree = expand(&generate_pair(K).unwrap(), 0).unwrap();
        let set = code_set(&tree, 0, GAP, GAP).unwrap();
        let spec = RrcSpec::default();
        SoundingSetup {
            codes: [set.codes[0].clone(), set.codes[1].clone()],
            spec,
            quantize: false,
            config: SounderConfig::for_window(GAP, spec.sps),
        }
    }

    fn eval_config() -> EvalConfig {
        EvalConfig {
            sps: 4,
            chip_rate: 7.68e6,
            ifw_chips: GAP,
        }
    }

    fn channel(entries: &[(usize, usize, usize, f64)]) -> MimoChannel {
        let mut ch = MimoChannel::default();
        for &(r, t, d, g) in entries {
            ch.taps[r][t].push(PathTap::new(d, g).unwrap());
        }
        ch
    }

    #[test]
    fn single_path_is_found_at_its_delay() {
        let s = setup();
        let tx = s.transmit_waveforms().unwrap();
        let refs = s.references(&tx).unwrap();
        let ch = channel(&[(0, 0, 37, 0.8)]);
        let rx = apply_mimo(&ch, &tx).unwrap();
        let est = matched_cir(&rx[0].samples, &refs[0], &s.config).unwrap();
        assert_eq!(est.peaks.len(), 1);
        assert_eq!(est.peaks[0].delay, 37);
        assert!((est.peaks[0].gain - 0.8).abs() < 1e-9);
        assert_eq!(est.peaks[0].level_db, 0.0);
    }

    #[test]
    fn zero_input_has_no_paths() {
        let s = setup();
        let tx = s.transmit_waveforms().unwrap();
        let refs = s.references(&tx).unwrap();
        let est = matched_cir(&vec![0.0; 1000], &refs[0], &s.config).unwrap();
        assert!(est.peaks.is_empty());
        assert!(matched_cir(&[], &refs[0], &s.config).is_err());
        assert!(SoundingReference::new(vec![0.0; 4], 3).is_err());
    }

    #[test]
    fn two_paths_keep_their_ratio() {
        let s = setup();
        let tx = s.transmit_waveforms().unwrap();
        let refs = s.references(&tx).unwrap();
        let ch = channel(&[(0, 0, 10, 1.0), (0, 0, 90, 0.4)]);
        let rx = apply_mimo(&ch, &tx).unwrap();
        let est = matched_cir(&rx[0].samples, &refs[0], &s.config).unwrap();
        let delays: Vec<usize> = est.peaks.iter().map(|p| p.delay).collect();
        assert_eq!(delays, vec![10, 90]);
        assert!((est.peaks[1].relative_gain - 0.4).abs() <= 0.05 * 0.4);
        assert!(est.peaks[1].level_db < 0.0);
    }

    #[test]
    fn identity_channel_has_low_cross_interference() {
        let s = setup();
        let run = run_sounding(&s, &MimoChannel::identity(), &NoiseSpec::NONE).unwrap();
        let m = evaluate(&run.estimates, &MimoChannel::identity(), &eval_config());
        assert!(m.all_exact());
        assert!(
            m.worst_interference_db() <= -50.0,
            "{:?}",
            m.interference_db
        );
        assert!(run.estimates[0][1].peaks.is_empty());
        assert!(run.estimates[1][0].peaks.is_empty());
    }

    #[test]
    fn symmetric_channel_gives_symmetric_estimates() {
        let s = setup();
        let ch = channel(&[
            (0, 0, 5, 1.0),
            (1, 1, 5, 1.0),
            (0, 1, 21, 0.5),
            (1, 0, 21, 0.5),
        ]);
        let run = run_sounding(&s, &ch, &NoiseSpec::NONE).unwrap();
        let e = &run.estimates;
        for (a, b) in [((0, 1), (1, 0)), ((0, 0), (1, 1))] {
            let pa = &e[a.0][a.1].peaks;
            let pb = &e[b.0][b.1].peaks;
            assert_eq!(pa.len(), pb.len());
            for (x, y) in pa.iter().zip(pb) {
                assert_eq!(x.delay, y.delay);
                assert!((x.gain - y.gain).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn simultaneous_matches_sequential() {
        let s = setup();
        let ch = channel(&[
            (0, 0, 3, 0.9),
            (0, 1, 40, -0.6),
            (1, 0, 101, 0.3),
            (1, 1, 7, 1.2),
        ]);
        let tx = s.transmit_waveforms().unwrap();
        let refs = s.references(&tx).unwrap();
        let both = run_with_references(&tx, &refs, &ch, &NoiseSpec::NONE, &s.config).unwrap();
        let silent = IqWaveform::new(vec![0.0; tx[0].len()], tx[0].sample_rate, Stage::If).unwrap();
        for t in 0..2 {
            let mut solo = [silent.clone(), silent.clone()];
            solo[t] = tx[t].clone();
            let rx = apply_mimo(&ch, &solo).unwrap();
            let seq = estimate_mimo(&rx, &refs, &s.config).unwrap();
            for r in 0..2 {
                let a = &both.estimates[r][t].peaks;
                let b = &seq[r][t].peaks;
                assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(b) {
                    assert_eq!(x.delay, y.delay);
                    assert!((x.gain - y.gain).abs() <= 1e-6 * y.gain.abs());
                }
            }
        }
    }

    #[test]
    fn evaluate_flags_out_of_window_delays() {
        let s = setup();
        let ch = channel(&[
            (0, 0, 4, 1.0),
            (1, 1, (GAP - 1) * 4, 0.7),
            (0, 1, GAP * 4 + 8, 0.5),
        ]);
        let run = run_sounding(&s, &ch, &NoiseSpec::NONE).unwrap();
        let m = evaluate(&run.estimates, &ch, &eval_config());
        let short = m.paths.iter().find(|p| p.true_delay == 4).unwrap();
        assert_eq!(short.delay_error, Some(0));
        let long = m
            .paths
            .iter()
            .find(|p| p.true_delay == (GAP - 1) * 4)
            .unwrap();
        assert_eq!(long.delay_error, Some(0));
        assert!(long.gain_error.unwrap() < 0.05);
        let out: Vec<_> = m.out_of_window().collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].true_delay, GAP * 4 + 8);
        let (lo, hi) = m.resolvable_delay_s;
        assert!((lo - 1.0 / 7.68e6).abs() < 1e-15);
        assert!((hi - GAP as f64 / 7.68e6).abs() < 1e-15);
    }

    #[test]
    fn perfect_estimate_scores_zero_error() {
        let s = setup();
        let ch = channel(&[(0, 0, 12, 1.0), (1, 1, 12, 1.0)]);
        let run = run_sounding(&s, &ch, &NoiseSpec::NONE).unwrap();
        let m = evaluate(&run.estimates, &ch, &eval_config());
        for p in &m.paths {
            assert_eq!(p.delay_error, Some(0));
            assert!(p.gain_error.unwrap() < 1e-9);
        }
        assert!(m.dynamic_range_db >= 50.0);
    }

    #[test]
    fn count_mismatch() {
        let s = setup();
        let tx = s.transmit_waveforms().unwrap();
        let refs = s.references(&tx).unwrap();
        assert_eq!(
            estimate_mimo(&tx[..1], &refs, &s.config),
            Err(Error::CountMismatch {
                expected: 2,
                found: 1
            })
        );
        assert!(estimate_mimo(&tx, &refs[..1], &s.config).is_err());
    }

    #[test]
    fn loopback_constellation() {
        let s = setup();
        let tx = s.transmit_waveforms().unwrap();
        let ch = channel(&[(0, 0, 13, 1.0)]);
        let rx = apply_mimo(&ch, &tx).unwrap();
        let pts = constellation(&rx[0].samples, &s.codes[0], &s.spec, 13).unwrap();
        let chips = part_chips(&s.codes[0]);
        assert_eq!(pts.len(), 2 << K);
        assert!(evm(&pts, &chips) < 0.05);

        let zeros = constellation(&vec![0.0; rx[0].len()], &s.codes[0], &s.spec, 13).unwrap();
        assert!(zeros.iter().all(|&p| p == 0.0));
        assert!(constellation(&[], &s.codes[0], &s.spec, 0).is_err());
    }

    #[test]
    fn quantized_chain_still_resolves() {
        let s = SoundingSetup {
            quantize: true,
            ..setup()
        };
        let ch = channel(&[(0, 0, 9, 1.0), (1, 1, 31, 0.5)]);
        let run = run_sounding(&s, &ch, &NoiseSpec::NONE).unwrap();
        let m = evaluate(&run.estimates, &ch, &eval_config());
        assert!(m.all_exact());
        assert!(m.worst_gain_error() < 0.05);
        assert!(m.worst_interference_db() <= -50.0);
    }
}
