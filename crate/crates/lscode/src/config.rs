//! Run configuration.
//!
//! Every key is optional; an empty file gives the defaults below.
//!
//! | key            | default    | meaning                                        |
//! |----------------|------------|------------------------------------------------|
//! | `k`            | 12         | seed exponent, Golay parts of length 2^k       |
//! | `depth`        | 0          | tree depth; codes are taken from this layer    |
//! | `gap`          | 4000       | zero chips between C and S                     |
//! | `trailing_gap` | `gap`      | zero chips after S                             |
//! | `rolloff`      | 0.25       | RRC roll-off                                   |
//! | `sps`          | 4          | samples per chip                               |
//! | `order`        | 32         | RRC order (taps = order + 1)                   |
//! | `chip_rate`    | 7680000    | chips per second                               |
//! | `channel`      | identity   | channel file, relative to the config file      |
//! | `snr_db`       | inf        | receiver SNR per antenna                       |
//! | `seed`         | 1          | noise seed                                     |
//! | `quantize`     | true       | send the Q1.15 DAC waveform                    |
//! | `threshold_db` | -40        | path detection threshold                       |
//! | `max_paths`    | 16         | paths reported per CIR                         |
//! | `mode`         | aperiodic  | `aperiodic` or `periodic` correlation          |
//! | `stage`        | if         | waveform export point, `if` or `baseband`      |
//! | `mem_source`   | chips      | `.mem` content, `chips` or `waveform`          |
//! | `output`       | none       | output directory when `-o` is not given        |
//!
//! Keys containing a `.` are skipped. Manifests use them for derived values,
//! so a run directory's `manifest.txt` loads as a config.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use lscode_core::channel::NoiseSpec;
use lscode_core::correlation::CorrMode;
use lscode_core::golay::MAX_EXPONENT;
use lscode_core::lscode::{MAX_DEPTH, MAX_SUBCODE_LEN};
use lscode_core::sounder::SounderConfig;
use lscode_core::txchain::{RrcSpec, Stage, DEFAULT_CHIP_RATE, DEFAULT_SPS};

use crate::error::{CliError, CliResult, ConfigError};
use crate::kv;

/// Largest gap accepted, in chips.
pub const MAX_GAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MemSource {
    /// The code chips themselves (0, ±1 in Q1.15).
    #[default]
    Chips,
    /// The quantized transmit waveform.
    Waveform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: u32,
    pub depth: usize,
    pub gap: usize,
    pub trailing_gap: Option<usize>,
    pub rolloff: f64,
    pub sps: usize,
    pub order: usize,
    pub chip_rate: f64,
    pub channel: Option<PathBuf>,
    pub snr_db: f64,
    pub seed: u64,
    pub quantize: bool,
    pub threshold_db: f64,
    pub max_paths: usize,
    pub mode: CorrMode,
    pub stage: Stage,
    pub mem_source: MemSource,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 12,
            depth: 0,
            gap: 4000,
            trailing_gap: None,
            rolloff: 0.25,
            sps: DEFAULT_SPS,
            order: 32,
            chip_rate: DEFAULT_CHIP_RATE,
            channel: None,
            snr_db: f64::INFINITY,
            seed: 1,
            quantize: true,
            threshold_db: -40.0,
            max_paths: 16,
            mode: CorrMode::Aperiodic,
            stage: Stage::If,
            mem_source: MemSource::Chips,
            output: None,
        }
    }
}

fn value<T: FromStr>(field: &'static str, raw: &str, expected: &str) -> Result<T, ConfigError> {
    raw.parse()
        .map_err(|_| ConfigError::invalid(field, format!("expected {expected}, got `{raw}`")))
}

fn boolean(field: &'static str, raw: &str) -> Result<bool, ConfigError> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::invalid(
            field,
            format!("expected true or false, got `{raw}`"),
        )),
    }
}

pub fn parse_mode(raw: &str) -> Option<CorrMode> {
    match raw {
        "aperiodic" => Some(CorrMode::Aperiodic),
        "periodic" => Some(CorrMode::Periodic),
        _ => None,
    }
}

pub fn mode_name(mode: CorrMode) -> &'static str {
    match mode {
        CorrMode::Aperiodic => "aperiodic",
        CorrMode::Periodic => "periodic",
    }
}

pub fn parse_stage(raw: &str) -> Option<Stage> {
    match raw {
        "if" => Some(Stage::If),
        "baseband" => Some(Stage::Baseband),
        _ => None,
    }
}

const NON_NEGATIVE: &str = "a non-negative integer";

impl RunConfig {
    /// Keys accepted in config files.
    pub const KEYS: [&'static str; 18] = [
        "k",
        "depth",
        "gap",
        "trailing_gap",
        "rolloff",
        "sps",
        "order",
        "chip_rate",
        "channel",
        "snr_db",
        "seed",
        "quantize",
        "threshold_db",
        "max_paths",
        "mode",
        "stage",
        "mem_source",
        "output",
    ];

    /// Sets one key. Unknown keys are reported as `None`.
    pub fn set(&mut self, key: &str, raw: &str) -> Option<Result<(), ConfigError>> {
        let r = match key {
            "k" => value("k", raw, NON_NEGATIVE).map(|v| self.k = v),
            "depth" => value("depth", raw, NON_NEGATIVE).map(|v| self.depth = v),
            "gap" => value("gap", raw, NON_NEGATIVE).map(|v| self.gap = v),
            "trailing_gap" => {
                value("trailing_gap", raw, NON_NEGATIVE).map(|v| self.trailing_gap = Some(v))
            }
            "rolloff" => value("rolloff", raw, "a number").map(|v| self.rolloff = v),
            "sps" => value("sps", raw, "a positive integer").map(|v| self.sps = v),
            "order" => value("order", raw, "an even integer").map(|v| self.order = v),
            "chip_rate" => value("chip_rate", raw, "a frequency in Hz").map(|v| self.chip_rate = v),
            "channel" => {
                self.channel = Some(PathBuf::from(raw));
                Ok(())
            }
            "snr_db" => value("snr_db", raw, "a number or inf").map(|v| self.snr_db = v),
            "seed" => value("seed", raw, "an unsigned 64-bit integer").map(|v| self.seed = v),
            "quantize" => boolean("quantize", raw).map(|v| self.quantize = v),
            "threshold_db" => value("threshold_db", raw, "a number").map(|v| self.threshold_db = v),
            "max_paths" => {
                value("max_paths", raw, "a positive integer").map(|v| self.max_paths = v)
            }
            "mode" => parse_mode(raw)
                .map(|m| self.mode = m)
                .ok_or_else(|| ConfigError::invalid("mode", "expected aperiodic or periodic")),
            "stage" => parse_stage(raw)
                .map(|s| self.stage = s)
                .ok_or_else(|| ConfigError::invalid("stage", "expected if or baseband")),
            "mem_source" => match raw {
                "chips" => {
                    self.mem_source = MemSource::Chips;
                    Ok(())
                }
                "waveform" => {
                    self.mem_source = MemSource::Waveform;
                    Ok(())
                }
                _ => Err(ConfigError::invalid(
                    "mem_source",
                    "expected chips or waveform",
                )),
            },
            "output" => {
                self.output = Some(PathBuf::from(raw));
                Ok(())
            }
            _ => return None,
        };
        Some(r)
    }

    pub fn trailing_gap(&self) -> usize {
        self.trailing_gap.unwrap_or(self.gap)
    }

    pub fn rrc(&self) -> RrcSpec {
        RrcSpec {
            rolloff: self.rolloff,
            sps: self.sps,
            order: self.order,
            chip_rate: self.chip_rate,
        }
    }

    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            snr_db: self.snr_db,
            seed: self.seed,
        }
    }

    pub fn sounder(&self, ifw_chips: usize) -> SounderConfig {
        SounderConfig {
            threshold_db: self.threshold_db,
            max_paths: self.max_paths,
            ..SounderConfig::for_window(ifw_chips, self.sps)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k > MAX_EXPONENT {
            return Err(ConfigError::invalid(
                "k",
                format!("must be at most {MAX_EXPONENT}"),
            ));
        }
        if self.depth > MAX_DEPTH {
            return Err(ConfigError::invalid(
                "depth",
                format!("must be at most {MAX_DEPTH}"),
            ));
        }
        if (1usize << self.k) << self.depth > MAX_SUBCODE_LEN {
            return Err(ConfigError::invalid(
                "depth",
                format!("2^(k + depth) must not exceed {MAX_SUBCODE_LEN}"),
            ));
        }
        if self.gap > MAX_GAP {
            return Err(ConfigError::invalid(
                "gap",
                format!("must be at most {MAX_GAP}"),
            ));
        }
        if self.trailing_gap() > MAX_GAP {
            return Err(ConfigError::invalid(
                "trailing_gap",
                format!("must be at most {MAX_GAP}"),
            ));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(ConfigError::invalid("rolloff", "must lie in [0, 1]"));
        }
        if !(1..=64).contains(&self.sps) {
            return Err(ConfigError::invalid("sps", "must lie in 1..=64"));
        }
        if self.order % 2 != 0 || self.order > 4096 {
            return Err(ConfigError::invalid(
                "order",
                "must be even and at most 4096",
            ));
        }
        if !(self.chip_rate.is_finite() && self.chip_rate > 0.0) {
            return Err(ConfigError::invalid("chip_rate", "must be positive"));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(ConfigError::invalid("snr_db", "must be a number or inf"));
        }
        if !(self.threshold_db.is_finite() && self.threshold_db <= 0.0) {
            return Err(ConfigError::invalid(
                "threshold_db",
                "must be finite and at most 0",
            ));
        }
        if self.max_paths == 0 {
            return Err(ConfigError::invalid("max_paths", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical text form. Parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let mut w = kv::Writer::new();
        self.write_entries(&mut w);
        w.finish()
    }

    pub fn write_entries(&self, w: &mut kv::Writer) {
        w.entry("k", self.k)
            .entry("depth", self.depth)
            .entry("gap", self.gap)
            .entry("trailing_gap", self.trailing_gap())
            .entry("rolloff", self.rolloff)
            .entry("sps", self.sps)
            .entry("order", self.order)
            .entry("chip_rate", self.chip_rate);
        if let Some(ch) = &self.channel {
            w.entry("channel", ch.display());
        }
        w.entry("snr_db", self.snr_db)
            .entry("seed", self.seed)
            .entry("quantize", self.quantize)
            .entry("threshold_db", self.threshold_db)
            .entry("max_paths", self.max_paths)
            .entry("mode", mode_name(self.mode))
            .entry("stage", self.stage.as_str())
            .entry(
                "mem_source",
                match self.mem_source {
                    MemSource::Chips => "chips",
                    MemSource::Waveform => "waveform",
                },
            );
    }
}

/// Parses config text without touching the file system.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries =
        kv::parse(text).map_err(|(line, message)| ConfigError::Syntax { line, message })?;
    let mut cfg = RunConfig::default();
    for e in entries.iter().filter(|e| !e.key.contains('.')) {
        match cfg.set(&e.key, &e.value) {
            Some(r) => r?,
            None => {
                return Err(ConfigError::Syntax {
                    line: e.line,
                    message: format!("unknown key `{}`", e.key),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file. A relative `channel` path is resolved
/// against the config file's directory and must exist.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut cfg = parse_config(&text)?;
    if let Some(ch) = cfg.channel.take() {
        let resolved = match path.parent() {
            Some(dir) if ch.is_relative() => dir.join(ch),
            _ => ch,
        };
        if !resolved.is_file() {
            return Err(ConfigError::MissingFile {
                field: "channel",
                path: resolved,
            }
            .into());
        }
        cfg.channel = Some(resolved);
    }
    Ok(cfg)
}
