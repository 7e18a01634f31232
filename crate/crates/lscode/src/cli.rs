//! Command-line front end.
//!
//! Exit status: 0 success, 2 usage, 3 invalid config, 4 I/O, 5 malformed
//! input artifact, 6 computation failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lscode_core::channel::{validate_delay_spread, MimoChannel};
use lscode_core::correlation::{corr_profile, measure_ifw};
use lscode_core::golay::generate_pair;
use lscode_core::lscode::{code_set, expand, predicted_ifw, LsCode, LsCodeSet};
use lscode_core::sounder::{
    constellation, evaluate, evm, part_chips, q15_scale, run_sounding, EvalConfig, SoundingSetup,
};
use lscode_core::txchain::{
    bandwidth_warning, occupied_bandwidth, quantize_q15, shape, spectrum, upconvert_fs4,
    IqWaveform, Quantized, SpectrumConfig, Stage, BANDWIDTH_ALLOWANCE,
};

use crate::config::{load_config, mode_name, parse_config, MemSource, RunConfig};
use crate::error::{CliError, CliResult, ConfigError};
use crate::formats::{self, KvFile};
use crate::kv;

#[derive(Parser, Debug)]
#[command(
    name = "lscode",
    version,
    about = "LS code generation, analysis and 2x2 sounding simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Config file plus per-key overrides. Overrides go through the same
/// validation as config files.
#[derive(Args, Debug, Default, Clone)]
pub struct ConfigArgs {
    /// Run configuration (`key = value` lines)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed exponent; Golay parts have 2^k chips
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub depth: Option<String>,
    /// Zero chips between C and S
    #[arg(long, allow_hyphen_values = true)]
    pub gap: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub trailing_gap: Option<String>,
    #[arg(long)]
    pub rolloff: Option<String>,
    #[arg(long)]
    pub sps: Option<String>,
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long)]
    pub chip_rate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Channel file (`rx tx delay_samples gain` per line)
    #[arg(long)]
    pub channel: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the code set of one tree layer plus a manifest
    Gen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Correlation profile of one code pair as CSV
    Corr {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Code directory written by `gen` (default: generate from config)
        #[arg(long)]
        codes: Option<PathBuf>,
        /// Profile covers lags -LAGS..=LAGS (default: whole code)
        #[arg(long)]
        lags: Option<usize>,
        /// `aperiodic` or `periodic`
        #[arg(long)]
        mode: Option<String>,
        /// Code indices `i,j` (default: 0,1)
        #[arg(long)]
        pair: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Raw 16-bit waveform files, one per code
    Wave {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        codes: Option<PathBuf>,
        /// `if` or `baseband`
        #[arg(long)]
        stage: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// ROM initialisation files, one per code
    Mem {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        codes: Option<PathBuf>,
        /// `chips` or `waveform`
        #[arg(long)]
        source: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// DAC output spectrum with images
    Spectrum {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        codes: Option<PathBuf>,
        /// Analysis bandwidth in Hz
        #[arg(long, default_value_t = 80e6)]
        bandwidth: f64,
        /// Skip the zero-order-hold weighting
        #[arg(long)]
        no_zoh: bool,
        /// Welch segment length
        #[arg(long, default_value_t = 4096)]
        segment: usize,
        /// Code index
        #[arg(long, default_value_t = 0)]
        tx: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// End-to-end 2x2 sounding run
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// BPSK decision points of one transmitter at one receiver
    Constellation {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        tx: usize,
        /// Receive antenna (default: same index as `--tx`)
        #[arg(long)]
        rx: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarise a `simulate` run directory
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

/// Text for stdout plus warnings for stderr.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => parse_config("")?,
        };
        let overrides = [
            ("k", &self.k),
            ("depth", &self.depth),
            ("gap", &self.gap),
            ("trailing_gap", &self.trailing_gap),
            ("rolloff", &self.rolloff),
            ("sps", &self.sps),
            ("order", &self.order),
            ("chip_rate", &self.chip_rate),
            ("snr_db", &self.snr_db),
            ("seed", &self.seed),
        ];
        for (key, v) in overrides {
            if let Some(v) = v {
                cfg.set(key, v).expect("known key")?;
            }
        }
        if let Some(ch) = &self.channel {
            if !ch.is_file() {
                return Err(ConfigError::MissingFile {
                    field: "channel",
                    path: ch.clone(),
                }
                .into());
            }
            cfg.channel = Some(ch.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output_path(given: &Option<PathBuf>, cfg: &RunConfig) -> CliResult<PathBuf> {
    given
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::Usage("missing output path (-o)".into()))
}

pub fn build_set(cfg: &RunConfig) -> CliResult<(lscode_core::lscode::LsCodeTree, LsCodeSet)> {
    let tree = expand(&generate_pair(cfg.k)?, cfg.depth)?;
    let set = code_set(&tree, cfg.depth, cfg.gap, cfg.trailing_gap())?;
    Ok((tree, set))
}

fn codes(cfg: &RunConfig, dir: &Option<PathBuf>) -> CliResult<Vec<LsCode>> {
    match dir {
        Some(dir) => Ok(formats::load_code_dir(dir)?.1),
        None => Ok(build_set(cfg)?.1.codes),
    }
}

/// Narrowest predicted window over all pairs of a set.
pub fn set_ifw(tree: &lscode_core::lscode::LsCodeTree, set: &LsCodeSet) -> CliResult<usize> {
    let ids: Vec<_> = set.codes.iter().filter_map(LsCode::id).collect();
    let mut min = usize::MAX;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i..] {
            min = min.min(predicted_ifw(tree, a, b, set.gap)?);
        }
    }
    Ok(min)
}

fn waveform(
    code: &LsCode,
    cfg: &RunConfig,
    stage: Stage,
) -> CliResult<(IqWaveform, f64, Quantized)> {
    let bb = shape(code.chips(), &cfg.rrc())?;
    let w = match stage {
        Stage::Baseband => bb,
        Stage::If => upconvert_fs4(&bb)?,
    };
    let scale = q15_scale(&w);
    let q = quantize_q15(&w, scale)?;
    Ok((w, scale, q))
}

fn bandwidth_note(cfg: &RunConfig, out: &mut Outcome) {
    if let Some(w) = bandwidth_warning(&cfg.rrc(), BANDWIDTH_ALLOWANCE) {
        out.warnings.push(w);
    }
}

fn gen(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let (tree, set) = build_set(cfg)?;
    let ifw = set_ifw(&tree, &set)?;
    formats::create_dir(dir)?;
    let mut w = kv::Writer::new();
    w.comment("LS code set");
    cfg.write_entries(&mut w);
    w.entry("derived.layer", set.layer)
        .entry("derived.part_len", tree.subcode_len(set.layer))
        .entry("derived.code_len", set.code_len())
        .entry("derived.predicted_ifw_chips", ifw)
        .entry("derived.ifw_us", ifw as f64 / cfg.chip_rate * 1e6)
        .entry(
            "derived.code_duration_us",
            set.code_len() as f64 / cfg.chip_rate * 1e6,
        )
        .entry("derived.sample_rate", cfg.rrc().sample_rate())
        .entry(
            "derived.occupied_bandwidth_hz",
            occupied_bandwidth(&cfg.rrc()),
        )
        .entry("code.count", set.len());
    let mut out = Outcome::default();
    for (i, code) in set.codes.iter().enumerate() {
        let name = formats::code_file_name(i, code);
        formats::write_text(&dir.join(&name), &formats::format_code(code))?;
        w.entry(&format!("code.{i}"), &name);
    }
    formats::write_text(&dir.join("manifest.txt"), &w.finish())?;
    bandwidth_note(cfg, &mut out);
    out.stdout = format!(
        "{} codes of {} chips, predicted IFW {} chips ({:.1} us)\n",
        set.len(),
        set.code_len(),
        ifw,
        ifw as f64 / cfg.chip_rate * 1e6
    );
    Ok(out)
}

fn parse_pair(raw: &str, count: usize) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("--pair expects `i,j` with indices below {count}"));
    let (a, b) = raw.split_once(',').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if a >= count || b >= count {
        return Err(bad());
    }
    Ok((a, b))
}

#[allow(clippy::too_many_arguments)]
fn corr(
    cfg: &RunConfig,
    codes_dir: &Option<PathBuf>,
    lags: Option<usize>,
    mode: &Option<String>,
    pair: &Option<String>,
    path: &Path,
) -> CliResult<Outcome> {
    let codes = codes(cfg, codes_dir)?;
    let mode = match mode {
        Some(m) => crate::config::parse_mode(m)
            .ok_or_else(|| CliError::Usage("--mode expects aperiodic or periodic".into()))?,
        None => cfg.mode,
    };
    let (i, j) = match pair {
        Some(p) => parse_pair(p, codes.len())?,
        None if codes.len() > 1 => (0, 1),
        None => (0, 0),
    };
    let reach = lags.unwrap_or(codes[i].len().max(codes[j].len()) - 1) as isize;
    let profile = corr_profile(&codes[i], &codes[j], -reach..=reach, mode)?;
    let rows: Vec<(isize, i64)> = profile.iter().collect();
    formats::write_text(
        path,
        &formats::format_columns(formats::CORRELATION_HEADER, &rows),
    )?;
    let ifw = measure_ifw(&profile);
    let name = |c: &LsCode, k: usize| c.id().map_or_else(|| format!("#{k}"), |id| id.to_string());
    Ok(Outcome {
        stdout: format!(
            "{} x {} ({}): IFW {} chips ({:.1} us), dynamic range {:.1} dB\n",
            name(&codes[i], i),
            name(&codes[j], j),
            mode_name(mode),
            ifw.width,
            ifw.width as f64 / cfg.chip_rate * 1e6,
            ifw.dynamic_range_db
        ),
        warnings: vec![],
    })
}

fn wave(
    cfg: &RunConfig,
    codes_dir: &Option<PathBuf>,
    stage: Stage,
    dir: &Path,
) -> CliResult<Outcome> {
    let codes = codes(cfg, codes_dir)?;
    formats::create_dir(dir)?;
    let mut out = Outcome::default();
    for (i, code) in codes.iter().enumerate() {
        let (w, scale, q) = waveform(code, cfg, stage)?;
        let meta = formats::WaveMeta {
            sample_rate: w.sample_rate,
            scale,
            stage,
            samples: q.words.len(),
            saturated: q.saturated,
        };
        formats::write_waveform(&dir.join(format!("tx{i}")), &q.words, &meta)?;
        writeln!(
            out.stdout,
            "tx{i}: {} samples at {} Hz, {} saturated",
            meta.samples, meta.sample_rate, q.saturated
        )
        .expect("string write");
    }
    bandwidth_note(cfg, &mut out);
    Ok(out)
}

fn mem(
    cfg: &RunConfig,
    codes_dir: &Option<PathBuf>,
    source: MemSource,
    dir: &Path,
) -> CliResult<Outcome> {
    let codes = codes(cfg, codes_dir)?;
    formats::create_dir(dir)?;
    let mut out = Outcome::default();
    for (i, code) in codes.iter().enumerate() {
        let words = match source {
            MemSource::Chips => {
                let chips: Vec<f64> = code.chips().iter().map(|&c| f64::from(c)).collect();
                let w = IqWaveform::new(chips, cfg.chip_rate, Stage::Baseband)?;
                quantize_q15(&w, 1.0)?.words
            }
            MemSource::Waveform => waveform(code, cfg, cfg.stage)?.2.words,
        };
        let text = formats::format_mem_lines_joined(&words);
        formats::write_text(&dir.join(format!("tx{i}.mem")), &text)?;
        writeln!(out.stdout, "tx{i}.mem: {} words", words.len()).expect("string write");
    }
    Ok(out)
}

fn spectrum_cmd(
    cfg: &RunConfig,
    codes_dir: &Option<PathBuf>,
    bandwidth: f64,
    zoh: bool,
    segment: usize,
    tx: usize,
    dir: &Path,
) -> CliResult<Outcome> {
    let codes = codes(cfg, codes_dir)?;
    let code = codes
        .get(tx)
        .ok_or_else(|| CliError::Usage(format!("--tx must be below {}", codes.len())))?;
    let (w, _, q) = waveform(code, cfg, Stage::If)?;
    let samples: Vec<f64> = q.words.iter().map(|x| x.to_f64()).collect();
    let config = SpectrumConfig {
        segment_len: segment,
        ..SpectrumConfig::default()
    };
    let report = spectrum(&samples, w.sample_rate, bandwidth, zoh, &config)?;
    formats::create_dir(dir)?;
    let rows: Vec<(f64, f64)> = report
        .frequencies
        .iter()
        .copied()
        .zip(report.magnitudes_db.iter().copied())
        .collect();
    formats::write_text(
        &dir.join("spectrum.csv"),
        &formats::format_columns(formats::SPECTRUM_HEADER, &rows),
    )?;
    let peaks: Vec<(f64, f64)> = report
        .peaks
        .iter()
        .copied()
        .zip(report.peak_levels_db.iter().copied())
        .collect();
    formats::write_text(
        &dir.join("peaks.csv"),
        &formats::format_columns(formats::PEAKS_HEADER, &peaks),
    )?;
    let mut out = Outcome::default();
    for (f, l) in &peaks {
        writeln!(out.stdout, "image {:.3} MHz  {:.2} dB", f / 1e6, l).expect("string write");
    }
    bandwidth_note(cfg, &mut out);
    Ok(out)
}

/// Everything `simulate` and `constellation` share.
pub struct Simulation {
    pub setup: SoundingSetup,
    pub channel: MimoChannel,
    pub ifw_chips: usize,
    pub eval: EvalConfig,
}

pub fn prepare_simulation(cfg: &RunConfig) -> CliResult<Simulation> {
    let (tree, set) = build_set(cfg)?;
    if set.len() < 2 {
        return Err(CliError::Analysis(
            "the code layer holds fewer than two codes".into(),
        ));
    }
    let both = LsCodeSet {
        codes: set.codes[..2].to_vec(),
        ..set
    };
    let ifw_chips = set_ifw(&tree, &both)?;
    let channel = match &cfg.channel {
        Some(p) => formats::read_channel(p)?,
        None => MimoChannel::identity(),
    };
    let setup = SoundingSetup {
        codes: [both.codes[0].clone(), both.codes[1].clone()],
        spec: cfg.rrc(),
        quantize: cfg.quantize,
        config: cfg.sounder(ifw_chips),
    };
    let eval = EvalConfig {
        sps: cfg.sps,
        chip_rate: cfg.chip_rate,
        ifw_chips,
    };
    Ok(Simulation {
        setup,
        channel,
        ifw_chips,
        eval,
    })
}

fn simulate(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let sim = prepare_simulation(cfg)?;
    let mut out = Outcome::default();
    for w in validate_delay_spread(&sim.channel, sim.ifw_chips, cfg.sps) {
        out.warnings.push(format!(
            "path rx{} <- tx{} delay {} samples is outside the {}-sample window",
            w.rx, w.tx, w.delay, w.limit
        ));
    }
    bandwidth_note(cfg, &mut out);
    let run = run_sounding(&sim.setup, &sim.channel, &cfg.noise())?;
    let metrics = evaluate(&run.estimates, &sim.channel, &sim.eval);

    formats::create_dir(dir)?;
    formats::write_text(
        &dir.join("channel.txt"),
        &formats::format_channel(&sim.channel),
    )?;
    let mut w = kv::Writer::new();
    w.comment("sounding run");
    let recorded = RunConfig {
        channel: Some(PathBuf::from("channel.txt")),
        ..cfg.clone()
    };
    recorded.write_entries(&mut w);
    w.entry("derived.ifw_chips", sim.ifw_chips)
        .entry("derived.max_lag_samples", sim.setup.config.max_lag)
        .entry(
            "code.tx0",
            sim.setup.codes[0]
                .id()
                .map(|i| i.to_string())
                .unwrap_or_default(),
        )
        .entry(
            "code.tx1",
            sim.setup.codes[1]
                .id()
                .map(|i| i.to_string())
                .unwrap_or_default(),
        )
        .entry("derived.delay_warnings", out.warnings.len());
    formats::write_text(&dir.join("manifest.txt"), &w.finish())?;
    formats::write_text(&dir.join("metrics.txt"), &formats::format_metrics(&metrics))?;
    for r in 0..2 {
        for t in 0..2 {
            let rows: Vec<(usize, f64)> = run.estimates[r][t].magnitudes().enumerate().collect();
            formats::write_text(
                &dir.join(format!("cir_r{r}_t{t}.csv")),
                &formats::format_columns(formats::CIR_HEADER, &rows),
            )?;
        }
    }
    out.stdout = summarize(&metrics);
    Ok(out)
}

/// Human summary of a metrics report.
pub fn summarize(m: &lscode_core::sounder::SoundingMetrics) -> String {
    let mut s = String::new();
    let w = &mut s;
    let in_window = m.paths.iter().filter(|p| p.in_window).count();
    writeln!(
        w,
        "paths in window: {in_window}, outside: {}",
        m.out_of_window().count()
    )
    .ok();
    writeln!(
        w,
        "delays sample-exact: {}",
        if m.all_exact() { "yes" } else { "no" }
    )
    .ok();
    writeln!(w, "worst gain error: {:.3}%", m.worst_gain_error() * 100.0).ok();
    writeln!(w, "worst interference: {:.1} dB", m.worst_interference_db()).ok();
    writeln!(w, "dynamic range: {:.1} dB", m.dynamic_range_db).ok();
    writeln!(
        w,
        "resolvable delays: {:.4} us to {:.1} us",
        m.resolvable_delay_s.0 * 1e6,
        m.resolvable_delay_s.1 * 1e6
    )
    .ok();
    for p in m.out_of_window() {
        writeln!(
            w,
            "out of window: rx{} <- tx{} at {} samples",
            p.rx, p.tx, p.true_delay
        )
        .ok();
    }
    s
}

fn constellation_cmd(
    cfg: &RunConfig,
    tx: usize,
    rx: Option<usize>,
    path: &Path,
) -> CliResult<Outcome> {
    let rx = rx.unwrap_or(tx);
    if tx > 1 || rx > 1 {
        return Err(CliError::Usage("--tx and --rx must be 0 or 1".into()));
    }
    let sim = prepare_simulation(cfg)?;
    let run = run_sounding(&sim.setup, &sim.channel, &cfg.noise())?;
    let est = &run.estimates[rx][tx];
    let main = est
        .peaks
        .iter()
        .max_by(|a, b| a.gain.abs().total_cmp(&b.gain.abs()))
        .ok_or_else(|| CliError::Analysis(format!("no path from tx{tx} at rx{rx}")))?;
    let code = &sim.setup.codes[tx];
    let points = constellation(&run.rx[rx].samples, code, &sim.setup.spec, main.delay)?;
    let rows: Vec<(usize, f64)> = (0..code.len())
        .filter(|&k| code.is_part_chip(k))
        .zip(points.iter().copied())
        .collect();
    formats::write_text(
        path,
        &formats::format_columns(formats::CONSTELLATION_HEADER, &rows),
    )?;
    let e = evm(&points, &part_chips(code));
    Ok(Outcome {
        stdout: format!(
            "{} points, path delay {} samples, gain {:.4}, EVM {:.3}%\n",
            points.len(),
            main.delay,
            main.gain,
            e * 100.0
        ),
        warnings: vec![],
    })
}

fn report(run: &Path) -> CliResult<Outcome> {
    let path = run.join("metrics.txt");
    let metrics = formats::parse_metrics(&path, &formats::read_text(&path)?)?;
    let manifest = KvFile::read(&run.join("manifest.txt"))?;
    let mut stdout = String::new();
    for key in [
        "k",
        "depth",
        "gap",
        "rolloff",
        "snr_db",
        "seed",
        "derived.ifw_chips",
    ] {
        if let Some(e) = manifest.raw(key) {
            let name = key.trim_start_matches("derived.");
            writeln!(stdout, "{name}: {}", e.value).ok();
        }
    }
    stdout.push_str(&summarize(&metrics));
    Ok(Outcome {
        stdout,
        warnings: vec![],
    })
}

pub fn execute(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Gen { cfg, output } => {
            let cfg = cfg.resolve()?;
            gen(&cfg, &output_path(&output, &cfg)?)
        }
        Command::Corr {
            cfg,
            codes,
            lags,
            mode,
            pair,
            output,
        } => {
            let cfg = cfg.resolve()?;
            corr(
                &cfg,
                &codes,
                lags,
                &mode,
                &pair,
                &output_path(&output, &cfg)?,
            )
        }
        Command::Wave {
            cfg,
            codes,
            stage,
            output,
        } => {
            let cfg = cfg.resolve()?;
            let stage = match stage {
                Some(s) => crate::config::parse_stage(&s)
                    .ok_or_else(|| CliError::Usage("--stage expects if or baseband".into()))?,
                None => cfg.stage,
            };
            wave(&cfg, &codes, stage, &output_path(&output, &cfg)?)
        }
        Command::Mem {
            cfg,
            codes,
            source,
            output,
        } => {
            let cfg = cfg.resolve()?;
            let source = match source.as_deref() {
                None => cfg.mem_source,
                Some("chips") => MemSource::Chips,
                Some("waveform") => MemSource::Waveform,
                Some(_) => {
                    return Err(CliError::Usage("--source expects chips or waveform".into()))
                }
            };
            mem(&cfg, &codes, source, &output_path(&output, &cfg)?)
        }
        Command::Spectrum {
            cfg,
            codes,
            bandwidth,
            no_zoh,
            segment,
            tx,
            output,
        } => {
            let cfg = cfg.resolve()?;
            spectrum_cmd(
                &cfg,
                &codes,
                bandwidth,
                !no_zoh,
                segment,
                tx,
                &output_path(&output, &cfg)?,
            )
        }
        Command::Simulate { cfg, output } => {
            let cfg = cfg.resolve()?;
            simulate(&cfg, &output_path(&output, &cfg)?)
        }
        Command::Constellation {
            cfg,
            tx,
            rx,
            output,
        } => {
            let cfg = cfg.resolve()?;
            constellation_cmd(&cfg, tx, rx, &output_path(&output, &cfg)?)
        }
        Command::Report { run } => report(&run),
    }
}

/// Parses arguments, runs the command and prints results. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("lscode: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lscode: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
