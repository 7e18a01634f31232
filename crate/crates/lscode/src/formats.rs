//! On-disk artifacts.
//!
//! * Code file (`*.code`): `key = value` lines `id`, `part_len`, `gap`,
//!   `trailing_gap`, then `c` and `s` written as strings of `+` and `-`.
//! * Manifest (`manifest.txt`): the run config in canonical form followed by
//!   derived values and, for code directories, `code.<i> = <file>` entries.
//! * Two-column CSV with a fixed header: `lag,value` (correlation),
//!   `frequency_hz,magnitude_db` (spectrum), `frequency_hz,level_db`
//!   (image peaks), `chip,value` (constellation), `lag_samples,magnitude`
//!   (CIR).
//! * Raw waveform (`*.raw`): little-endian signed 16-bit Q1.15 words, no
//!   header, with a `*.meta` sidecar holding `format`, `sample_rate`,
//!   `scale`, `stage`, `samples` and `saturated`.
//! * Channel file: one tap per line, `rx tx delay_samples gain`, separated
//!   by whitespace; `#` comments.
//! * Metrics report (`metrics.txt`): see [`format_metrics`].
//!
//! Floating-point values are written with Rust's shortest round-trip
//! formatting, so every artifact parses back to the exact values written.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lscode_core::channel::{MimoChannel, PathTap};
use lscode_core::golay::BipolarSequence;
use lscode_core::lscode::{assemble, CodeId, LsCode};
use lscode_core::sounder::{PathMetric, SoundingMetrics};
use lscode_core::txchain::{format_mem_lines, parse_mem_lines, FixedWord16, Stage};

use crate::config::parse_stage;
use crate::error::{CliError, CliResult};
use crate::kv;

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

/// Parsed `key = value` file with typed lookups.
#[derive(Debug, Clone)]
pub struct KvFile {
    path: PathBuf,
    entries: Vec<kv::Entry>,
}

impl KvFile {
    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let entries = kv::parse(text).map_err(|(line, m)| format_err(path, line, m))?;
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Self::parse(path, &read_text(path)?)
    }

    pub fn entries(&self) -> &[kv::Entry] {
        &self.entries
    }

    pub fn raw(&self, key: &str) -> Option<&kv::Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<T> {
        let e = self
            .raw(key)
            .ok_or_else(|| format_err(&self.path, 0, format!("missing key `{key}`")))?;
        e.value.parse().map_err(|_| {
            format_err(
                &self.path,
                e.line,
                format!("bad value for `{key}`: `{}`", e.value),
            )
        })
    }

    fn error(&self, key: &str, message: &str) -> CliError {
        let line = self.raw(key).map_or(0, |e| e.line);
        format_err(&self.path, line, message)
    }
}

// ---- code files ----

fn chip_string(chips: &[i8]) -> String {
    chips
        .iter()
        .map(|&c| if c > 0 { '+' } else { '-' })
        .collect()
}

fn parse_chips(file: &KvFile, key: &str) -> CliResult<BipolarSequence> {
    let text: String = file.get(key)?;
    let chips = text
        .chars()
        .map(|ch| match ch {
            '+' => Ok(1),
            '-' => Ok(-1),
            _ => Err(file.error(key, "chips must be `+` or `-`")),
        })
        .collect::<CliResult<Vec<i8>>>()?;
    BipolarSequence::new(chips).map_err(|e| file.error(key, &e.to_string()))
}

pub fn format_code(code: &LsCode) -> String {
    let mut w = kv::Writer::new();
    w.comment("LS code: C, gap zeros, S, trailing zeros");
    if let Some(id) = code.id() {
        w.entry("id", id);
    }
    w.entry("part_len", code.part_len())
        .entry("gap", code.gap())
        .entry("trailing_gap", code.trailing_gap())
        .entry("c", chip_string(code.c_part()))
        .entry("s", chip_string(code.s_part()));
    w.finish()
}

pub fn parse_code(path: &Path, text: &str) -> CliResult<LsCode> {
    let file = KvFile::parse(path, text)?;
    let c = parse_chips(&file, "c")?;
    let s = parse_chips(&file, "s")?;
    let part_len: usize = file.get("part_len")?;
    if c.len() != part_len || s.len() != part_len {
        return Err(file.error("part_len", "C and S must both have part_len chips"));
    }
    let code = assemble(&c, &s, file.get("gap")?, file.get("trailing_gap")?)?;
    Ok(match file.raw("id") {
        Some(_) => code.with_id(file.get::<CodeId>("id")?),
        None => code,
    })
}

/// File name used for a code inside a code directory.
pub fn code_file_name(index: usize, code: &LsCode) -> String {
    match code.id() {
        Some(id) => format!("{}.code", id.to_string().replace('.', "_")),
        None => format!("code{index}.code"),
    }
}

/// Loads the codes listed by `code.<i>` entries of `dir/manifest.txt`.
pub fn load_code_dir(dir: &Path) -> CliResult<(KvFile, Vec<LsCode>)> {
    let manifest = KvFile::read(&dir.join("manifest.txt"))?;
    let count: usize = manifest.get("code.count")?;
    let mut codes = Vec::with_capacity(count);
    for i in 0..count {
        let name: String = manifest.get(&format!("code.{i}"))?;
        let path = dir.join(name);
        codes.push(parse_code(&path, &read_text(&path)?)?);
    }
    Ok((manifest, codes))
}

// ---- CSV ----

pub fn format_columns<A: Display, B: Display>(header: [&str; 2], rows: &[(A, B)]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    let mut push = |a: String, b: String| w.write_record([a, b]).expect("in-memory write");
    push(header[0].into(), header[1].into());
    for (a, b) in rows {
        push(a.to_string(), b.to_string());
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn parse_columns<A: FromStr, B: FromStr>(
    path: &Path,
    header: [&str; 2],
    text: &str,
) -> CliResult<Vec<(A, B)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let found = r
        .headers()
        .map_err(|e| format_err(path, 1, e.to_string()))?;
    if found.iter().ne(header) {
        return Err(format_err(
            path,
            1,
            format!("expected header `{}`", header.join(",")),
        ));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let line = i + 2;
            let rec = rec.map_err(|e| format_err(path, line, e.to_string()))?;
            if rec.len() != 2 {
                return Err(format_err(path, line, "expected 2 fields"));
            }
            let a = rec[0]
                .parse()
                .map_err(|_| format_err(path, line, "bad first field"))?;
            let b = rec[1]
                .parse()
                .map_err(|_| format_err(path, line, "bad second field"))?;
            Ok((a, b))
        })
        .collect()
}

pub const CORRELATION_HEADER: [&str; 2] = ["lag", "value"];
pub const SPECTRUM_HEADER: [&str; 2] = ["frequency_hz", "magnitude_db"];
pub const PEAKS_HEADER: [&str; 2] = ["frequency_hz", "level_db"];
pub const CONSTELLATION_HEADER: [&str; 2] = ["chip", "value"];
pub const CIR_HEADER: [&str; 2] = ["lag_samples", "magnitude"];

// ---- raw waveforms ----

#[derive(Debug, Clone, PartialEq)]
pub struct WaveMeta {
    pub sample_rate: f64,
    pub scale: f64,
    pub stage: Stage,
    pub samples: usize,
    pub saturated: usize,
}

pub fn raw_bytes(words: &[FixedWord16]) -> Vec<u8> {
    words.iter().flat_map(|w| w.0.to_le_bytes()).collect()
}

pub fn words_from_bytes(path: &Path, bytes: &[u8]) -> CliResult<Vec<FixedWord16>> {
    if bytes.len() % 2 != 0 {
        return Err(format_err(path, 0, "odd byte count in 16-bit sample file"));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|b| FixedWord16(i16::from_le_bytes([b[0], b[1]])))
        .collect())
}

pub fn format_meta(meta: &WaveMeta) -> String {
    let mut w = kv::Writer::new();
    w.entry("format", "s16le_q15")
        .entry("sample_rate", meta.sample_rate)
        .entry("scale", meta.scale)
        .entry("stage", meta.stage.as_str())
        .entry("samples", meta.samples)
        .entry("saturated", meta.saturated);
    w.finish()
}

pub fn parse_meta(path: &Path, text: &str) -> CliResult<WaveMeta> {
    let f = KvFile::parse(path, text)?;
    let format: String = f.get("format")?;
    if format != "s16le_q15" {
        return Err(f.error("format", "only s16le_q15 is supported"));
    }
    let stage: String = f.get("stage")?;
    Ok(WaveMeta {
        sample_rate: f.get("sample_rate")?,
        scale: f.get("scale")?,
        stage: parse_stage(&stage).ok_or_else(|| f.error("stage", "expected if or baseband"))?,
        samples: f.get("samples")?,
        saturated: f.get("saturated")?,
    })
}

/// Writes `<stem>.raw` and `<stem>.meta`.
pub fn write_waveform(stem: &Path, words: &[FixedWord16], meta: &WaveMeta) -> CliResult<()> {
    let raw = stem.with_extension("raw");
    fs::write(&raw, raw_bytes(words)).map_err(CliError::io(&raw))?;
    write_text(&stem.with_extension("meta"), &format_meta(meta))
}

pub fn read_waveform(stem: &Path) -> CliResult<(Vec<FixedWord16>, WaveMeta)> {
    let raw = stem.with_extension("raw");
    let meta_path = stem.with_extension("meta");
    let meta = parse_meta(&meta_path, &read_text(&meta_path)?)?;
    let bytes = fs::read(&raw).map_err(CliError::io(&raw))?;
    let words = words_from_bytes(&raw, &bytes)?;
    if words.len() != meta.samples {
        return Err(format_err(
            &meta_path,
            0,
            "sample count does not match the raw file",
        ));
    }
    Ok((words, meta))
}

// ---- .mem files ----

/// One word per line, newline-terminated.
pub fn format_mem_lines_joined(words: &[FixedWord16]) -> String {
    format_mem_lines(words)
        .into_iter()
        .map(|l| l + "\n")
        .collect()
}

pub fn parse_mem(path: &Path, text: &str) -> CliResult<Vec<FixedWord16>> {
    parse_mem_lines(text.lines()).map_err(|e| format_err(path, 0, e.to_string()))
}

// ---- channel files ----

pub fn format_channel(ch: &MimoChannel) -> String {
    let mut out = String::from("# rx tx delay_samples gain\n");
    for r in 0..2 {
        for t in 0..2 {
            for tap in ch.paths(r, t) {
                out.push_str(&format!("{r} {t} {} {}\n", tap.delay, tap.gain));
            }
        }
    }
    out
}

pub fn parse_channel(path: &Path, text: &str) -> CliResult<MimoChannel> {
    let mut ch = MimoChannel::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [r, t, d, g] = fields[..] else {
            return Err(format_err(
                path,
                line,
                "expected `rx tx delay_samples gain`",
            ));
        };
        let antenna = |v: &str, what: &str| match v {
            "0" => Ok(0usize),
            "1" => Ok(1),
            _ => Err(format_err(path, line, format!("{what} must be 0 or 1"))),
        };
        let (r, t) = (antenna(r, "rx")?, antenna(t, "tx")?);
        let delay = d
            .parse()
            .map_err(|_| format_err(path, line, "delay must be a non-negative integer"))?;
        let gain = g
            .parse()
            .map_err(|_| format_err(path, line, "gain must be a number"))?;
        let tap = PathTap::new(delay, gain).map_err(|e| format_err(path, line, e.to_string()))?;
        ch.taps[r][t].push(tap);
    }
    Ok(ch)
}

pub fn read_channel(path: &Path) -> CliResult<MimoChannel> {
    parse_channel(path, &read_text(path)?)
}

// ---- metrics report ----

fn opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Structured metrics text.
///
/// Summary keys: `dynamic_range_db`, `resolvable_min_s`, `resolvable_max_s`,
/// `interference_db.<r>.<t>` for each receive/transmit pair, `paths`.
/// Each path is `path.<i> = rx tx true_delay true_gain in_window
/// est_delay est_gain delay_error gain_error`, with `-` where no path was
/// detected. Derived verdicts (`all_exact`, `worst_gain_error`,
/// `worst_interference_db`, `out_of_window`) follow for readers; the parser
/// recomputes them and checks they agree.
pub fn format_metrics(m: &SoundingMetrics) -> String {
    let mut w = kv::Writer::new();
    w.comment("sounding metrics");
    w.comment(
        "path = rx tx true_delay true_gain in_window est_delay est_gain delay_error gain_error",
    );
    w.entry("dynamic_range_db", m.dynamic_range_db)
        .entry("resolvable_min_s", m.resolvable_delay_s.0)
        .entry("resolvable_max_s", m.resolvable_delay_s.1);
    for r in 0..2 {
        for t in 0..2 {
            w.entry(&format!("interference_db.{r}.{t}"), m.interference_db[r][t]);
        }
    }
    w.entry("paths", m.paths.len());
    for (i, p) in m.paths.iter().enumerate() {
        w.entry(
            &format!("path.{i}"),
            format!(
                "{} {} {} {} {} {} {} {} {}",
                p.rx,
                p.tx,
                p.true_delay,
                p.true_gain,
                p.in_window,
                opt(p.estimated_delay),
                opt(p.estimated_gain),
                opt(p.delay_error),
                opt(p.gain_error)
            ),
        );
    }
    w.entry("all_exact", m.all_exact())
        .entry("worst_gain_error", m.worst_gain_error())
        .entry("worst_interference_db", m.worst_interference_db())
        .entry("out_of_window", m.out_of_window().count());
    w.finish()
}

fn parse_path(file: &KvFile, key: &str) -> CliResult<PathMetric> {
    let text: String = file.get(key)?;
    let f: Vec<&str> = text.split_whitespace().collect();
    let bad = || file.error(key, "malformed path record");
    if f.len() != 9 {
        return Err(bad());
    }
    fn req<T: FromStr>(s: &str) -> Option<T> {
        s.parse().ok()
    }
    fn optional<T: FromStr>(s: &str) -> Option<Option<T>> {
        if s == "-" {
            Some(None)
        } else {
            s.parse().ok().map(Some)
        }
    }
    let build = || -> Option<PathMetric> {
        Some(PathMetric {
            rx: req(f[0])?,
            tx: req(f[1])?,
            true_delay: req(f[2])?,
            true_gain: req(f[3])?,
            in_window: req(f[4])?,
            estimated_delay: optional(f[5])?,
            estimated_gain: optional(f[6])?,
            delay_error: optional(f[7])?,
            gain_error: optional(f[8])?,
        })
    };
    build().filter(|p| p.rx < 2 && p.tx < 2).ok_or_else(bad)
}

pub fn parse_metrics(path: &Path, text: &str) -> CliResult<SoundingMetrics> {
    let file = KvFile::parse(path, text)?;
    let mut interference_db = [[0.0; 2]; 2];
    for (r, row) in interference_db.iter_mut().enumerate() {
        for (t, v) in row.iter_mut().enumerate() {
            *v = file.get(&format!("interference_db.{r}.{t}"))?;
        }
    }
    let count: usize = file.get("paths")?;
    let paths = (0..count)
        .map(|i| parse_path(&file, &format!("path.{i}")))
        .collect::<CliResult<Vec<_>>>()?;
    let m = SoundingMetrics {
        paths,
        interference_db,
        dynamic_range_db: file.get("dynamic_range_db")?,
        resolvable_delay_s: (file.get("resolvable_min_s")?, file.get("resolvable_max_s")?),
    };
    let exact: bool = file.get("all_exact")?;
    let outside: usize = file.get("out_of_window")?;
    if exact != m.all_exact() || outside != m.out_of_window().count() {
        return Err(file.error("all_exact", "summary does not match path records"));
    }
    Ok(m)
}
