//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reads top to bottom; the
//! process fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lscode::formats;
use lscode_core::channel::{apply_mimo, validate_delay_spread, MimoChannel, NoiseSpec, PathTap};
use lscode_core::correlation::{combined_corr, corr_profile, measure_ifw, CorrMode};
use lscode_core::golay::{generate_pair, verify_complementary};
use lscode_core::lscode::{code_set, expand, predicted_ifw, LsCodeSet};
use lscode_core::sounder::{
    constellation, evaluate, evm, part_chips, run_with_references, EvalConfig, SounderConfig,
    SoundingSetup,
};
use lscode_core::txchain::{design_rrc, spectrum, RrcSpec, SpectrumConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, fail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(fail())
    }
}

fn layer0(k: u32, gap: usize) -> LsCodeSet {
    let tree = expand(&generate_pair(k).unwrap(), 0).unwrap();
    code_set(&tree, 0, gap, gap).unwrap()
}

/// Smallest measured IFW over every pair of a set (autos included).
fn measured_min_ifw(set: &LsCodeSet, reach: isize) -> usize {
    let mut min = usize::MAX;
    for i in 0..set.len() {
        for j in i..set.len() {
            let p = corr_profile(
                &set.codes[i],
                &set.codes[j],
                -reach..=reach,
                CorrMode::Aperiodic,
            )
            .unwrap();
            min = min.min(measure_ifw(&p).width);
        }
    }
    min
}

fn golay_complementarity() -> Outcome {
    let start = Instant::now();
    for k in 0..=12 {
        let r = verify_complementary(&generate_pair(k).unwrap());
        check(r.is_complementary && r.peak == 2 << k, || {
            format!(
                "k={k}: peak {} worst {} at {}",
                r.peak, r.worst_value, r.worst_lag
            )
        })?;
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("k=0..12 exact, {t:.2?}"))
}

fn zero_lag_endpoints() -> Outcome {
    let set = layer0(12, 4000);
    for (i, a) in set.codes.iter().enumerate() {
        for (j, b) in set.codes.iter().enumerate() {
            let v = combined_corr(a, b, 0, CorrMode::Aperiodic).unwrap();
            let want = if i == j { 8192 } else { 0 };
            check(v == want, || format!("({i},{j}) = {v}, expected {want}"))?;
        }
    }
    Ok("R(0) = 8192 for i=j, 0 for i!=j".into())
}

fn ifw_reproduction() -> Outcome {
    let set = layer0(12, 4000);
    let mut widths = vec![];
    for (i, j) in [(0, 0), (1, 1), (0, 1)] {
        let p = corr_profile(
            &set.codes[i],
            &set.codes[j],
            -8192..=8192,
            CorrMode::Aperiodic,
        )
        .unwrap();
        let w = measure_ifw(&p).width;
        check(w == 4000, || format!("pair ({i},{j}) IFW {w}"))?;
        widths.push(w);
    }
    let us: f64 = 4000.0 / 7.68e6 * 1e6;
    let rel = (us - 520.0).abs() / 520.0;
    check(rel < 0.002, || {
        format!("{us:.2} us is {:.3}% from 520 us", rel * 100.0)
    })?;
    Ok(format!(
        "IFW {widths:?} chips = {us:.1} us ({:.2}% from 520 us)",
        rel * 100.0
    ))
}

fn ifw_monotonic() -> Outcome {
    let mut last = 0;
    let mut seen = vec![];
    for k in [4u32, 6, 8, 10] {
        let n = 1usize << k;
        let set = layer0(k, n);
        let w = measured_min_ifw(&set, (2 * n + 1) as isize);
        check(w >= last, || format!("k={k}: IFW {w} < {last}"))?;
        last = w;
        seen.push(w);
    }
    Ok(format!("IFW for k=4,6,8,10: {seen:?}"))
}

fn tree_properties() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0usize;
    for k in 0..=3u32 {
        for depth in 0..=3usize {
            let tree = expand(&generate_pair(k).unwrap(), depth).unwrap();
            for layer in 0..=depth {
                let n = tree.subcode_len(layer);
                for gap in [0, 1, n / 2, n, 2 * n + 1] {
                    let set = code_set(&tree, layer, gap, gap).unwrap();
                    let reach = set.code_len() as isize;
                    for (i, a) in set.codes.iter().enumerate() {
                        for b in &set.codes[i..] {
                            let p =
                                corr_profile(a, b, -reach..=reach, CorrMode::Aperiodic).unwrap();
                            let measured = measure_ifw(&p).width;
                            let predicted =
                                predicted_ifw(&tree, a.id().unwrap(), b.id().unwrap(), gap)
                                    .unwrap();
                            check(measured >= predicted, || {
                                format!(
                                    "k={k} depth={depth} layer={layer} gap={gap} {} x {}: {measured} < {predicted}",
                                    a.id().unwrap(),
                                    b.id().unwrap()
                                )
                            })?;
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!(
        "{pairs} code pairs, measured >= predicted, {t:.2?}"
    ))
}

fn rrc_correctness() -> Outcome {
    let spec = RrcSpec::default();
    let h = design_rrc(&spec).unwrap();
    check(h.len() == 33, || format!("{} taps", h.len()))?;
    check((0..h.len()).all(|i| h[i] == h[h.len() - 1 - i]), || {
        "taps not symmetric".into()
    })?;
    let centre = h[16];
    check(
        h.iter().enumerate().all(|(i, &v)| i == 16 || v < centre),
        || "centre tap is not the maximum".into(),
    )?;
    let cascade: Vec<f64> = (0..2 * h.len() - 1)
        .map(|n| {
            (0..h.len())
                .filter(|&i| n >= i && n - i < h.len())
                .map(|i| h[i] * h[n - i])
                .sum()
        })
        .collect();
    let mid = h.len() - 1;
    let peak = cascade[mid];
    let worst = (1..=mid / spec.sps)
        .flat_map(|m| [cascade[mid - m * spec.sps], cascade[mid + m * spec.sps]])
        .fold(0.0f64, |a, v| a.max(v.abs()))
        / peak;
    check(worst <= 0.01, || format!("ISI {:.3}%", worst * 100.0))?;
    Ok(format!(
        "33 symmetric taps, worst chip-spaced ISI {:.3}%",
        worst * 100.0
    ))
}

fn dac_images() -> Outcome {
    let setup = sounding_setup(12, 4000);
    let tx = setup.transmit_waveforms().unwrap();
    let report = spectrum(
        &tx[0].samples,
        tx[0].sample_rate,
        80e6,
        true,
        &SpectrumConfig::default(),
    )
    .unwrap();
    let expected = [7.68e6, 23.04e6, 38.40e6, 53.76e6, 69.12e6];
    let mut levels = vec![];
    for f in expected {
        let (idx, found) = report
            .peaks
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - f).abs().total_cmp(&(b.1 - f).abs()))
            .ok_or("no peaks")?;
        check((found - f).abs() <= report.bin_width, || {
            format!("image near {f} Hz found at {found} Hz")
        })?;
        levels.push(report.peak_levels_db[idx]);
    }
    check(levels.windows(2).all(|w| w[1] < w[0]), || {
        format!("levels not decreasing: {levels:?}")
    })?;
    let shown: Vec<String> = levels.iter().map(|l| format!("{l:.1}")).collect();
    Ok(format!(
        "images at 7.68..69.12 MHz within one bin, levels {} dB",
        shown.join(" > ")
    ))
}

fn sounding_setup(k: u32, gap: usize) -> SoundingSetup {
    let set = layer0(k, gap);
    let spec = RrcSpec::default();
    SoundingSetup {
        codes: [set.codes[0].clone(), set.codes[1].clone()],
        spec,
        quantize: true,
        config: SounderConfig::for_window(gap, spec.sps),
    }
}

fn channel(taps: [(usize, f64); 4]) -> MimoChannel {
    let mut ch = MimoChannel::default();
    for (i, (d, g)) in taps.into_iter().enumerate() {
        ch.taps[i / 2][i % 2].push(PathTap::new(d, g).unwrap());
    }
    ch
}

/// Random in-window channels plus the window-edge cases at one scale.
fn sounding_campaign(k: u32, gap: usize) -> Result<String, String> {
    let setup = sounding_setup(k, gap);
    let tx = setup.transmit_waveforms().unwrap();
    let refs = setup.references(&tx).unwrap();
    let eval = EvalConfig {
        sps: 4,
        chip_rate: 7.68e6,
        ifw_chips: gap,
    };
    let limit = gap * 4;
    let run = |ch: &MimoChannel| {
        let r = run_with_references(&tx, &refs, ch, &NoiseSpec::NONE, &setup.config).unwrap();
        evaluate(&r.estimates, ch, &eval)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_gain, mut worst_floor) = (0.0f64, f64::NEG_INFINITY);
    for trial in 0..20 {
        let taps = [0; 4].map(|_| {
            let g: f64 = rng.random_range(0.2..1.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (rng.random_range(0..limit), sign * g)
        });
        let ch = channel(taps);
        let m = run(&ch);
        check(m.all_exact(), || {
            format!("trial {trial}: delay error, channel {taps:?}")
        })?;
        check(m.worst_gain_error() <= 0.05, || {
            format!("trial {trial}: gain error {:.4}", m.worst_gain_error())
        })?;
        check(m.worst_interference_db() <= -50.0, || {
            format!("trial {trial}: floor {:.1} dB", m.worst_interference_db())
        })?;
        worst_gain = worst_gain.max(m.worst_gain_error());
        worst_floor = worst_floor.max(m.worst_interference_db());
    }

    // one chip and one chip short of the window
    let edge = channel([(4, 1.0), (limit - 4, 0.7), (limit - 4, -0.5), (4, 0.9)]);
    let m = run(&edge);
    check(m.all_exact() && m.worst_gain_error() <= 0.05, || {
        format!("edge delays not resolved: {:?}", m.paths)
    })?;

    // at and beyond the window
    let outside = channel([(0, 1.0), (limit, 0.5), (limit + 100 * 4, 0.5), (0, 1.0)]);
    let m = run(&outside);
    let flagged: Vec<usize> = m.out_of_window().map(|p| p.true_delay).collect();
    check(flagged == [limit, limit + 400], || {
        format!("flagged {flagged:?}")
    })?;
    let warned = validate_delay_spread(&outside, gap, 4).len();
    check(warned == 2, || format!("{warned} delay-spread warnings"))?;

    Ok(format!(
        "gain error <= {:.1e}, floor <= {:.1} dB",
        worst_gain, worst_floor
    ))
}

fn end_to_end() -> Outcome {
    let t = Instant::now();
    let smoke = sounding_campaign(6, 64)?;
    let t_smoke = t.elapsed();
    check(t_smoke < Duration::from_secs(10), || {
        format!("k=6 took {t_smoke:?}")
    })?;
    let t = Instant::now();
    let full = sounding_campaign(12, 4000)?;
    let t_full = t.elapsed();
    check(t_full < Duration::from_secs(300), || {
        format!("k=12 took {t_full:?}")
    })?;
    Ok(format!(
        "20 random channels exact; 1 and 3999 chips resolved; >= 4000 flagged; k=12 {full} in {t_full:.1?}; k=6 {smoke} in {t_smoke:.2?}"
    ))
}

fn constellation_evm() -> Outcome {
    let setup = sounding_setup(12, 4000);
    let tx = setup.transmit_waveforms().unwrap();
    let rx = apply_mimo(&MimoChannel::identity(), &tx).unwrap();
    let mut shown = vec![];
    for t in 0..2 {
        let code = &setup.codes[t];
        let points = constellation(&rx[t].samples, code, &setup.spec, 0).unwrap();
        let chips = part_chips(code);
        let e = evm(&points, &chips);
        check(e < 0.05, || format!("tx{t}: EVM {:.2}%", e * 100.0))?;
        let neg = points
            .iter()
            .zip(&chips)
            .filter(|(p, &c)| c < 0 && **p < 0.0)
            .count();
        let pos = points
            .iter()
            .zip(&chips)
            .filter(|(p, &c)| c > 0 && **p > 0.0)
            .count();
        check(neg + pos == points.len(), || {
            format!("tx{t}: points on the wrong side")
        })?;
        shown.push(format!("{:.2}%", e * 100.0));
    }
    Ok(format!("two clusters, EVM {}", shown.join(" / ")))
}

fn cli(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lscode"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!(
            "`lscode {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = vec![];
    for entry in walk(dir) {
        let rel = entry
            .strip_prefix(dir)
            .unwrap()
            .to_string_lossy()
            .into_owned();
        out.push((rel, std::fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = vec![];
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn determinism_and_mem() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(
        root.path().join("ch.txt"),
        "0 0 4 1\n0 1 40 -0.5\n1 0 9 0.3\n1 1 0 0.8\n",
    )
    .unwrap();
    std::fs::write(
        root.path().join("sim.cfg"),
        "k = 6\ngap = 64\nchannel = ch.txt\nsnr_db = 20\nseed = 7\n",
    )
    .unwrap();
    for run in ["a", "b"] {
        let o = |name: &str| format!("{run}/{name}");
        cli(
            &["gen", "--k", "6", "--gap", "64", "-o", &o("codes")],
            root.path(),
        )?;
        cli(
            &["corr", "--codes", &o("codes"), "-o", &o("corr.csv")],
            root.path(),
        )?;
        cli(
            &["wave", "--codes", &o("codes"), "-o", &o("wave")],
            root.path(),
        )?;
        cli(
            &["mem", "--codes", &o("codes"), "-o", &o("mem")],
            root.path(),
        )?;
        cli(
            &[
                "mem",
                "--codes",
                &o("codes"),
                "--source",
                "waveform",
                "-o",
                &o("memw"),
            ],
            root.path(),
        )?;
        cli(
            &["spectrum", "--codes", &o("codes"), "-o", &o("spectrum")],
            root.path(),
        )?;
        cli(
            &["simulate", "--config", "sim.cfg", "-o", &o("run")],
            root.path(),
        )?;
        cli(
            &[
                "constellation",
                "--config",
                "sim.cfg",
                "-o",
                &o("const.csv"),
            ],
            root.path(),
        )?;
    }
    let a = files(&root.path().join("a"));
    let b = files(&root.path().join("b"));
    check(!a.is_empty() && a == b, || "repeated runs differ".into())?;

    // .mem and raw waveform files read back to the same words
    let base = root.path().join("a");
    for i in 0..2 {
        let mem_path = base.join(format!("memw/tx{i}.mem"));
        let mem = formats::parse_mem(&mem_path, &std::fs::read_to_string(&mem_path).unwrap())
            .map_err(|e| e.to_string())?;
        let (raw, _) =
            formats::read_waveform(&base.join(format!("wave/tx{i}"))).map_err(|e| e.to_string())?;
        check(mem == raw, || format!("tx{i}: .mem and raw words differ"))?;
        let again = formats::format_mem_lines_joined(&mem);
        check(
            again.as_bytes() == std::fs::read(&mem_path).unwrap(),
            || format!("tx{i}: .mem text does not round-trip"),
        )?;
    }
    let metrics = base.join("run/metrics.txt");
    formats::parse_metrics(&metrics, &std::fs::read_to_string(&metrics).unwrap())
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} artifacts byte-identical across runs; .mem, raw and metrics round-trip",
        a.len()
    ))
}

fn length_caveat() -> Outcome {
    let default_len = layer0(12, 4000).code_len();
    check(default_len != 8190, || "default layout claims 8190".into())?;
    // symmetric 4000-chip gaps leave 95 chips per part
    let n: usize = (8190 - 2 * 4000) / 2;
    check(!n.is_power_of_two(), || "power-of-two part fits".into())?;
    let readme = include_str!("../../../README.md");
    check(readme.contains("8190"), || {
        "README does not document the length".into()
    })?;
    Ok(format!(
        "8190 not reproduced: default length {default_len}, symmetric gaps need N={n}; documented"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Golay complementarity", golay_complementarity),
        ("zero-lag endpoints", zero_lag_endpoints),
        ("IFW reproduction", ifw_reproduction),
        ("IFW monotonicity", ifw_monotonic),
        ("tree properties", tree_properties),
        ("RRC correctness", rrc_correctness),
        ("DAC images", dac_images),
        ("end-to-end 2x2 sounding", end_to_end),
        ("constellation", constellation_evm),
        ("determinism and .mem round-trip", determinism_and_mem),
        ("8190-chip length caveat", length_caveat),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
