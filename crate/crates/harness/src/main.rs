use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use recursive_dft::mixing::{design_mixing, orthonormality_check};
use recursive_dft::response::{write_impulse_csv, DEFAULT_SETTLE};
use recursive_dft::windows::{
    concentration, freq_to_time, slepian_freq, slepian_time, sum_of_cosine, CosineWindow,
};
use recursive_dft::{Method, Precision};
use recursive_dft_harness::detection::detection_scenario;
use recursive_dft_harness::dumps::{impulse_scenario, response_scenario};
use recursive_dft_harness::table1::{cell, published_table1};
use recursive_dft_harness::{
    output_name, parse_methods, run_detection, run_impulse_dump, run_response_dump, run_table1,
    NoiseKind, Scenario,
};

#[derive(Parser, Debug)]
#[command(
    name = "rdft",
    version,
    about = "Recursive DFT filter-bank experiments",
    args_override_self = true
)]
struct Cli {
    /// Flat key=value file; keys mirror the long flag names. Flags given on
    /// the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Largest measurable bin (M = 2K+1).
    #[arg(long = "K")]
    k: Option<usize>,
    /// Largest bin of interest.
    #[arg(long = "B")]
    b: Option<usize>,
    /// Frequency-window half-width.
    #[arg(long = "Bwin")]
    b_win: Option<usize>,
    /// Forgetting factor per sample (negative).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Prediction horizon.
    #[arg(long)]
    l: Option<i64>,
    /// Comma-separated method ids, or `all`.
    #[arg(long, alias = "method")]
    methods: Option<String>,
    #[arg(long)]
    precision: Option<Precision>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Bin to probe.
    #[arg(long)]
    k_probe: Option<isize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design a window and write its coefficients.
    DesignWindow {
        #[command(flatten)]
        common: Common,
        /// slepian-time, slepian-freq or hann.
        #[arg(long, default_value = "slepian-freq")]
        kind: String,
        /// Band half-width in cycles/sample (default: 3/M).
        #[arg(long)]
        f_delta: Option<f64>,
    },
    /// Design a mixing matrix and write it.
    DesignMixing {
        #[command(flatten)]
        common: Common,
    },
    /// Dump bin frequency responses (defaults: K=8, B=4, k=2).
    FreqResponse {
        #[command(flatten)]
        common: Common,
        /// Grid points over [-1/2, 1/2].
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// Samples driven before measuring closed-loop responses.
        #[arg(long, default_value_t = 200_000)]
        settle: u64,
    },
    /// Dump bin impulse responses (defaults: K=64, sigma=-1/M, k=2, 5M samples).
    ImpulseResponse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        len: Option<usize>,
    },
    /// Magnitude-error experiment against a double-precision noise-free reference.
    Table1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        segments: Option<usize>,
        #[arg(long)]
        segment_length: Option<u64>,
        /// none, gaussian or impulsive; `all` runs the three in turn.
        #[arg(long, default_value = "all")]
        noise: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Segments of 1e5 samples, two segments.
        #[arg(long)]
        quick: bool,
        /// Run the no-noise case out to 1e8 samples.
        #[arg(long)]
        long: bool,
    },
    /// Two-tone detection experiment (K=64, B=32, double precision).
    Detection {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Turns `key=value` lines into `--key value` arguments placed before the
/// command-line flags so that the latter win.
fn config_args(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), i + 1);
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

fn parse_cli() -> Result<Cli> {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::try_parse_from(&args).unwrap_or_else(|e| e.exit());
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    // Re-parse with file values injected right after the subcommand name.
    let sub = args
        .iter()
        .position(|a| {
            [
                "design-window",
                "design-mixing",
                "freq-response",
                "impulse-response",
                "table1",
                "detection",
            ]
            .contains(&a.as_str())
        })
        .context("no subcommand")?;
    let mut merged = args[..=sub].to_vec();
    merged.extend(config_args(&path)?);
    merged.extend_from_slice(&args[sub + 1..]);
    Ok(Cli::try_parse_from(&merged).unwrap_or_else(|e| e.exit()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(BufWriter::new(f))
}

fn apply_common(mut s: Scenario, c: &Common) -> Result<Scenario> {
    if let Some(k) = c.k {
        s.k = k;
        if c.b.is_none() {
            s.b = s.b.min(k);
        }
    }
    if let Some(b) = c.b {
        s.b = b;
    }
    if let Some(sigma) = c.sigma {
        s.sigma = Some(sigma);
    }
    if c.l.is_some() {
        s.l = c.l;
    }
    if let Some(m) = &c.methods {
        s.methods = parse_methods(m)?;
    }
    if let Some(p) = c.precision {
        s.precision = p;
    }
    if let Some(k) = c.k_probe {
        s.probe_bin = k;
    }
    s.validate()?;
    Ok(s)
}

fn run() -> Result<()> {
    let cli = parse_cli()?;
    match cli.command {
        Command::DesignWindow {
            common,
            kind,
            f_delta,
        } => design_window(&common, &kind, f_delta),
        Command::DesignMixing { common } => {
            let k = common.k.unwrap_or(64);
            let b = common.b.unwrap_or(32);
            let m = 2 * k + 1;
            let sigma = common.sigma.unwrap_or(-1.0 / (2.0 * m as f64));
            let mix = design_mixing(b, m, sigma)?;
            let rep = orthonormality_check(&mix, 1e-7)?;
            println!("condition estimate {:.3e}", mix.condition);
            println!(
                "interpolation deviation {:.3e}, dual deviation {:.3e}, gram deviation {:.3e}",
                rep.interpolation_deviation, rep.dual_deviation, rep.gram_deviation
            );
            mix.write_csv(create(
                &common.out,
                &output_name("design_mixing", "12", Precision::Double),
            )?)?;
            Ok(())
        }
        Command::FreqResponse {
            common,
            points,
            settle,
        } => {
            let mut s = apply_common(response_scenario(vec![Method::DirectDft]), &common)?;
            if common.methods.is_none() {
                s.methods = Method::ALL[..12]
                    .iter()
                    .copied()
                    .filter(|m| !(m.id() == 7 && s.b < s.k))
                    .collect();
            }
            let settle = if settle == 0 { DEFAULT_SETTLE } else { settle };
            for curve in run_response_dump(&s, points, settle)? {
                let name = output_name(
                    "freq_response",
                    &curve.config.method.to_string(),
                    Precision::Double,
                );
                curve.write_csv(create(&common.out, &name)?)?;
            }
            Ok(())
        }
        Command::ImpulseResponse { common, len } => {
            let s = apply_common(
                impulse_scenario(vec![Method::FadingSdft, Method::HannFadingModulatedSdft]),
                &common,
            )?;
            let len = len.unwrap_or(5 * s.m());
            for (method, h) in run_impulse_dump(&s, len)? {
                write_impulse_csv(
                    create(
                        &common.out,
                        &output_name("impulse_response", &method.to_string(), s.precision),
                    )?,
                    &h,
                )?;
            }
            Ok(())
        }
        Command::Table1 {
            common,
            segments,
            segment_length,
            noise,
            seed,
            quick,
            long,
        } => {
            let mut base = Scenario::table1();
            if quick {
                base = base.quick();
            }
            base.seed = seed;
            if let Some(n) = segment_length {
                base.segment_length = n;
            }
            if let Some(n) = segments {
                base.segments = n;
            }
            let base = apply_common(base, &common)?;
            let kinds: Vec<NoiseKind> = if noise == "all" {
                vec![NoiseKind::Gaussian, NoiseKind::Impulsive, NoiseKind::None]
            } else {
                vec![noise.parse()?]
            };
            for kind in kinds {
                let mut s = base.clone();
                s.noise = kind;
                if long && kind == NoiseKind::None {
                    s.segments = s.segments.max(100);
                }
                let report = run_table1(&s)?;
                for r in &report.methods {
                    let name = output_name(
                        &format!("table1_{kind}"),
                        &r.method.to_string(),
                        s.precision,
                    );
                    r.write_csv(create(&common.out, &name)?)?;
                }
                let stdout = io::stdout();
                let mut out = stdout.lock();
                report.write_summary(&mut out)?;
                if s.k == 64 && s.b == 32 && s.probe_bin == 16 && s.precision == Precision::Single {
                    compare_published(&mut out, &report, kind, s.segment_length)?;
                }
                writeln!(out)?;
            }
            Ok(())
        }
        Command::Detection { common } => {
            let mut s = apply_common(detection_scenario(vec![Method::DirectDft]), &common)?;
            if common.methods.is_none() {
                s.methods = vec![
                    Method::DirectDft,
                    Method::SlepianDft,
                    Method::TableModulatedSdft,
                    Method::SlepianModulatedSdft,
                ];
            }
            for row in run_detection(&s)? {
                let name = output_name("detection", &row.method.to_string(), Precision::Double);
                row.write_csv(create(&common.out, &name)?)?;
                println!(
                    "method {:>2}: weak tone visible {:?}, leakage dominates {:?}",
                    row.method.to_string(),
                    row.weak_visible(3.0),
                    row.leakage_dominates()
                );
            }
            Ok(())
        }
    }
}

fn compare_published<W: Write>(
    out: &mut W,
    report: &recursive_dft_harness::ErrorReport,
    kind: NoiseKind,
    seg: u64,
) -> Result<()> {
    let col = match kind {
        NoiseKind::Gaussian => 0,
        NoiseKind::Impulsive => 1,
        NoiseKind::None => 2,
    };
    writeln!(
        out,
        "{:>6} {:>12} {:>12} {:>8}",
        "method", "measured", "published", "decades"
    )?;
    for r in &report.methods {
        let Some(row) = published_table1(r.method) else {
            continue;
        };
        let Some(v) = cell(r, kind, seg) else {
            continue;
        };
        let decades = (v.abs().max(1e-300) / row[col].abs()).log10();
        writeln!(
            out,
            "{:>6} {:>12.2e} {:>12.2e} {:>8.2}",
            r.method.to_string(),
            v,
            row[col],
            decades
        )?;
        if kind == NoiseKind::None {
            if let Some(v) = r.err_at(100 * seg) {
                let d = (v.abs().max(1e-300) / row[3].abs()).log10();
                writeln!(
                    out,
                    "{:>6} {:>12.2e} {:>12.2e} {:>8.2}  (1e8)",
                    r.method.to_string(),
                    v,
                    row[3],
                    d
                )?;
            }
        }
    }
    Ok(())
}

fn design_window(common: &Common, kind: &str, f_delta: Option<f64>) -> Result<()> {
    let k = common.k.unwrap_or(64);
    let m = 2 * k + 1;
    match kind {
        "slepian-time" => {
            let fd = f_delta.unwrap_or(2.0 / m as f64);
            let w = slepian_time(m, fd)?;
            let rect = concentration(&recursive_dft::windows::TimeWindow::rectangular(m), fd)?;
            println!(
                "alpha {:.9} (rectangular {:.9})",
                w.alpha.unwrap_or(f64::NAN),
                rect
            );
            w.write_csv(create(
                &common.out,
                &output_name("design_window", "slepian_time", Precision::Double),
            )?)?;
        }
        "slepian-freq" => {
            let fd = f_delta.unwrap_or(3.0 / m as f64);
            let bw = common.b_win.unwrap_or(2);
            let w = slepian_freq(m, bw, fd)?;
            println!("alpha {:.9}", w.alpha.unwrap_or(f64::NAN));
            w.write_csv(create(
                &common.out,
                &output_name("design_window", "slepian_freq", Precision::Double),
            )?)?;
            freq_to_time(&w, m)?.write_csv(create(
                &common.out,
                &output_name("design_window", "slepian_freq_time", Precision::Double),
            )?)?;
        }
        "hann" => {
            let w = sum_of_cosine(&CosineWindow::Hann, m)?;
            w.write_csv(create(
                &common.out,
                &output_name("design_window", "hann", Precision::Double),
            )?)?;
            freq_to_time(&w, m)?.write_csv(create(
                &common.out,
                &output_name("design_window", "hann_time", Precision::Double),
            )?)?;
        }
        other => bail!("unknown window kind '{other}' (slepian-time, slepian-freq, hann)"),
    }
    Ok(())
}
