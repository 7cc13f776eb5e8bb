//! Magnitude-error measurement against a double-precision noise-free reference.

use std::io::{self, Write};
use std::time::Instant;

use anyhow::Result;
use rayon::prelude::*;
use recursive_dft::{DynFilterBank, Method, Precision};

use crate::scenario::Scenario;
use crate::signal::{NoiseGen, NoiseKind, ToneSignal};

const CHUNK: usize = 1 << 14;

/// Results for one method.
#[derive(Debug, Clone)]
pub struct MethodReport {
    pub method: Method,
    pub precision: Precision,
    /// RMS of `Err(n)` over each segment.
    pub rmse: Vec<f64>,
    /// `(n, Err(n))` at the last sample of each segment.
    pub checkpoints: Vec<(u64, f64)>,
    /// Time spent inside the measured bank only.
    pub exec_seconds: f64,
}

impl MethodReport {
    /// Err at the last sample of the segment ending at sample count `n`.
    pub fn err_at(&self, n: u64) -> Option<f64> {
        self.checkpoints
            .iter()
            .find(|(c, _)| *c + 1 == n)
            .map(|(_, e)| *e)
    }

    /// Writes `segment,n,err,rmse`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# method={},precision={},exec_seconds={:.6}",
            self.method, self.precision, self.exec_seconds
        )?;
        writeln!(out, "segment,n,err,rmse")?;
        for (s, ((n, e), r)) in self.checkpoints.iter().zip(&self.rmse).enumerate() {
            writeln!(out, "{},{n},{e:.6e},{r:.6e}", s + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub scenario: Scenario,
    pub methods: Vec<MethodReport>,
}

impl ErrorReport {
    pub fn get(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == method)
    }

    /// One-line-per-method summary in the layout of the published table.
    pub fn write_summary<W: Write>(&self, mut out: W) -> io::Result<()> {
        let s = &self.scenario;
        writeln!(
            out,
            "K={} B={} k={} noise={} precision={} segments={}x{} seed={}",
            s.k, s.b, s.probe_bin, s.noise, s.precision, s.segments, s.segment_length, s.seed
        )?;
        writeln!(
            out,
            "{:>6} {:>12} {:>12} {:>12} {:>10}",
            "method", "RMSE(seg2)", "Err(seg1)", "Err(last)", "exec_s"
        )?;
        for r in &self.methods {
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2e}"));
            writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12} {:>10.3}",
                r.method.to_string(),
                fmt(r.rmse.get(1).copied()),
                fmt(r.checkpoints.first().map(|c| c.1)),
                fmt(r.checkpoints.last().map(|c| c.1)),
                r.exec_seconds
            )?;
        }
        Ok(())
    }
}

/// Runs every method of the scenario, in parallel across methods.
///
/// `Err(n) = |X_ref(n,k)| - |X̂(n,k)|`, where the reference is the same
/// method in double precision on the noise-free signal.
pub fn run_table1(scenario: &Scenario) -> Result<ErrorReport> {
    scenario.validate()?;
    let signal = ToneSignal::new(scenario.k, scenario.b, scenario.seed);
    let methods = scenario
        .methods
        .par_iter()
        .map(|&m| run_method(scenario, &signal, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport {
        scenario: scenario.clone(),
        methods,
    })
}

fn run_method(scenario: &Scenario, signal: &ToneSignal, method: Method) -> Result<MethodReport> {
    let config = scenario.method_config(method)?;
    let mut bank = DynFilterBank::build(config.clone())?;
    let mut reference = DynFilterBank::build(config.with_precision(Precision::Double))?;
    let mut noise = NoiseGen::new(scenario.noise, scenario.seed, scenario.segment_length);
    let k = scenario.probe_bin;

    let mut clean = vec![0.0; CHUNK];
    let mut noisy = vec![0.0; CHUNK];
    let mut mags = vec![0.0; CHUNK];
    let mut exec = 0.0;
    let mut rmse = Vec::with_capacity(scenario.segments);
    let mut checkpoints = Vec::with_capacity(scenario.segments);
    let mut n = 0u64;

    for _ in 0..scenario.segments {
        let end = n + scenario.segment_length;
        let mut sum_sq = 0.0;
        let mut last = 0.0;
        while n < end {
            let len = CHUNK.min((end - n) as usize);
            for i in 0..len {
                clean[i] = signal.sample(n + i as u64);
                noisy[i] = clean[i] + noise.next_sample();
            }
            let t0 = Instant::now();
            for i in 0..len {
                bank.advance_real(noisy[i]);
                mags[i] = bank.windowed_bin(k).norm();
            }
            exec += t0.elapsed().as_secs_f64();
            for i in 0..len {
                reference.advance_real(clean[i]);
                last = reference.windowed_bin(k).norm() - mags[i];
                sum_sq += last * last;
            }
            n += len as u64;
        }
        rmse.push((sum_sq / scenario.segment_length as f64).sqrt());
        checkpoints.push((n - 1, last));
    }

    Ok(MethodReport {
        method,
        precision: scenario.precision,
        rmse,
        checkpoints,
        exec_seconds: exec,
    })
}

/// Reference single-precision values for `K = 64, B = 32, k = 16`.
///
/// Columns: Gaussian RMSE over segment 2, impulsive Err at 2·10⁶, no-noise Err
/// at 10⁶ and at 10⁸.
pub fn published_table1(method: Method) -> Option<[f64; 4]> {
    Some(match method.id() {
        1 => [1.8e-1, -3.6e-7, -3.6e-7, -1.2e-7],
        3 => [1.8e-1, -3.8e-2, -1.5e-2, -3.2e0],
        4 => [7.8e-1, -7.8e-3, 3.6e-7, 6.0e-7],
        5 => [1.8e-1, -7.8e-3, 7.2e-7, 7.2e-7],
        8 => [1.4e-1, -1.9e-6, -1.9e-6, -9.5e-7],
        9 => [9.2e-2, -3.6e-2, -1.5e-2, -3.2e0],
        10 => [8.8e-2, -1.2e-3, 7.2e-7, 7.7e-7],
        12 => [8.8e-2, -1.7e-6, -9.5e-7, -1.3e-6],
        _ => return None,
    })
}

/// Table 1 row for the given noise kind from a report.
pub fn cell(report: &MethodReport, noise: NoiseKind, segment_length: u64) -> Option<f64> {
    match noise {
        NoiseKind::Gaussian => report.rmse.get(1).copied(),
        NoiseKind::Impulsive => report.err_at(2 * segment_length),
        NoiseKind::None => report.err_at(segment_length),
    }
}
