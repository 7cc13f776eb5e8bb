//! Two-tone detection experiment: a unit tone midway between bins 7 and 8
//! and a 0.01 tone midway between bins 17 and 18.

use std::f64::consts::PI;
use std::io::{self, Write};

use anyhow::Result;
use rayon::prelude::*;
use recursive_dft::windows::freq_to_time;
use recursive_dft::{DynFilterBank, FilterBank, Method, MethodConfig, Precision};

use crate::scenario::Scenario;

pub const STRONG: (f64, f64) = (1.0, 7.5);
pub const WEAK: (f64, f64) = (0.01, 17.5);
/// Bins where the weak tone should show.
pub const WEAK_BINS: [isize; 2] = [17, 18];

/// RMS of `|X̂(n,k)|` over two periods, per bin `k = 0..=B`.
#[derive(Debug, Clone)]
pub struct DetectionRow {
    pub method: Method,
    pub magnitude: Vec<f64>,
    /// Direct windowed-DFT values for the two-tone, weak-only and strong-only inputs.
    pub oracle: Option<[Vec<f64>; 3]>,
}

impl DetectionRow {
    /// Measured magnitude within `tol_db` of the weak-only oracle at every weak bin.
    pub fn weak_visible(&self, tol_db: f64) -> Option<bool> {
        let [_, weak, _] = self.oracle.as_ref()?;
        Some(
            WEAK_BINS
                .iter()
                .all(|&k| db(self.magnitude[k as usize] / weak[k as usize]).abs() <= tol_db),
        )
    }

    /// Strong-tone leakage exceeds the weak tone's own response at every weak bin.
    pub fn leakage_dominates(&self) -> Option<bool> {
        let [_, weak, strong] = self.oracle.as_ref()?;
        Some(
            WEAK_BINS
                .iter()
                .all(|&k| strong[k as usize] > weak[k as usize]),
        )
    }

    /// Largest deviation in dB between the measured and two-tone oracle magnitudes.
    pub fn oracle_deviation_db(&self) -> Option<f64> {
        let [both, _, _] = self.oracle.as_ref()?;
        Some(
            self.magnitude
                .iter()
                .zip(both)
                .map(|(m, o)| db(m / o).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Writes `k,mag,mag_db,oracle,oracle_weak,oracle_strong`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,mag,mag_db,oracle,oracle_weak,oracle_strong")?;
        for (k, m) in self.magnitude.iter().enumerate() {
            write!(out, "{k},{m:.9e},{:.6}", db(*m))?;
            match &self.oracle {
                Some(o) => writeln!(out, ",{:.9e},{:.9e},{:.9e}", o[0][k], o[1][k], o[2][k])?,
                None => writeln!(out, ",,,")?,
            }
        }
        Ok(())
    }
}

fn db(v: f64) -> f64 {
    20.0 * v.max(1e-300).log10()
}

fn two_tone(n: u64, m: usize, strong: bool, weak: bool) -> f64 {
    let tone = |(a, bins): (f64, f64)| {
        a * (2.0 * PI * bins * (n % (2 * m as u64)) as f64 / m as f64).cos()
    };
    let mut x = 0.0;
    if strong {
        x += tone(STRONG);
    }
    if weak {
        x += tone(WEAK);
    }
    x
}

/// Effective causal time window with `X̂(k) = (1/M) Σ w(m) e^{jω_k m} x(n-m)`,
/// for methods whose interior bins are exactly a windowed DFT.
pub fn effective_window(config: &MethodConfig) -> Result<Option<Vec<f64>>> {
    let m = config.m();
    let bank = FilterBank::<f64>::build(config.clone())?;
    let design = bank.design();
    Ok(match config.method {
        Method::DirectDft
        | Method::Sdft
        | Method::RecursiveModulatedSdft
        | Method::TableModulatedSdft
        | Method::DeadbeatObserver => Some(vec![1.0; m]),
        Method::SlepianDft => design.time_window.as_ref().map(|w| {
            let s = w.sum();
            w.coeffs.iter().map(|c| c * m as f64 / s).collect()
        }),
        Method::SlepianModulatedSdft => match &design.freq_window {
            Some(w) => Some(freq_to_time(w, m)?.coeffs),
            None => None,
        },
        _ => None,
    })
}

fn oracle_rms(w: &[f64], b: usize, start: u64, strong: bool, weak: bool) -> Vec<f64> {
    let m = w.len();
    let count = 2 * m as u64;
    let xs: Vec<f64> = (start - m as u64..start + count)
        .map(|n| two_tone(n, m, strong, weak))
        .collect();
    (0..=b)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..count as usize {
                let n = i + m;
                let mut s = num_complex::Complex64::new(0.0, 0.0);
                for (lag, wl) in w.iter().enumerate() {
                    let ph = 2.0 * PI * ((k * lag) % m) as f64 / m as f64;
                    s += num_complex::Complex64::from_polar(*wl, ph) * xs[n - lag];
                }
                acc += (s / m as f64).norm_sqr();
            }
            (acc / count as f64).sqrt()
        })
        .collect()
}

/// Settling time before measurement: enough for `σ = -1/(2M)` fading memories
/// to decay by ~e^-40.
pub fn settle_samples(m: usize) -> u64 {
    80 * m as u64
}

/// Runs every method of the scenario in double precision.
pub fn run_detection(scenario: &Scenario) -> Result<Vec<DetectionRow>> {
    let mut scenario = scenario.clone();
    scenario.precision = Precision::Double;
    scenario.validate()?;
    let m = scenario.m();
    let start = settle_samples(m);
    scenario
        .methods
        .par_iter()
        .map(|&method| {
            let config = scenario.method_config(method)?;
            let mut bank = DynFilterBank::build(config.clone())?;
            for n in 0..start {
                bank.advance_real(two_tone(n, m, true, true));
            }
            let count = 2 * m as u64;
            let mut acc = vec![0.0; scenario.b + 1];
            for n in start..start + count {
                bank.advance_real(two_tone(n, m, true, true));
                for (k, a) in acc.iter_mut().enumerate() {
                    *a += bank.windowed_bin(k as isize).norm_sqr();
                }
            }
            let magnitude = acc.iter().map(|a| (a / count as f64).sqrt()).collect();
            let oracle = effective_window(&config)?.map(|w| {
                [
                    oracle_rms(&w, scenario.b, start, true, true),
                    oracle_rms(&w, scenario.b, start, false, true),
                    oracle_rms(&w, scenario.b, start, true, false),
                ]
            });
            Ok(DetectionRow {
                method,
                magnitude,
                oracle,
            })
        })
        .collect()
}

/// Fig. 4 parameters: `K = 64`, `B = 32`.
pub fn detection_scenario(methods: Vec<Method>) -> Scenario {
    Scenario {
        kind: crate::scenario::ScenarioKind::Detection,
        methods,
        precision: Precision::Double,
        segments: 1,
        segment_length: 129,
        ..Scenario::table1()
    }
}
