//! Test-signal and noise generation.
//!
//! Three independent ChaCha streams derived from one seed drive the tone
//! phases, the Gaussian noise and the impulses, so changing the noise kind
//! never changes the clean signal.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Amplitude bound of the impulsive noise.
pub const IMPULSE_RANGE: f64 = 1e6;

const PHASE_STREAM: u64 = 0;
const GAUSS_STREAM: u64 = 1;
const IMPULSE_STREAM: u64 = 2;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    /// Unit-variance Gaussian noise on every sample.
    Gaussian,
    /// One uniform `±1e6` impulse on the first sample of each segment.
    Impulsive,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::None => "none",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Impulsive => "impulsive",
        })
    }
}

impl FromStr for NoiseKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no-noise" => NoiseKind::None,
            "gaussian" | "gauss" => NoiseKind::Gaussian,
            "impulsive" | "impulse" => NoiseKind::Impulsive,
            other => bail!("unknown noise kind '{other}' (expected none, gaussian or impulsive)"),
        })
    }
}

/// Sum of `B+1` unit cosines at bins `0..=B` with seeded random phases.
///
/// Samples come from a one-period table, so the stream is exactly `M`-periodic.
#[derive(Debug, Clone)]
pub struct ToneSignal {
    pub phases: Vec<f64>,
    table: Vec<f64>,
}

impl ToneSignal {
    pub fn new(k: usize, b: usize, seed: u64) -> Self {
        let m = 2 * k + 1;
        let mut r = rng(seed, PHASE_STREAM);
        let phases: Vec<f64> = (0..=b).map(|_| r.gen_range(0.0..2.0 * PI)).collect();
        let table = (0..m)
            .map(|n| {
                phases
                    .iter()
                    .enumerate()
                    .map(|(bin, ph)| (2.0 * PI * ((bin * n) % m) as f64 / m as f64 + ph).cos())
                    .sum()
            })
            .collect();
        Self { phases, table }
    }

    pub fn period(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn sample(&self, n: u64) -> f64 {
        self.table[(n % self.table.len() as u64) as usize]
    }

    pub fn samples(&self, range: std::ops::Range<u64>) -> Vec<f64> {
        range.map(|n| self.sample(n)).collect()
    }
}

/// Sequential noise source; call [`NoiseGen::next_sample`] once per sample in order.
#[derive(Debug, Clone)]
pub struct NoiseGen {
    kind: NoiseKind,
    segment_length: u64,
    gauss: ChaCha8Rng,
    impulse: ChaCha8Rng,
    spare: Option<f64>,
    n: u64,
}

impl NoiseGen {
    pub fn new(kind: NoiseKind, seed: u64, segment_length: u64) -> Self {
        Self {
            kind,
            segment_length: segment_length.max(1),
            gauss: rng(seed, GAUSS_STREAM),
            impulse: rng(seed, IMPULSE_STREAM),
            spare: None,
            n: 0,
        }
    }

    /// Box–Muller pair; the second value is kept for the next call.
    fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - self.gauss.gen::<f64>();
        let u2: f64 = self.gauss.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn next_sample(&mut self) -> f64 {
        let n = self.n;
        self.n += 1;
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian => self.gaussian(),
            NoiseKind::Impulsive if n.is_multiple_of(self.segment_length) => {
                self.impulse.gen_range(-IMPULSE_RANGE..=IMPULSE_RANGE)
            }
            NoiseKind::Impulsive => 0.0,
        }
    }
}

/// Adds noise to `xs`, treating `xs[0]` as sample 0.
pub fn add_noise(xs: &[f64], kind: NoiseKind, seed: u64, segment_length: u64) -> Vec<f64> {
    let mut g = NoiseGen::new(kind, seed, segment_length);
    xs.iter().map(|x| x + g.next_sample()).collect()
}
