#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recursive_dft::{FilterBank, Method, MethodConfig};

pub fn random_stream(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `(1/Σw) Σ_{m<M} w(m) e^{j2πkm/M} x(n-m)`, with zero history before n = 0.
pub fn direct_dft(xs: &[f64], n: usize, k: isize, w: &[f64]) -> Complex64 {
    let m = w.len();
    let sum: f64 = w.iter().sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for (lag, wm) in w.iter().enumerate() {
        if lag > n {
            break;
        }
        let ph = 2.0 * PI * (k * lag as isize) as f64 / m as f64;
        acc += Complex64::from_polar(*wm, ph) * xs[n - lag];
    }
    acc / sum
}

/// Runs a double-precision bank and returns per-sample raw and windowed bins.
pub fn run(config: &MethodConfig, xs: &[f64]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let mut bank = FilterBank::<f64>::build(config.clone()).expect("build");
    let mut raw = Vec::with_capacity(xs.len());
    let mut win = Vec::with_capacity(xs.len());
    for &x in xs {
        bank.advance(Complex64::new(x, 0.0));
        raw.push(bank.raw().to_vec());
        win.push(bank.windowed().to_vec());
    }
    (raw, win)
}

pub fn cfg(method: Method, k: usize, b: usize) -> MethodConfig {
    MethodConfig::new(method, k, b)
}

pub fn max_dev(a: &[Vec<Complex64>], b: &[Vec<Complex64>], from: usize) -> f64 {
    a[from..]
        .iter()
        .zip(&b[from..])
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}
