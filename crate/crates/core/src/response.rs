//! Frequency and impulse responses of filter-bank bins.
//!
//! Analytic responses compose the open-loop block transfer functions at
//! `z = e^{j2πf}`. Empirical responses drive a real bank with a complex
//! exponential and work for every method, including the observers.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::filterbank::{DynFilterBank, FilterBank, Method, MethodConfig};
use crate::mixing::fuse_window;
use crate::numerics::ComplexMatrix;

/// Default number of samples driven before an empirical measurement.
pub const DEFAULT_SETTLE: u64 = 50_000_000;

/// `sin(Mπ(f-k/M)) / (M sin(π(f-k/M)))`, with value 1 at the removable singularities.
pub fn dirichlet(m: usize, f: f64, k: isize) -> f64 {
    let mf = m as f64;
    let d = f - k as f64 / mf;
    let frac = d - d.round();
    if frac.abs() < 1e-12 {
        // At d = integer the sign is (-1)^{(M-1)·d}, which is +1 for odd M.
        return 1.0;
    }
    (mf * PI * d).sin() / (mf * (PI * d).sin())
}

/// Complex response of one bin sampled on a frequency grid (cycles/sample).
#[derive(Debug, Clone)]
pub struct ResponseCurve {
    pub f_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub k: isize,
    pub config: MethodConfig,
}

impl ResponseCurve {
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn magnitude_db(&self) -> Vec<f64> {
        self.values.iter().map(|v| to_db(v.norm())).collect()
    }

    /// Writes `f,mag_db,phase_rad`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "f,mag_db,phase_rad")?;
        for (f, v) in self.f_grid.iter().zip(&self.values) {
            writeln!(out, "{f:.12e},{:.12e},{:.12e}", to_db(v.norm()), v.arg())?;
        }
        Ok(())
    }

    /// Index of the largest magnitude.
    pub fn peak_index(&self) -> usize {
        let mag = self.magnitude();
        (0..mag.len()).fold(0, |best, i| if mag[i] > mag[best] { i } else { best })
    }

    /// Main-lobe extent `(lo, hi)` in grid indices: walks out from the peak to
    /// the first local minimum on each side.
    pub fn main_lobe(&self) -> (usize, usize) {
        let mag = self.magnitude();
        let p = self.peak_index();
        let mut lo = p;
        while lo > 0 && mag[lo - 1] < mag[lo] {
            lo -= 1;
        }
        let mut hi = p;
        while hi + 1 < mag.len() && mag[hi + 1] < mag[hi] {
            hi += 1;
        }
        (lo, hi)
    }

    /// Largest magnitude outside the main lobe, in dB relative to the peak.
    pub fn peak_sidelobe_db(&self) -> f64 {
        let mag = self.magnitude();
        let (lo, hi) = self.main_lobe();
        let peak = mag[self.peak_index()];
        let side = mag
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < lo || *i > hi)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        to_db(side) - to_db(peak)
    }

    /// Width in cycles/sample between the half-power crossings around the peak,
    /// linearly interpolated on the power curve.
    pub fn half_power_width(&self) -> Option<f64> {
        let pow: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        let p = self.peak_index();
        let half = pow[p] / 2.0;
        let cross = |i: usize, j: usize| {
            let (f0, f1) = (self.f_grid[i], self.f_grid[j]);
            let t = (half - pow[i]) / (pow[j] - pow[i]);
            f0 + t * (f1 - f0)
        };
        let left = (1..=p)
            .rev()
            .find(|&i| pow[i - 1] < half)
            .map(|i| cross(i - 1, i))?;
        let right = (p..pow.len() - 1)
            .find(|&i| pow[i + 1] < half)
            .map(|i| cross(i, i + 1))?;
        Some(right - left)
    }
}

fn to_db(v: f64) -> f64 {
    20.0 * v.max(1e-300).log10()
}

/// Evenly spaced grid of `points` frequencies covering `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Open-loop bin transfer functions before mixing and windowing.
struct OpenLoop {
    method: Method,
    m: usize,
    sigma: f64,
    taps: Option<(Vec<f64>, f64)>,
}

impl OpenLoop {
    fn eval(&self, k: isize, f: f64) -> Complex64 {
        let m = self.m;
        let mf = m as f64;
        let w = 2.0 * PI * k as f64 / mf;
        let zinv = Complex64::from_polar(1.0, -2.0 * PI * f);
        // Σ_{m<M} (e^{jω_k} z^{-1})^m: comb times unit-circle resonator, cancelled exactly.
        let comb_res = || -> Complex64 {
            (0..m)
                .map(|i| Complex64::from_polar(1.0, (w - 2.0 * PI * f) * i as f64))
                .sum()
        };
        match self.method {
            Method::DirectDft | Method::SlepianDft => {
                let (taps, gain) = self.taps.as_ref().expect("direct taps");
                taps.iter()
                    .enumerate()
                    .map(|(i, t)| Complex64::from_polar(gain * t, (w - 2.0 * PI * f) * i as f64))
                    .sum()
            }
            Method::Sdft
            | Method::RecursiveModulatedSdft
            | Method::TableModulatedSdft
            | Method::SlepianModulatedSdft => comb_res() / mf,
            Method::FadingSdft | Method::FadingModulatedSdft | Method::HannFadingModulatedSdft => {
                let r_m = (self.sigma * mf).exp();
                comb_res() * ((1.0 - r_m) / mf) / (1.0 - r_m * zinv.powu(m as u32))
            }
            Method::StabilizedSdft | Method::BandPass => {
                let r = self.sigma.exp();
                let gain = if self.method == Method::BandPass {
                    1.0 - r
                } else {
                    1.0
                };
                gain / (1.0 - Complex64::from_polar(r, w) * zinv)
            }
            Method::DeadbeatObserver | Method::NonDeadbeatObserver => unreachable!(),
        }
    }
}

/// Closed-form response of bin `k` on `f_grid`, including mixing and windowing.
///
/// The reported output is the windowed bin, which equals the raw bin for
/// methods without a frequency window.
pub fn analytic_response(config: &MethodConfig, k: isize, f_grid: &[f64]) -> Result<ResponseCurve> {
    if config.method.is_observer() {
        return Err(Error::Unsupported(format!(
            "{} is closed-loop; use empirical_response",
            config.method
        )));
    }
    check_bin(config, k)?;
    let bank = FilterBank::<f64>::build(config.clone())?;
    let design = bank.design();
    let b = config.b as isize;
    let open = OpenLoop {
        method: config.method,
        m: config.m(),
        sigma: config.sigma.unwrap_or(0.0),
        taps: design
            .time_window
            .as_ref()
            .map(|w| (w.coeffs.clone(), 1.0 / w.sum())),
    };

    // Row of the combined post-analyzer matrix acting on open-loop bins.
    let row: Vec<(isize, Complex64)> = match (&design.mixing, &design.freq_window) {
        (Some(mix), Some(win)) => matrix_row(&fuse_window(mix, win)?.entries, k, b),
        (Some(mix), None) => matrix_row(&mix.entries, k, b),
        (None, Some(win)) => {
            let half = win.half_width as isize;
            if k.abs() > b - half {
                vec![(k, Complex64::new(1.0, 0.0))]
            } else {
                (-half..=half).map(|kp| (k + kp, win.coeff(kp))).collect()
            }
        }
        (None, None) => vec![(k, Complex64::new(1.0, 0.0))],
    };

    let values = f_grid
        .par_iter()
        .map(|&f| row.iter().map(|&(k1, c)| c * open.eval(k1, f)).sum())
        .collect();
    Ok(ResponseCurve {
        f_grid: f_grid.to_vec(),
        values,
        k,
        config: config.clone(),
    })
}

fn matrix_row(mat: &ComplexMatrix, k: isize, b: isize) -> Vec<(isize, Complex64)> {
    mat.row((k + b) as usize)
        .iter()
        .enumerate()
        .map(|(j, &c)| (j as isize - b, c))
        .collect()
}

fn check_bin(config: &MethodConfig, k: isize) -> Result<()> {
    if k.unsigned_abs() > config.b {
        return invalid(format!("bin {k} outside -B..=B with B = {}", config.b));
    }
    Ok(())
}

/// Measures bin `k` by driving `e^{j2πfn}` for `settle` samples, then averaging
/// `X̂(n,k)/x(n)` over one further period of `M` samples.
pub fn empirical_response(
    config: &MethodConfig,
    k: isize,
    f_grid: &[f64],
    settle: u64,
) -> Result<ResponseCurve> {
    check_bin(config, k)?;
    let proto = DynFilterBank::build(config.clone())?;
    let m = config.m() as u64;
    let values = f_grid
        .par_iter()
        .map(|&f| {
            let mut bank = proto.clone();
            let tone = |n: u64| Complex64::from_polar(1.0, 2.0 * PI * (f * n as f64).fract());
            for n in 0..settle {
                bank.advance(tone(n));
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for n in settle..settle + m {
                let x = tone(n);
                bank.advance(x);
                acc += bank.windowed_bin(k) / x;
            }
            acc / m as f64
        })
        .collect();
    Ok(ResponseCurve {
        f_grid: f_grid.to_vec(),
        values,
        k,
        config: config.clone(),
    })
}

/// Feeds a unit impulse and records the windowed bin `k` for `n = 0..len`.
pub fn impulse_response(config: &MethodConfig, k: isize, len: usize) -> Result<Vec<Complex64>> {
    if len == 0 {
        return invalid("impulse response length must be at least 1");
    }
    check_bin(config, k)?;
    let mut bank = DynFilterBank::build(config.clone())?;
    Ok((0..len)
        .map(|n| {
            bank.advance_real(if n == 0 { 1.0 } else { 0.0 });
            bank.windowed_bin(k)
        })
        .collect())
}

/// Writes `n,real,imag,mag`.
pub fn write_impulse_csv<W: Write>(mut out: W, h: &[Complex64]) -> io::Result<()> {
    writeln!(out, "n,real,imag,mag")?;
    for (n, v) in h.iter().enumerate() {
        writeln!(out, "{n},{:.12e},{:.12e},{:.12e}", v.re, v.im, v.norm())?;
    }
    Ok(())
}
