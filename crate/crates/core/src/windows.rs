//! Window design: time-domain Slepian windows, frequency-domain Slepian
//! windows restricted to a few bins, and sum-of-cosine frequency windows.
//!
//! Frequency windows carry their coefficients already multiplied by the
//! causal phase factor `e^{-j2πkK/M}`, so that with analyzers
//! `b_k(m) = e^{+j2πmk/M}` the windowed spectrum
//!
//! ```text
//! X̂(k) = Σ_{k'} c(k') · X_raw(k + k')
//! ```
//!
//! is exactly the direct DFT taken with the time window
//! `w(m) = Σ_{k'} c(k') e^{j2πmk'/M}`, `m = 0…M-1` (see [`freq_to_time`]).

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::{Complex, Complex64};

use crate::error::{invalid, Result};
use crate::numerics::{eig_sym, ComplexMatrix, Real, RealMatrix};

/// Default time-Slepian half-bandwidth, in bins.
pub const DEFAULT_TIME_SLEPIAN_BINS: f64 = 2.0;
/// Default frequency-Slepian half-bandwidth, in bins.
pub const DEFAULT_FREQ_SLEPIAN_BINS: f64 = 3.0;

/// Causal real window `w(m)`, `m = 0…M-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindow {
    pub coeffs: Vec<f64>,
    /// Design half-bandwidth (cycles/sample), if the window was designed for one.
    pub f_delta: Option<f64>,
    /// Power concentration inside `|f| ≤ f_delta`.
    pub alpha: Option<f64>,
}

impl TimeWindow {
    pub fn rectangular(m: usize) -> Self {
        Self {
            coeffs: vec![1.0; m],
            f_delta: None,
            alpha: None,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,real,imag")?;
        for (m, w) in self.coeffs.iter().enumerate() {
            writeln!(out, "{m},{w:.17e},0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqWindowKind {
    Hann,
    SlepianFreq,
    Custom,
}

/// Frequency-domain window applied by convolution across bins.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqWindow {
    pub kind: FreqWindowKind,
    /// Nominal DFT length `M` the phase factor was computed for.
    pub m: usize,
    pub half_width: usize,
    /// Real coefficients `w̃(k)`, `k = -B_win…+B_win`.
    pub raw_coeffs: Vec<f64>,
    /// `w̃(k)·e^{-j2πkK/M}`, same indexing as `raw_coeffs`.
    pub coeffs: Vec<Complex64>,
    pub f_delta: Option<f64>,
    pub alpha: Option<f64>,
}

impl FreqWindow {
    fn from_raw(kind: FreqWindowKind, m: usize, raw: Vec<f64>) -> Self {
        let half_width = raw.len() / 2;
        let k_max = (m / 2) as f64;
        let coeffs = raw
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let k = i as f64 - half_width as f64;
                Complex64::from_polar(w, -2.0 * PI * k * k_max / m as f64)
            })
            .collect();
        Self {
            kind,
            m,
            half_width,
            raw_coeffs: raw,
            coeffs,
            f_delta: None,
            alpha: None,
        }
    }

    /// Raw coefficient `w̃(k)`.
    pub fn raw(&self, k: isize) -> f64 {
        self.raw_coeffs[(k + self.half_width as isize) as usize]
    }

    /// Phase-corrected coefficient for bin offset `k`.
    pub fn coeff(&self, k: isize) -> Complex64 {
        self.coeffs[(k + self.half_width as isize) as usize]
    }

    /// Rescaled copy with `w̃(0) = 1` (unity gain at the analysis bin).
    pub fn normalized(&self) -> Self {
        let c0 = self.raw(0);
        let mut out = self.clone();
        if c0 != 0.0 {
            out.raw_coeffs.iter_mut().for_each(|w| *w /= c0);
            out.coeffs.iter_mut().for_each(|w| *w /= c0);
        }
        out
    }

    /// Complex time-domain equivalent `Σ c(k) e^{j2πmk/M}`, `m = 0…M-1`.
    pub fn implied_time_response(&self) -> Vec<Complex64> {
        let m_len = self.m as f64;
        (0..self.m)
            .map(|m| {
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let k = i as f64 - self.half_width as f64;
                        c * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * k / m_len)
                    })
                    .sum()
            })
            .collect()
    }

    /// Windows a full bank of bins `k = -B…+B` in double precision.
    pub fn apply(&self, raw: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); raw.len()];
        convolve_bins(&self.coeffs, self.half_width, raw, &mut out);
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,real,imag")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as isize - self.half_width as isize;
            writeln!(out, "{k},{:.17e},{:.17e}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Frequency-domain windowing of bins `k = -B…+B` (slice index `k + B`).
///
/// Bins closer than `half` to either edge are copied through unwindowed.
pub fn convolve_bins<T: Real>(
    coeffs: &[Complex<T>],
    half: usize,
    raw: &[Complex<T>],
    out: &mut [Complex<T>],
) {
    let n = raw.len();
    for i in 0..n {
        if i < half || i + half >= n {
            out[i] = raw[i];
            continue;
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, c) in coeffs.iter().enumerate() {
            acc += *c * raw[i + j - half];
        }
        out[i] = acc;
    }
}

fn check_length(m: usize) -> Result<()> {
    if m == 0 || m.is_multiple_of(2) {
        return invalid(format!("window length must be odd and positive, got {m}"));
    }
    Ok(())
}

fn check_band(f_delta: f64) -> Result<()> {
    if !(f_delta > 0.0 && f_delta <= 0.5) {
        return invalid(format!("f_delta must lie in (0, 1/2], got {f_delta}"));
    }
    Ok(())
}

/// Band-power matrix `Q`: `sin(2π(m₂-m₁)f_Δ)/(π(m₂-m₁))`, diagonal `2f_Δ`.
pub fn band_power_matrix(m: usize, f_delta: f64) -> RealMatrix {
    RealMatrix::from_fn(m, m, |r, c| {
        if r == c {
            2.0 * f_delta
        } else {
            let d = r as f64 - c as f64;
            (2.0 * PI * d * f_delta).sin() / (PI * d)
        }
    })
}

/// Slepian (first DPSS) window of odd length `m`, delayed to be causal.
pub fn slepian_time(m: usize, f_delta: f64) -> Result<TimeWindow> {
    check_length(m)?;
    check_band(f_delta)?;
    let eig = eig_sym(&band_power_matrix(m, f_delta))?;
    let mut w = eig.vector(0);
    if w.iter().sum::<f64>() < 0.0 {
        w.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(TimeWindow {
        coeffs: w,
        f_delta: Some(f_delta),
        alpha: Some(eig.values[0].clamp(0.0, 1.0)),
    })
}

/// `(1/M)·F†QF` for the non-causal basis `F(m,k) = e^{j2πmk/M}`, `m = -K…K`.
pub fn freq_gram(m: usize, half_width: usize, f_delta: f64) -> Result<ComplexMatrix> {
    check_length(m)?;
    check_band(f_delta)?;
    let k_max = m / 2;
    if half_width > k_max {
        return invalid(format!("B_win = {half_width} exceeds K = {k_max}"));
    }
    let nb = 2 * half_width + 1;
    let q = band_power_matrix(m, f_delta);
    let f = ComplexMatrix::from_fn(m, nb, |r, c| {
        let t = r as f64 - k_max as f64;
        let k = c as f64 - half_width as f64;
        Complex64::from_polar(1.0, 2.0 * PI * t * k / m as f64)
    });
    let qf = q.to_complex().matmul(&f)?;
    let g = f.conj_transpose().matmul(&qf)?;
    Ok(g.scaled(Complex64::new(1.0 / m as f64, 0.0)))
}

/// Frequency-domain Slepian window with `2·half_width + 1` bins.
///
/// Raw coefficients are scaled so the implied time window has unit energy,
/// which makes `half_width = K` reproduce [`slepian_time`] exactly. Use
/// [`FreqWindow::normalized`] for unity gain at the analysis bin.
pub fn slepian_freq(m: usize, half_width: usize, f_delta: f64) -> Result<FreqWindow> {
    if half_width == 0 {
        return invalid("B_win must be at least 1");
    }
    let g = freq_gram(m, half_width, f_delta)?;
    let eig = eig_sym(&g.real_part())?;
    let scale = 1.0 / (m as f64).sqrt();
    let mut raw: Vec<f64> = eig.vector(0).iter().map(|v| v * scale).collect();
    if raw[half_width] < 0.0 {
        raw.iter_mut().for_each(|v| *v = -*v);
    }
    let mut win = FreqWindow::from_raw(FreqWindowKind::SlepianFreq, m, raw);
    win.f_delta = Some(f_delta);
    win.alpha = Some(eig.values[0].clamp(0.0, 1.0));
    Ok(win)
}

/// Sum-of-cosine window shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum CosineWindow {
    Hann,
    /// Raw `w̃(k)` for `k = -B_win…+B_win`; odd count, centre equal to 1.
    Custom(Vec<f64>),
}

pub fn sum_of_cosine(kind: &CosineWindow, m: usize) -> Result<FreqWindow> {
    check_length(m)?;
    match kind {
        CosineWindow::Hann => Ok(FreqWindow::from_raw(
            FreqWindowKind::Hann,
            m,
            vec![0.5, 1.0, 0.5],
        )),
        CosineWindow::Custom(raw) => {
            if raw.len() % 2 == 0 {
                return invalid(format!(
                    "custom window needs an odd coefficient count, got {}",
                    raw.len()
                ));
            }
            if raw.len() > m {
                return invalid("custom window wider than the DFT");
            }
            let centre = raw[raw.len() / 2];
            if (centre - 1.0).abs() > 1e-12 {
                return invalid(format!(
                    "custom window centre coefficient must be 1, got {centre}"
                ));
            }
            if raw.iter().any(|v| !v.is_finite()) {
                return invalid("custom window coefficients must be finite");
            }
            Ok(FreqWindow::from_raw(FreqWindowKind::Custom, m, raw.clone()))
        }
    }
}

/// Rayleigh quotient `wᵀQw / wᵀw`.
pub fn concentration(window: &TimeWindow, f_delta: f64) -> Result<f64> {
    check_band(f_delta)?;
    let n = window.len();
    if n == 0 {
        return invalid("empty window");
    }
    let w = &window.coeffs;
    let energy: f64 = w.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return invalid("zero window");
    }
    let q = band_power_matrix(n, f_delta);
    let mut num = 0.0;
    for i in 0..n {
        num += w[i] * q.row(i).iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok((num / energy).clamp(0.0, 1.0))
}

/// Causal time-domain equivalent of a frequency window.
///
/// Returns the real part of [`FreqWindow::implied_time_response`]; it is
/// purely real for even-symmetric `w̃`.
pub fn freq_to_time(window: &FreqWindow, m: usize) -> Result<TimeWindow> {
    check_length(m)?;
    if m != window.m {
        return invalid(format!(
            "window designed for M = {}, asked for M = {m}",
            window.m
        ));
    }
    if window.half_width > m / 2 {
        return invalid("B_win exceeds K");
    }
    let coeffs: Vec<f64> = window
        .implied_time_response()
        .iter()
        .map(|z| z.re)
        .collect();
    let mut out = TimeWindow {
        coeffs,
        f_delta: window.f_delta,
        alpha: None,
    };
    if let Some(fd) = window.f_delta {
        out.alpha = Some(concentration(&out, fd)?);
    }
    Ok(out)
}
