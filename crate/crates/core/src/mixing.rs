//! Mixing matrix for the stabilized fading-memory SDFT.
//!
//! A bank of damped resonators with poles `r·e^{jω_k}`, `r = e^σ`, computes
//! `y_k(n) = Σ_m e^{σm} e^{jω_k m} x(n-m)`. Fitting the sinusoidal model by
//! exponentially weighted least squares gives the spectrum estimate
//! `β̂ = ℬ⁻¹ y`, with `ℬ` the Gram matrix of the weighted basis. `H_mix = ℬ⁻¹`.

use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{condition_estimate, solve_linear, ComplexMatrix, DEFAULT_CONDITION_BOUND};
use crate::windows::FreqWindow;

/// Infinite sums are truncated once `r^m` drops below this.
pub const TRUNCATION: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    pub entries: ComplexMatrix,
    pub sigma: f64,
    pub b: usize,
    pub k: usize,
    /// Condition estimate of `ℬ`.
    pub condition: f64,
    /// Set once a frequency window has been pre-multiplied.
    pub fused_window: bool,
}

impl MixingMatrix {
    pub fn m(&self) -> usize {
        2 * self.k + 1
    }

    pub fn bins(&self) -> usize {
        2 * self.b + 1
    }

    /// Writes `# B=..,M=..,sigma=..,condition=..,fused=..` then `row,col,real,imag` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# B={},M={},sigma={:.17e},condition={:.17e},fused={}",
            self.b,
            self.m(),
            self.sigma,
            self.condition,
            self.fused_window
        )?;
        writeln!(out, "row,col,real,imag")?;
        for i in 0..self.entries.rows() {
            for j in 0..self.entries.cols() {
                let v = self.entries[(i, j)];
                writeln!(out, "{i},{j},{:.17e},{:.17e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse(msg);
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| parse_err("unexpected end of mixing csv".into()))?
                .map_err(|e| parse_err(e.to_string()))
        };

        let header = next()?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| parse_err("missing '#' header line".into()))?;
        let (mut b, mut m, mut sigma, mut condition, mut fused) = (None, None, None, None, false);
        for field in header.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| parse_err(format!("bad header field '{field}'")))?;
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|e| parse_err(format!("{key}: {e}")))
            };
            match key.trim() {
                "B" => b = Some(num(value)? as usize),
                "M" => m = Some(num(value)? as usize),
                "sigma" => sigma = Some(num(value)?),
                "condition" => condition = Some(num(value)?),
                "fused" => fused = value.trim() == "true",
                other => return Err(parse_err(format!("unknown header key '{other}'"))),
            }
        }
        let (b, m, sigma, condition) = match (b, m, sigma, condition) {
            (Some(b), Some(m), Some(s), Some(c)) => (b, m, s, c),
            _ => return Err(parse_err("header needs B, M, sigma and condition".into())),
        };
        if m % 2 == 0 || b > m / 2 {
            return invalid(format!("inconsistent header: B={b}, M={m}"));
        }
        let cols = next()?;
        if cols.trim() != "row,col,real,imag" {
            return Err(parse_err(format!("unexpected column header '{cols}'")));
        }

        let n = 2 * b + 1;
        let mut entries = ComplexMatrix::zeros(n, n);
        let mut seen = vec![false; n * n];
        for line in lines {
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(parse_err(format!("bad row '{line}'")));
            }
            let i: usize = parts[0]
                .parse()
                .map_err(|_| parse_err(format!("bad row index in '{line}'")))?;
            let j: usize = parts[1]
                .parse()
                .map_err(|_| parse_err(format!("bad col index in '{line}'")))?;
            let re: f64 = parts[2]
                .parse()
                .map_err(|_| parse_err(format!("bad real part in '{line}'")))?;
            let im: f64 = parts[3]
                .parse()
                .map_err(|_| parse_err(format!("bad imag part in '{line}'")))?;
            if i >= n || j >= n {
                return Err(parse_err(format!("entry ({i},{j}) outside {n}x{n}")));
            }
            entries[(i, j)] = Complex64::new(re, im);
            seen[i * n + j] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(parse_err("mixing csv is missing entries".into()));
        }
        Ok(Self {
            entries,
            sigma,
            b,
            k: m / 2,
            condition,
            fused_window: fused,
        })
    }
}

fn check(b: usize, m: usize, sigma: f64) -> Result<()> {
    if m.is_multiple_of(2) {
        return invalid(format!("M must be odd, got {m}"));
    }
    if b > m / 2 {
        return invalid(format!("B = {b} exceeds K = {}", m / 2));
    }
    if sigma.is_nan() || sigma >= 0.0 {
        return invalid(format!("sigma must be negative, got {sigma}"));
    }
    Ok(())
}

fn omega(k: isize, m: usize) -> f64 {
    2.0 * PI * k as f64 / m as f64
}

/// `ℬ_{k₂,k₁} = 1 / (1 - e^{σ + j(ω_{k₂} - ω_{k₁})})`, indices `k = -B…+B`.
pub fn gram_matrix(b: usize, m: usize, sigma: f64) -> Result<ComplexMatrix> {
    check(b, m, sigma)?;
    let n = 2 * b + 1;
    let mut g = ComplexMatrix::zeros(n, n);
    let one = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in i..n {
            let d = omega(i as isize - j as isize, m);
            let v = one / (one - Complex64::from_polar(sigma.exp(), d));
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

pub fn design_mixing(b: usize, m: usize, sigma: f64) -> Result<MixingMatrix> {
    design_mixing_with_bound(b, m, sigma, DEFAULT_CONDITION_BOUND)
}

/// `H_mix = ℬ⁻¹`; fails if the condition estimate of `ℬ` exceeds `bound`.
pub fn design_mixing_with_bound(
    b: usize,
    m: usize,
    sigma: f64,
    bound: f64,
) -> Result<MixingMatrix> {
    let g = gram_matrix(b, m, sigma)?;
    let condition = condition_estimate(&g)?;
    let entries = solve_linear(&g, &ComplexMatrix::identity(g.rows()), bound)?;
    Ok(MixingMatrix {
        entries,
        sigma,
        b,
        k: m / 2,
        condition,
        fused_window: false,
    })
}

/// Pre-multiplies a banded window matrix: `H_win·H_mix`.
///
/// Row `k` of `H_win` holds `c(k')` at column `k + k'`; rows within
/// `B_win` of either edge are identity rows.
pub fn fuse_window(mix: &MixingMatrix, win: &FreqWindow) -> Result<MixingMatrix> {
    if win.half_width > mix.b {
        return invalid(format!("B_win = {} exceeds B = {}", win.half_width, mix.b));
    }
    if win.m != mix.m() {
        return invalid(format!(
            "window designed for M = {}, mixing for M = {}",
            win.m,
            mix.m()
        ));
    }
    let n = mix.bins();
    let hw = win.half_width;
    let h_win = ComplexMatrix::from_fn(n, n, |i, j| {
        if i < hw || i + hw >= n {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        } else if j + hw >= i && j <= i + hw {
            win.coeffs[j + hw - i]
        } else {
            Complex64::default()
        }
    });
    Ok(MixingMatrix {
        entries: h_win.matmul(&mix.entries)?,
        fused_window: true,
        ..mix.clone()
    })
}

/// Closed-form frequency response of mixed bin `k` at `f` cycles/sample.
pub fn mixed_response(mix: &MixingMatrix, k: isize, f: f64) -> Complex64 {
    let r = mix.sigma.exp();
    let m = mix.m();
    let row = (k + mix.b as isize) as usize;
    let zinv = Complex64::from_polar(1.0, -2.0 * PI * f);
    let one = Complex64::new(1.0, 0.0);
    (0..mix.bins())
        .map(|j| {
            let pole = Complex64::from_polar(r, omega(j as isize - mix.b as isize, m));
            mix.entries[(row, j)] / (one - pole * zinv)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalityReport {
    /// `max |Σ_m h*_{k₂}(m) h_{k₁}(m) - δ|` over all bin pairs.
    pub gram_deviation: f64,
    /// Same, restricted to `k₁ = k₂`.
    pub diagonal_deviation: f64,
    /// `max |Σ_m h_{k₂}(m) e^{-jω_{k₁}m} - δ|`: each mixed bin against the undamped basis.
    pub dual_deviation: f64,
    /// `max |H_{k₂}(k₁/M) - δ|` from the closed-form response.
    pub interpolation_deviation: f64,
    pub terms: usize,
    pub tolerance: f64,
}

impl OrthonormalityReport {
    pub fn orthonormal(&self) -> bool {
        self.gram_deviation <= self.tolerance
    }

    pub fn interpolating(&self) -> bool {
        self.interpolation_deviation <= self.tolerance && self.dual_deviation <= self.tolerance
    }
}

/// Measures orthonormality and bin interpolation of the mixed analyzers
/// `h_k(m) = Σ_{k₁} H_mix[k,k₁]·(r e^{jω_{k₁}})^m`.
pub fn orthonormality_check(mix: &MixingMatrix, tolerance: f64) -> Result<OrthonormalityReport> {
    if mix.fused_window {
        return invalid("orthonormality is defined for the unfused mixing matrix");
    }
    let n = mix.bins();
    let m_len = mix.m();
    let terms = (TRUNCATION.ln() / mix.sigma).ceil() as usize + 1;

    let poles: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(mix.sigma.exp(), omega(j as isize - mix.b as isize, m_len)))
        .collect();
    let mut h = vec![Complex64::default(); n * terms];
    let mut powers = vec![Complex64::new(1.0, 0.0); n];
    for m in 0..terms {
        for i in 0..n {
            h[i * terms + m] = mix
                .entries
                .row(i)
                .iter()
                .zip(&powers)
                .map(|(a, p)| a * p)
                .sum();
        }
        for (p, pole) in powers.iter_mut().zip(&poles) {
            *p *= pole;
        }
    }

    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let (mut gram_dev, mut diag_dev, mut dual_dev, mut interp_dev) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k2 in 0..n {
        let h2 = &h[k2 * terms..(k2 + 1) * terms];
        for k1 in 0..n {
            let h1 = &h[k1 * terms..(k1 + 1) * terms];
            let g: Complex64 = h2.iter().zip(h1).map(|(a, b)| a.conj() * b).sum();
            let dev = (g - delta(k1, k2)).norm();
            gram_dev = gram_dev.max(dev);
            if k1 == k2 {
                diag_dev = diag_dev.max(dev);
            }

            let step = Complex64::from_polar(1.0, -omega(k1 as isize - mix.b as isize, m_len));
            let mut rot = Complex64::new(1.0, 0.0);
            let mut dual = Complex64::default();
            for v in h2 {
                dual += v * rot;
                rot *= step;
            }
            dual_dev = dual_dev.max((dual - delta(k1, k2)).norm());

            let f = (k1 as f64 - mix.b as f64) / m_len as f64;
            let resp = mixed_response(mix, k2 as isize - mix.b as isize, f);
            interp_dev = interp_dev.max((resp - delta(k1, k2)).norm());
        }
    }
    Ok(OrthonormalityReport {
        gram_deviation: gram_dev,
        diagonal_deviation: diag_dev,
        dual_deviation: dual_dev,
        interpolation_deviation: interp_dev,
        terms,
        tolerance,
    })
}
