use std::io::{self, Write};

use num_complex::{Complex, Complex64};

use crate::numerics::Real;

/// Output of one filter-bank step. Bin `k` lives at slice index `k + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFrame<T> {
    pub n: u64,
    pub b: usize,
    pub raw: Vec<Complex<T>>,
    pub windowed: Vec<Complex<T>>,
    /// Synthesized `x̂(n+l)`.
    pub x_hat: Option<Complex<T>>,
    /// Prediction error `x(n) - x̂(n)`.
    pub err: Option<Complex<T>>,
}

impl<T: Real> SpectrumFrame<T> {
    pub fn raw_bin(&self, k: isize) -> Complex<T> {
        self.raw[(k + self.b as isize) as usize]
    }

    pub fn windowed_bin(&self, k: isize) -> Complex<T> {
        self.windowed[(k + self.b as isize) as usize]
    }

    pub fn widen(&self) -> SpectrumFrame<f64> {
        SpectrumFrame {
            n: self.n,
            b: self.b,
            raw: self.raw.iter().map(|&z| T::widen(z)).collect(),
            windowed: self.windowed.iter().map(|&z| T::widen(z)).collect(),
            x_hat: self.x_hat.map(T::widen),
            err: self.err.map(T::widen),
        }
    }
}

/// Writes frames as `n,k,raw_re,raw_im,win_re,win_im`, one row per bin.
pub fn write_frames_csv<T: Real, W: Write>(
    mut out: W,
    frames: &[SpectrumFrame<T>],
) -> io::Result<()> {
    writeln!(out, "n,k,raw_re,raw_im,win_re,win_im")?;
    for f in frames {
        for (i, (r, w)) in f.raw.iter().zip(&f.windowed).enumerate() {
            let k = i as isize - f.b as isize;
            let (r, w): (Complex64, Complex64) = (T::widen(*r), T::widen(*w));
            writeln!(
                out,
                "{},{k},{:e},{:e},{:e},{:e}",
                f.n, r.re, r.im, w.re, w.im
            )?;
        }
    }
    Ok(())
}
