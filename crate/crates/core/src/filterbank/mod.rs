//! Per-sample filter-bank runtime.
//!
//! Every method is wired from the same blocks, applied in this order on each
//! sample:
//!
//! 1. feedback subtraction `e = x - x̂` (observers only),
//! 2. pre-filter (gain, comb, or fading comb),
//! 3. analyzer bank (direct FIR, resonators, or modulator + integrator),
//! 4. mixing (stabilized method only),
//! 5. frequency-domain window,
//! 6. synthesis `x̂(n+l) = Σ_k e^{jω_k l} X̂_raw(n,k)`, latched for the next sample.

mod config;
mod dynamic;
mod frame;

pub use config::{parse_kv, Method, MethodConfig, WindowSpec};
pub use dynamic::DynFilterBank;
pub use frame::{write_frames_csv, SpectrumFrame};

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::mixing::{design_mixing_with_bound, fuse_window};
use crate::numerics::{ComplexMatrix, Real};
use crate::windows::{
    convolve_bins, slepian_freq, slepian_time, sum_of_cosine, CosineWindow, FreqWindow,
};

type C<T> = Complex<T>;

fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn omega(k: isize, m: usize) -> f64 {
    2.0 * PI * k as f64 / m as f64
}

/// Length-M ring of past inputs.
#[derive(Debug, Clone)]
struct DelayLine<T> {
    buf: Vec<C<T>>,
    pos: usize,
}

impl<T: Real> DelayLine<T> {
    fn new(len: usize) -> Self {
        Self {
            buf: vec![czero(); len],
            pos: 0,
        }
    }

    /// Stores `x` and returns the value written `len` pushes ago.
    #[inline]
    fn push(&mut self, x: C<T>) -> C<T> {
        let old = std::mem::replace(&mut self.buf[self.pos], x);
        self.pos += 1;
        if self.pos == self.buf.len() {
            self.pos = 0;
        }
        old
    }

    /// Value pushed `lag` samples ago (0 = most recent), valid for `lag < len`.
    #[inline]
    fn lagged(&self, lag: usize) -> C<T> {
        let n = self.buf.len();
        self.buf[(self.pos + n - 1 - lag) % n]
    }

    fn clear(&mut self) {
        self.buf.iter_mut().for_each(|v| *v = czero());
        self.pos = 0;
    }
}

#[derive(Debug, Clone)]
enum PreFilter<T> {
    Gain(T),
    /// `(x(n) - x(n-M))·g`
    Comb {
        gain: T,
        inputs: DelayLine<T>,
    },
    /// `g·(x(n) - x(n-M)) + r_M·v(n-M)`
    FadingComb {
        gain: T,
        r_m: T,
        inputs: DelayLine<T>,
        outputs: DelayLine<T>,
    },
}

/// With `r_M > 1/2` a decaying comb output rounds back up to the smallest
/// subnormal forever, which makes every later multiply slow.
#[inline]
fn flush_subnormal<T: Real>(v: C<T>) -> C<T> {
    let tiny = T::min_positive_value();
    let f = |x: T| if x.abs() < tiny { T::zero() } else { x };
    C::new(f(v.re), f(v.im))
}

impl<T: Real> PreFilter<T> {
    #[inline]
    fn apply(&mut self, x: C<T>) -> C<T> {
        match self {
            PreFilter::Gain(g) => x * *g,
            PreFilter::Comb { gain, inputs } => {
                let old = inputs.push(x);
                (x - old) * *gain
            }
            PreFilter::FadingComb {
                gain,
                r_m,
                inputs,
                outputs,
            } => {
                let old = inputs.push(x);
                let fed = outputs.lagged(outputs.buf.len() - 1);
                let v = flush_subnormal((x - old) * *gain + fed * *r_m);
                outputs.push(v);
                v
            }
        }
    }

    fn reset(&mut self) {
        match self {
            PreFilter::Gain(_) => {}
            PreFilter::Comb { inputs, .. } => inputs.clear(),
            PreFilter::FadingComb {
                inputs, outputs, ..
            } => {
                inputs.clear();
                outputs.clear();
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Analyzer<T> {
    /// `Σ_m taps[k][m]·x(n-m)`; taps include window and normalization.
    Direct {
        taps: Vec<C<T>>,
        inputs: DelayLine<T>,
    },
    /// `y_k(n) = v(n) + p_k·y_k(n-1)`
    Resonator { poles: Vec<C<T>>, state: Vec<C<T>> },
    /// Modulator generated by repeated multiplication, restarted at 1 each period.
    RecursiveModulator {
        steps: Vec<C<T>>,
        phasors: Vec<C<T>>,
        sums: Vec<C<T>>,
        phase: usize,
        period: usize,
    },
    /// Modulator read from a length-M table of `e^{-j2πi/M}`.
    TableModulator {
        table: Vec<C<T>>,
        strides: Vec<usize>,
        index: Vec<usize>,
        sums: Vec<C<T>>,
    },
}

impl<T: Real> Analyzer<T> {
    #[inline]
    fn update(&mut self, v: C<T>, out: &mut [C<T>]) {
        match self {
            Analyzer::Direct { taps, inputs } => {
                inputs.push(v);
                let m = inputs.buf.len();
                // newest sample sits just before `pos`
                let start = (inputs.pos + m - 1) % m;
                for (k, y) in out.iter_mut().enumerate() {
                    let row = &taps[k * m..(k + 1) * m];
                    let mut acc = czero();
                    let mut idx = start;
                    for tap in row {
                        acc += *tap * inputs.buf[idx];
                        idx = if idx == 0 { m - 1 } else { idx - 1 };
                    }
                    *y = acc;
                }
            }
            Analyzer::Resonator { poles, state } => {
                for ((s, p), y) in state.iter_mut().zip(poles.iter()).zip(out.iter_mut()) {
                    *s = v + *p * *s;
                    *y = *s;
                }
            }
            Analyzer::RecursiveModulator {
                steps,
                phasors,
                sums,
                phase,
                period,
            } => {
                for ((p, s), y) in phasors.iter().zip(sums.iter_mut()).zip(out.iter_mut()) {
                    *s += *p * v;
                    *y = p.conj() * *s;
                }
                *phase += 1;
                if *phase == *period {
                    *phase = 0;
                    phasors
                        .iter_mut()
                        .for_each(|p| *p = C::new(T::one(), T::zero()));
                } else {
                    for (p, st) in phasors.iter_mut().zip(steps.iter()) {
                        *p *= *st;
                    }
                }
            }
            Analyzer::TableModulator {
                table,
                strides,
                index,
                sums,
            } => {
                let m = table.len();
                for (((i, st), s), y) in index
                    .iter_mut()
                    .zip(strides.iter())
                    .zip(sums.iter_mut())
                    .zip(out.iter_mut())
                {
                    let p = table[*i];
                    *s += p * v;
                    *y = p.conj() * *s;
                    *i += *st;
                    if *i >= m {
                        *i -= m;
                    }
                }
            }
        }
    }

    fn reset(&mut self) {
        match self {
            Analyzer::Direct { inputs, .. } => inputs.clear(),
            Analyzer::Resonator { state, .. } => state.iter_mut().for_each(|s| *s = czero()),
            Analyzer::RecursiveModulator {
                phasors,
                sums,
                phase,
                ..
            } => {
                phasors
                    .iter_mut()
                    .for_each(|p| *p = C::new(T::one(), T::zero()));
                sums.iter_mut().for_each(|s| *s = czero());
                *phase = 0;
            }
            Analyzer::TableModulator { index, sums, .. } => {
                index.iter_mut().for_each(|i| *i = 0);
                sums.iter_mut().for_each(|s| *s = czero());
            }
        }
    }
}

#[derive(Debug, Clone)]
enum WindowStage<T> {
    None,
    Convolve {
        coeffs: Vec<C<T>>,
        half: usize,
    },
    /// Window pre-multiplied into the mixing matrix, applied to analyzer outputs.
    Fused(Vec<C<T>>),
}

/// Streaming filter bank running entirely in `T`.
#[derive(Debug, Clone)]
pub struct FilterBank<T: Real> {
    config: MethodConfig,
    prefilter: PreFilter<T>,
    analyzer: Analyzer<T>,
    mixing: Option<Vec<C<T>>>,
    window: WindowStage<T>,
    synthesis: Option<Vec<C<T>>>,
    feedback: bool,
    x_hat: C<T>,
    err: C<T>,
    n: u64,
    analyzed: Vec<C<T>>,
    raw: Vec<C<T>>,
    windowed: Vec<C<T>>,
    design: Design,
}

/// Double-precision design products kept for inspection.
#[derive(Debug, Clone, Default)]
pub struct Design {
    pub time_window: Option<crate::windows::TimeWindow>,
    pub freq_window: Option<FreqWindow>,
    pub mixing: Option<crate::mixing::MixingMatrix>,
}

fn narrow<T: Real>(z: Complex64) -> C<T> {
    T::complex(z)
}

fn matvec<T: Real>(mat: &[C<T>], v: &[C<T>], out: &mut [C<T>]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &mat[i * n..(i + 1) * n];
        let mut acc = czero();
        for (a, x) in row.iter().zip(v) {
            acc += *a * *x;
        }
        *o = acc;
    }
}

fn narrow_matrix<T: Real>(m: &ComplexMatrix) -> Vec<C<T>> {
    m.as_slice().iter().map(|&z| narrow(z)).collect()
}

impl<T: Real> FilterBank<T> {
    /// Designs windows and mixing in double precision and wires the bank.
    ///
    /// The bank runs in `T` regardless of `config.precision`; use
    /// [`DynFilterBank`] to select the type from the config.
    pub fn build(config: MethodConfig) -> Result<Self> {
        config.validate()?;
        let m = config.m();
        let b = config.b as isize;
        let nb = config.bins();
        let mf = m as f64;
        let bins = || -b..=b;
        let unit_poles: Vec<C<T>> = bins()
            .map(|k| narrow(Complex64::from_polar(1.0, omega(k, m))))
            .collect();
        let sigma = config.sigma.unwrap_or(0.0);
        let mut design = Design::default();

        let comb = || PreFilter::Comb {
            gain: T::from_f64(1.0 / mf),
            inputs: DelayLine::new(m),
        };
        let fading_comb = || {
            let r_m = (sigma * mf).exp();
            PreFilter::FadingComb {
                gain: T::from_f64((1.0 - r_m) / mf),
                r_m: T::from_f64(r_m),
                inputs: DelayLine::new(m),
                outputs: DelayLine::new(m),
            }
        };
        let table = || {
            let table = (0..m)
                .map(|i| narrow(Complex64::from_polar(1.0, -omega(i as isize, m))))
                .collect();
            Analyzer::TableModulator {
                table,
                strides: bins().map(|k| k.rem_euclid(m as isize) as usize).collect(),
                index: vec![0; nb],
                sums: vec![czero(); nb],
            }
        };
        let resonators = |poles: Vec<C<T>>| Analyzer::Resonator {
            poles,
            state: vec![czero(); nb],
        };
        let damped_poles = || -> Vec<C<T>> {
            bins()
                .map(|k| narrow(Complex64::from_polar(sigma.exp(), omega(k, m))))
                .collect()
        };

        let (prefilter, analyzer) = match config.method {
            Method::DirectDft | Method::SlepianDft => {
                let w = match &config.window {
                    Some(WindowSpec::SlepianTime { f_delta }) => slepian_time(m, *f_delta)?,
                    _ => crate::windows::TimeWindow::rectangular(m),
                };
                let gain = 1.0 / w.sum();
                let mut taps = Vec::with_capacity(nb * m);
                for k in bins() {
                    for (lag, wm) in w.coeffs.iter().enumerate() {
                        taps.push(narrow(Complex64::from_polar(
                            gain * wm,
                            omega(k * lag as isize, m),
                        )));
                    }
                }
                design.time_window = Some(w);
                (
                    PreFilter::Gain(T::one()),
                    Analyzer::Direct {
                        taps,
                        inputs: DelayLine::new(m),
                    },
                )
            }
            Method::Sdft => (comb(), resonators(unit_poles.clone())),
            Method::RecursiveModulatedSdft => (
                comb(),
                Analyzer::RecursiveModulator {
                    steps: unit_poles.iter().map(|p| p.conj()).collect(),
                    phasors: vec![C::new(T::one(), T::zero()); nb],
                    sums: vec![czero(); nb],
                    phase: 0,
                    period: m,
                },
            ),
            Method::TableModulatedSdft | Method::SlepianModulatedSdft => (comb(), table()),
            Method::DeadbeatObserver | Method::NonDeadbeatObserver => (
                PreFilter::Gain(T::from_f64(1.0 / mf)),
                resonators(unit_poles.clone()),
            ),
            Method::FadingSdft => (fading_comb(), resonators(unit_poles.clone())),
            Method::FadingModulatedSdft | Method::HannFadingModulatedSdft => {
                (fading_comb(), table())
            }
            Method::StabilizedSdft => (PreFilter::Gain(T::one()), resonators(damped_poles())),
            Method::BandPass => (
                PreFilter::Gain(T::from_f64(1.0 - sigma.exp())),
                resonators(damped_poles()),
            ),
        };

        if config.method == Method::StabilizedSdft {
            design.mixing = Some(design_mixing_with_bound(
                config.b,
                m,
                sigma,
                config.condition_bound,
            )?);
        }

        let freq_window = match &config.window {
            Some(WindowSpec::SlepianFreq { b_win, f_delta }) => {
                Some(slepian_freq(m, *b_win, *f_delta)?.normalized())
            }
            Some(WindowSpec::Hann) => Some(sum_of_cosine(&CosineWindow::Hann, m)?),
            Some(WindowSpec::Custom(c)) => {
                Some(sum_of_cosine(&CosineWindow::Custom(c.clone()), m)?)
            }
            _ => None,
        };
        let window = match (&freq_window, &design.mixing) {
            (None, _) => WindowStage::None,
            (Some(w), Some(mix)) => {
                WindowStage::Fused(narrow_matrix(&fuse_window(mix, w)?.entries))
            }
            (Some(w), None) => WindowStage::Convolve {
                coeffs: w.coeffs.iter().map(|&c| narrow(c)).collect(),
                half: w.half_width,
            },
        };
        design.freq_window = freq_window;

        let synthesis = config.l.map(|l| {
            bins()
                .map(|k| narrow(Complex64::from_polar(1.0, omega(k, m) * l as f64)))
                .collect()
        });

        Ok(Self {
            feedback: config.method.is_observer(),
            mixing: design.mixing.as_ref().map(|mx| narrow_matrix(&mx.entries)),
            prefilter,
            analyzer,
            window,
            synthesis,
            x_hat: czero(),
            err: czero(),
            n: 0,
            analyzed: vec![czero(); nb],
            raw: vec![czero(); nb],
            windowed: vec![czero(); nb],
            design,
            config,
        })
    }

    pub fn config(&self) -> &MethodConfig {
        &self.config
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    /// Number of samples consumed so far.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Consumes one sample and updates the internal spectrum buffers.
    #[inline]
    pub fn advance(&mut self, x: C<T>) {
        let e = x - self.x_hat;
        self.err = e;
        let drive = if self.feedback { e } else { x };
        let v = self.prefilter.apply(drive);

        match &self.mixing {
            Some(mix) => {
                self.analyzer.update(v, &mut self.analyzed);
                matvec(mix, &self.analyzed, &mut self.raw);
            }
            None => self.analyzer.update(v, &mut self.raw),
        }

        match &self.window {
            WindowStage::None => {}
            WindowStage::Convolve { coeffs, half } => {
                convolve_bins(coeffs, *half, &self.raw, &mut self.windowed)
            }
            WindowStage::Fused(mat) => matvec(mat, &self.analyzed, &mut self.windowed),
        }

        if let Some(c) = &self.synthesis {
            let mut acc = czero();
            for (ci, xi) in c.iter().zip(&self.raw) {
                acc += *ci * *xi;
            }
            self.x_hat = acc;
        }
        self.n += 1;
    }

    /// Raw bins `X̂_raw(n,k)`, slice index `k + B`.
    pub fn raw(&self) -> &[C<T>] {
        &self.raw
    }

    /// Windowed bins `X̂(n,k)`; identical to [`raw`](Self::raw) without a frequency window.
    pub fn windowed(&self) -> &[C<T>] {
        match self.window {
            WindowStage::None => &self.raw,
            _ => &self.windowed,
        }
    }

    pub fn raw_bin(&self, k: isize) -> C<T> {
        self.raw[(k + self.config.b as isize) as usize]
    }

    pub fn windowed_bin(&self, k: isize) -> C<T> {
        self.windowed()[(k + self.config.b as isize) as usize]
    }

    /// Latest synthesized prediction `x̂(n+l)`, if synthesis is enabled.
    pub fn prediction(&self) -> Option<C<T>> {
        self.synthesis.as_ref().map(|_| self.x_hat)
    }

    /// Latest prediction error `x(n) - x̂(n)`, if synthesis is enabled.
    pub fn error(&self) -> Option<C<T>> {
        self.synthesis.as_ref().map(|_| self.err)
    }

    pub fn step(&mut self, x: C<T>) -> SpectrumFrame<T> {
        let n = self.n;
        self.advance(x);
        SpectrumFrame {
            n,
            b: self.config.b,
            raw: self.raw.clone(),
            windowed: self.windowed().to_vec(),
            x_hat: self.prediction(),
            err: self.error(),
        }
    }

    pub fn step_real(&mut self, x: T) -> SpectrumFrame<T> {
        self.step(C::new(x, T::zero()))
    }

    pub fn process(&mut self, xs: &[C<T>]) -> Vec<SpectrumFrame<T>> {
        xs.iter().map(|&x| self.step(x)).collect()
    }

    pub fn process_real(&mut self, xs: &[T]) -> Vec<SpectrumFrame<T>> {
        xs.iter().map(|&x| self.step_real(x)).collect()
    }

    /// Returns the bank to its just-built state.
    pub fn reset(&mut self) {
        self.prefilter.reset();
        self.analyzer.reset();
        self.x_hat = czero();
        self.err = czero();
        self.n = 0;
        for buf in [&mut self.analyzed, &mut self.raw, &mut self.windowed] {
            buf.iter_mut().for_each(|v| *v = czero());
        }
    }
}

/// Mean `|e(n)|` over the frames.
pub fn quality<T: Real>(frames: &[SpectrumFrame<T>]) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::InvalidState("no frames".into()));
    }
    let mut total = 0.0;
    for f in frames {
        let e = f
            .err
            .ok_or_else(|| Error::InvalidState("synthesis disabled: no prediction error".into()))?;
        total += e.norm().to_f64();
    }
    Ok(total / frames.len() as f64)
}
