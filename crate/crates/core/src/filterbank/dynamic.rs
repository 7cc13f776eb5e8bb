use num_complex::Complex64;

use super::{FilterBank, MethodConfig, SpectrumFrame};
use crate::error::Result;
use crate::numerics::{Precision, Real};

/// A filter bank whose arithmetic width is chosen from `config.precision`.
///
/// Inputs arrive in double precision and are narrowed exactly once.
#[derive(Debug, Clone)]
pub enum DynFilterBank {
    Single(FilterBank<f32>),
    Double(FilterBank<f64>),
}

macro_rules! dispatch {
    ($self:expr, $bank:ident => $body:expr) => {
        match $self {
            DynFilterBank::Single($bank) => $body,
            DynFilterBank::Double($bank) => $body,
        }
    };
}

impl DynFilterBank {
    pub fn build(config: MethodConfig) -> Result<Self> {
        Ok(match config.precision {
            Precision::Single => DynFilterBank::Single(FilterBank::build(config)?),
            Precision::Double => DynFilterBank::Double(FilterBank::build(config)?),
        })
    }

    pub fn config(&self) -> &MethodConfig {
        dispatch!(self, b => b.config())
    }

    pub fn n(&self) -> u64 {
        dispatch!(self, b => b.n())
    }

    #[inline]
    pub fn advance(&mut self, x: Complex64) {
        match self {
            DynFilterBank::Single(b) => b.advance(f32::complex(x)),
            DynFilterBank::Double(b) => b.advance(x),
        }
    }

    #[inline]
    pub fn advance_real(&mut self, x: f64) {
        self.advance(Complex64::new(x, 0.0))
    }

    pub fn raw_bin(&self, k: isize) -> Complex64 {
        match self {
            DynFilterBank::Single(b) => f32::widen(b.raw_bin(k)),
            DynFilterBank::Double(b) => b.raw_bin(k),
        }
    }

    pub fn windowed_bin(&self, k: isize) -> Complex64 {
        match self {
            DynFilterBank::Single(b) => f32::widen(b.windowed_bin(k)),
            DynFilterBank::Double(b) => b.windowed_bin(k),
        }
    }

    pub fn step(&mut self, x: Complex64) -> SpectrumFrame<f64> {
        match self {
            DynFilterBank::Single(b) => b.step(f32::complex(x)).widen(),
            DynFilterBank::Double(b) => b.step(x),
        }
    }

    pub fn process(&mut self, xs: &[Complex64]) -> Vec<SpectrumFrame<f64>> {
        xs.iter().map(|&x| self.step(x)).collect()
    }

    pub fn reset(&mut self) {
        dispatch!(self, b => b.reset())
    }
}
