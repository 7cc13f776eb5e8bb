//! Recursive and non-recursive DFT filter banks for low-latency streaming
//! spectrum analysis.
//!
//! The crate is split into design-time modules that always run in double
//! precision ([`numerics`], [`windows`], [`mixing`]) and the streaming
//! runtime ([`filterbank`]) that runs in `f32` or `f64`. [`response`]
//! evaluates analytic and measured frequency and impulse responses.

pub mod error;
pub mod filterbank;
pub mod mixing;
pub mod numerics;
pub mod response;
pub mod windows;

pub use error::{Error, Result};
pub use filterbank::{
    quality, DynFilterBank, FilterBank, Method, MethodConfig, SpectrumFrame, WindowSpec,
};
pub use numerics::{Precision, Real};
