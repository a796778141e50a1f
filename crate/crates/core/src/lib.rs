//! Information content of multipulse radar measurements.
//!
//! The crate computes how many bits a coherent pulse train delivers about a
//! point target:
//!
//! | Module | Quantity |
//! |--------|----------|
//! | [`sigmodel`] | steering vectors, ambiguity kernel, RMS spreads |
//! | [`posterior`] | synthetic observations and the gridded (delay, Doppler) posterior |
//! | [`infometrics`] | range-Doppler mutual information, its high-SNR bound, entropy error |
//! | [`scatterinfo`] | Doppler scattering information from the slow-time correlation spectrum |
//! | [`specfun`] | `ln I0`, `J0`, `sinc` |
//!
//! All delays are expressed in samples and all Doppler shifts in cycles per
//! sample. Information is reported in bits.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure
//! function of its inputs, so Monte Carlo trials can be farmed out to any
//! executor; see [`infometrics::mi_trial`].
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod eigen;
mod error;
pub mod infometrics;
pub mod posterior;
pub mod rng;
pub mod scatterinfo;
pub mod sigmodel;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use infometrics::{EeResult, InfoEstimate, MonteCarloSpec, TruthMode};
pub use posterior::{NoiseSpec, PosteriorGrid, PosteriorSummary, PriorRect};
pub use scatterinfo::{CorrelationMatrix, EigenSpectrum, ModelKind, ScatteringModel};
pub use sigmodel::{PulseTrainConfig, SpreadConstants};

/// `log2(x)`; `libm` has it but spelling it out keeps call sites short.
#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}
