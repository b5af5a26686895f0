//! Haar-wavelet synthesis of stair-step modulating waveforms for
//! single-sideband time-modulated arrays (TMAs).
//!
//! The crate is organised bottom-up:
//!
//! * [`haar`] evaluates Haar wavelets and runs the discrete Haar transform.
//! * [`spectrum`] takes Fourier series of the wavelets and of the complex
//!   SSB pulse `h(t) = f(t) + j f(t - T0/4)`.
//! * [`array`] turns pulse harmonics and steering delays into dynamic
//!   excitations and harmonic radiation patterns.
//! * [`metrics`] reports harmonic levels, peak sideband radiation and
//!   efficiencies.
//! * [`hardware`] compiles coefficients into beamforming-network plans and
//!   SPDT switch timelines.
//! * [`export`] and [`cli`] serialize results for the `tma-haar` binary.

pub mod array;
pub mod cli;
mod error;
pub mod export;
pub mod hardware;
pub mod haar;
pub mod metrics;
pub mod spectrum;

pub use error::{Result, TmaError};
