//! Loosely synchronous (LS) spreading codes built from Golay complementary
//! pairs, together with the digital BPSK transmit chain and a simulated
//! code-division 2x2 MIMO channel sounder.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and everything else that touches the operating system live in the
//! companion `lscode` crate.
//!
//! Module map:
//!
//! - [`golay`]: Golay complementary pairs, mates and exact aperiodic correlation.
//! - [`lscode`]: the LS code tree and zero-gap code assembly.
//! - [`correlation`]: combined (C-part plus S-part) correlation, profiles and
//!   interference-free window measurement.
//! - [`txchain`]: RRC pulse shaping, fs/4 up-conversion, Q1.15 quantization,
//!   DAC image spectrum and ROM word formatting.
//! - [`channel`]: tapped-delay-line 2x2 channel and seeded AWGN.
//! - [`sounder`]: sliding-correlator receiver, CIR metrics and constellation.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod channel;
pub mod correlation;
mod error;
pub mod fft;
pub mod golay;
pub mod lscode;
pub mod sounder;
pub mod txchain;

pub use error::{Error, Result};
