//! Cross-band interference between asynchronous OFDMA links.
//!
//! - [`ofdm`]: subcarrier sets, QPSK mapping and CP-OFDM symbol construction.
//! - [`channel`]: two-link waveform simulator and DTFT probe.
//! - [`analytic`]: closed-form interference, signal, CIR and sync-error models.
//! - [`sync`]: repeated-half preamble, delay correlation, CFO estimation, multiband filter.
//! - [`mitigation`]: guardband allocation and the ISC / CSC subcarrier coders.
//! - [`harness`]: Monte Carlo campaigns built from the pieces above.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod harness;
pub mod mitigation;
pub mod ofdm;
pub mod rng;
pub mod sync;

pub use error::{Error, Result};
pub use ofdm::{FreqSymbol, LinkRole, LinkSpec, Modem, OfdmConfig, SubcarrierSet, TimeSymbol};
