//! Classical advantage distillation over noisy qunit channels.
//!
//! Alice and Bob share `n`-level symbols that agree with probability `β₀`.
//! They run a repetition-block advantage distillation protocol over a public
//! channel, while an eavesdropper holding the purification of their noisy
//! state tries to learn the distilled symbol, either by measuring each
//! ancilla separately (incoherent) or by one collective measurement over a
//! whole block (coherent). The crate computes both attacks exactly, compares
//! error exponents, and locates the noise thresholds below which the protocol
//! stops producing a usable advantage.

pub mod adversary;
pub mod channel;
pub mod cli;
pub mod distill;
pub mod error;
pub mod fit;
pub mod matcore;
pub mod thresholds;

pub use error::{Error, Result};
