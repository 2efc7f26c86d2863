//! Simulator and exponent calculator for 2-hop noisy teaching.
//!
//! A source bit `theta` reaches a teacher through a binary-input channel
//! `P`; the teacher relays bits to a student through a second channel `Q`,
//! and the student guesses `theta` after `n` uses. The crate provides
//!
//! - [`channel`]: binary-input DMCs, the BSC and reverse Z-channel, cascades;
//! - [`exponent`]: tilted Bhattacharyya coefficients and the achievable and
//!   converse learning rates built from them;
//! - [`protocol`]: block-structured teachers and the forwarding baselines;
//! - [`decoder`]: the linear-time maximum-likelihood student and majority
//!   decoding;
//! - [`harness`]: seeded parallel Monte Carlo, exponent fitting and exact
//!   single-block enumeration;
//! - [`cli`]: the `twohop` command-line tool.
//!
//! ```
//! use twohop::channel::make_bsc;
//! use twohop::exponent::{binary_kl, two_hop_rate};
//!
//! let r = two_hop_rate(&make_bsc(0.2).unwrap(), &make_bsc(0.3).unwrap(), false);
//! assert!((r.rate - binary_kl(0.5, 0.3).unwrap()).abs() < 1e-9);
//! ```

pub mod channel;
pub mod cli;
pub mod decoder;
pub mod error;
pub mod exponent;
pub mod harness;
pub mod protocol;

pub use error::{Error, Result};

#[cfg(test)]
mod testutil;
