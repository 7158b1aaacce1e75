//! LP decoding of regular LDPC codes over memoryless binary-input
//! output-symmetric (MBIOS) channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`tanner`] builds and measures `(d_L, d_R)`-regular Tanner graphs.
//! * [`channel`] models the BSC and BI-AWGN channels and their LLRs.
//! * [`lp`] builds the fundamental polytope and solves the decoding LP with a
//!   Bland's-rule simplex, either in exact rational arithmetic or in `f64`.
//! * [`deviation`] certifies local optimality of a codeword via the
//!   skinny-tree min-sum recursion, and provides graph-cover utilities.
//! * [`density`] is the quantized density engine for the `(T, ω)` tree process.
//! * [`bounds`] evaluates the contraction conditions, the `σ₀` thresholds and
//!   the resulting word-error bounds.
//! * [`sim`] holds the Monte Carlo oracles used to check the analytic side.

pub mod bounds;
pub mod channel;
pub mod density;
pub mod deviation;
mod error;
pub mod lp;
pub mod numeric;
pub mod sim;
pub mod tanner;

pub use error::{Error, Result};
