//! Degree-recency-biased preferential attachment (DRPA).
//!
//! Nodes arrive one per step and attach to existing node `i` with probability
//! proportional to `k_i * R_i`, where `R_i = ((k_i(t) - k_i(t - r)) / k_i(t))^beta`
//! is the fraction of the node's degree gained during the last `r` steps.
//! `beta = 0` is classical preferential attachment and `beta = 1` selects purely
//! on recent degree change.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides:
//!
//! * [`growth`]: the growth engine and its degree history,
//! * [`metrics`]: degree ranks, rank-arrival differences, the rank change index
//!   and degree-distribution moments,
//! * [`fitdist`]: discrete power-law / log-normal / exponential tail fits with
//!   log-likelihood ratio comparisons,
//! * [`analytic`]: the continuous-time recency model, its asymptotic selection
//!   probability and the recency-dominance threshold.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
mod error;
pub mod fitdist;
pub mod growth;
pub mod metrics;
pub mod special;

pub use error::{Error, Result};

/// Node identifier. Nodes are numbered by arrival, starting at 1.
pub type NodeId = u32;

/// Global step counter. One step is one node arrival.
pub type Step = u32;
