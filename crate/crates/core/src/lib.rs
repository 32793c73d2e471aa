//! Deterministic vector quantization of unit vectors with a guaranteed
//! additive inner-product error.
//!
//! Vectors are rounded to a grid of resolution `delta / sqrt(d)`
//! ([`quantizer`]), and the resulting integer vector is stored in
//! `d + ceil(log2 C(s + d, d))` bits using sign bits plus an enumerative rank
//! ([`codec`]). For every pair of unit vectors the decoded inner product is
//! within `||x - y|| delta + delta^2 / 2` of the true one, which supports
//! both additive-error estimation and exact `(alpha, beta)` threshold filtering
//! ([`estimator`]). [`bounds`] computes the matching space lower bounds.

pub mod batch;
pub mod bounds;
pub mod codec;
pub mod dataio;
mod error;
pub mod estimator;
pub mod eval;
pub mod quantizer;

pub use codec::{code_length, CodeWord, Codec, CompositionIndex};
pub use error::{Error, Result};
pub use estimator::{distinguish, estimate_inner, filter_pairs, worst_case_error, PairVerdict};
pub use quantizer::{
    plan_distinguish, plan_estimate, quantize, reconstruct, shared_grid_ok, Delta, GridParams,
    ThresholdSpec, UnitVector, ZVector,
};
