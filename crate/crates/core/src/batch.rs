//! Order-preserving batch helpers.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it everything runs on the calling thread. Results are always in
//! input order, so output does not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::codec::{CodeWord, Codec};
use crate::error::Result;
use crate::quantizer::UnitVector;

/// Applies `f` to every item on the calling thread.
pub fn map_seq<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    items.iter().map(f).collect()
}

/// Applies `f` to every item on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_par<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map_par(items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    map_seq(items, f)
}

pub fn encode_all<V: AsRef<[f64]> + Sync>(codec: &Codec, vectors: &[V]) -> Result<Vec<CodeWord>> {
    map(vectors, |v| codec.encode_vector(v.as_ref()))
}

pub fn decode_all(codec: &Codec, codes: &[CodeWord]) -> Result<Vec<UnitVector>> {
    map(codes, |c| codec.decode_unit(c))
}
