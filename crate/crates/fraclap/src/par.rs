//! Feature-gated parallel mapping helpers.
//!
//! Each output slot is an independent fixed-order reduction, so the parallel
//! and sequential variants produce bitwise identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over the inclusive index range `lo..=hi`.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<F>(lo: i64, hi: i64, f: F) -> Vec<f64>
where
    F: Fn(i64) -> f64 + Sync + Send,
{
    (lo..=hi).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<F>(lo: i64, hi: i64, f: F) -> Vec<f64>
where
    F: Fn(i64) -> f64 + Sync + Send,
{
    (lo..=hi).map(f).collect()
}

/// Sequential variant, kept available for benchmarks against the parallel path.
pub(crate) fn map_range_seq<F>(lo: i64, hi: i64, f: F) -> Vec<f64>
where
    F: Fn(i64) -> f64 + Sync + Send,
{
    (lo..=hi).map(f).collect()
}

/// Maps `f` over a slice of inputs.
#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
