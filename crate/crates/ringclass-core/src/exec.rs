//! Deterministic data parallelism. With the `parallel` feature the maps run
//! on the rayon pool; results are always assembled in index order, so sums
//! taken over them are identical for every thread count.

use alloc::vec::Vec;

/// `(0..n).map(f).collect()`, possibly in parallel.
#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Fixed chunk length for blocked sums; chunk boundaries never depend on the
/// thread count.
pub(crate) const CHUNK: usize = 4096;

/// `Σ_{i < n} f(i)`, summed within fixed chunks and then across chunks in
/// order.
pub(crate) fn chunked_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    map_indices(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    })
    .into_iter()
    .sum()
}
