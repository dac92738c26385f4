//! Data-parallel execution helpers.
//!
//! Every parallel loop in this crate goes through these helpers so that the
//! whole library can be built without rayon (`--no-default-features`) and so
//! that parallel execution can be switched off at runtime for benchmarking.
//! All helpers preserve index order in their outputs; combined with fixed
//! chunk boundaries in the callers, results are bit-identical whether work is
//! scheduled on one thread or many.

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static PARALLEL_ENABLED: AtomicBool = AtomicBool::new(true);

/// Runtime switch for parallel execution. No-op when the `parallel` feature
/// is disabled (everything runs sequentially).
pub fn set_parallel(enabled: bool) {
    #[cfg(feature = "parallel")]
    PARALLEL_ENABLED.store(enabled, Ordering::Relaxed);
    #[cfg(not(feature = "parallel"))]
    let _ = enabled;
}

pub fn parallel_enabled() -> bool {
    #[cfg(feature = "parallel")]
    {
        PARALLEL_ENABLED.load(Ordering::Relaxed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// Maps `f` over `0..n`, returning results in index order.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, returning results in slice order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Fixed chunk size used for batched gradient work. Chunk boundaries never
/// depend on the thread count, so reductions over chunk partials (performed
/// sequentially, in chunk order) are deterministic.
pub const GRAD_CHUNK: usize = 256;

/// Splits `0..len` into `[start, end)` ranges of at most `chunk` items.
pub fn chunk_ranges(len: usize, chunk: usize) -> Vec<(usize, usize)> {
    assert!(chunk > 0);
    let mut out = Vec::with_capacity(len.div_ceil(chunk));
    let mut start = 0;
    while start < len {
        let end = (start + chunk).min(len);
        out.push((start, end));
        start = end;
    }
    out
}
