//! Execution plumbing: data-parallel map/reduce over index ranges with a
//! sequential fallback.
//!
//! The parallel lane uses rayon and is enabled by the `parallel` feature
//! (on by default).  Results are identical between lanes and across worker
//! counts: maps collect in index order and reductions only use associative,
//! commutative combiners.

use std::ops::Range;

/// How to drive a scan or a replication sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon work-stealing over the current thread pool.  Without the
    /// `parallel` feature this degrades to the sequential lane.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Evaluate `eval` over `0..len` in chunks and combine the partial results.
///
/// `combine` must be associative and commutative with `identity()` as the
/// neutral element; then the result does not depend on the chunking or on
/// the number of workers.
pub fn reduce_chunks<T, Id, Ev, Cb>(
    len: usize,
    chunk: usize,
    mode: ExecMode,
    identity: Id,
    eval: Ev,
    combine: Cb,
) -> T
where
    T: Send,
    Id: Fn() -> T + Sync + Send,
    Ev: Fn(Range<usize>) -> T + Sync + Send,
    Cb: Fn(T, T) -> T + Sync + Send,
{
    debug_assert!(chunk > 0);
    let n_chunks = len.div_ceil(chunk.max(1));
    let piece = |ci: usize| {
        let lo = ci * chunk;
        let hi = (lo + chunk).min(len);
        eval(lo..hi)
    };
    match mode {
        ExecMode::Sequential => (0..n_chunks).map(piece).fold(identity(), &combine),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n_chunks)
                    .into_par_iter()
                    .map(piece)
                    .reduce(&identity, &combine)
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n_chunks).map(piece).fold(identity(), &combine)
            }
        }
    }
}

/// Map `0..len` and collect results in index order.
pub fn map_collect<T, F>(len: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..len).map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..len).map(f).collect()
            }
        }
    }
}

/// Run `body` on a dedicated pool with `threads` workers when the parallel
/// feature is active and a count is given; otherwise run it inline.
pub fn with_workers<T: Send>(threads: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) if n >= 1 => {
            #[cfg(feature = "parallel")]
            {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("failed to build worker pool");
                pool.install(body)
            }
            #[cfg(not(feature = "parallel"))]
            {
                body()
            }
        }
        _ => body(),
    }
}
