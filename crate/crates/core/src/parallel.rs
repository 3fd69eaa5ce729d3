//! Worker-count-invariant parallel reduction.
//!
//! Replicate loops here must produce bit-identical results whether they run
//! on 1 or 64 threads. The index range is split into fixed-size chunks; each
//! chunk is folded sequentially in index order (possibly on different
//! workers), and the chunk results are merged in chunk order. Nothing about
//! the schedule can reorder a floating-point operation.

use rayon::prelude::*;

/// Fixed chunk size for all replicate loops. Small enough to keep a few
/// dozen workers busy on short runs, large enough that per-chunk overhead is
/// noise.
pub const CHUNK: usize = 64;

/// Folds `0..total` into an accumulator deterministically.
///
/// `fold_index` is called with strictly increasing indices within a chunk;
/// `merge` combines chunk accumulators left to right in chunk order. On
/// error, the failure with the smallest chunk index wins, so error reporting
/// is deterministic too.
pub fn deterministic_fold<A, E, FInit, FFold, FMerge>(
    total: usize,
    init: FInit,
    fold_index: FFold,
    mut merge: FMerge,
) -> Result<A, E>
where
    A: Send,
    E: Send,
    FInit: Fn() -> A + Sync,
    FFold: Fn(&mut A, usize) -> Result<(), E> + Sync,
    FMerge: FnMut(&mut A, A),
{
    let n_chunks = total.div_ceil(CHUNK).max(1);
    let chunk_results: Vec<Result<A, E>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(total);
            for index in lo..hi {
                fold_index(&mut acc, index)?;
            }
            Ok(acc)
        })
        .collect();

    let mut out: Option<A> = None;
    for result in chunk_results {
        let acc = result?;
        match &mut out {
            None => out = Some(acc),
            Some(o) => merge(o, acc),
        }
    }
    Ok(out.unwrap_or_else(init))
}

/// Runs `op` on a rayon pool with exactly `workers` threads (0 keeps the
/// current/global pool).
pub fn with_workers<T: Send>(workers: usize, op: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return op();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(op)
}
