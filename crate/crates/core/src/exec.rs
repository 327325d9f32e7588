//! Batch execution: identical work units run either across the rayon pool
//! (feature `parallel`, the default) or on the calling thread. Results come
//! back in index order and reductions happen sequentially afterwards, so both
//! lanes produce bit-identical output.

/// Map `f` over `0..count`, preserving order. Parallel lane.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Map `f` over `0..count`, preserving order. Sequential fallback.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    map_indexed_seq(count, f)
}

/// Always-sequential lane, kept callable under every feature set so the two
/// lanes can be compared directly (tests assert equality, benches measure).
pub(crate) fn map_indexed_seq<T: Send>(
    count: usize,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    (0..count).map(f).collect()
}
