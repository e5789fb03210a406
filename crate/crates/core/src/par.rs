//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on the rayon pool. Without it,
//! or inside [`sequential`], they are plain iterator loops. Output order is
//! always the input order, so results do not depend on the execution mode.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper in this module forced onto the calling thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let previous = FORCE_SEQUENTIAL.with(|flag| flag.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|flag| flag.set(previous));
    out
}

/// True when helpers called from this thread will use the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|flag| flag.get())
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Maps `f` over `0..n` and folds the results with `combine`.
///
/// The fold order is fixed (left to right over the mapped values) so the
/// floating point result is identical in both modes.
pub fn map_reduce<R, F, C>(n: usize, f: F, init: R, combine: C) -> R
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
    C: Fn(R, R) -> R,
{
    map_range(n, f).into_iter().fold(init, combine)
}

/// Calls `f(k, chunk)` for every `chunk`-sized piece of `data`, where `k` is
/// the chunk index.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        let min_len = (4096 / chunk).max(1);
        data.par_chunks_mut(chunk).with_min_len(min_len).enumerate().for_each(|(k, c)| f(k, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k, c));
}
