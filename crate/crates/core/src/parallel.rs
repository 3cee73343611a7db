//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) independent work items run on a
//! crate-local rayon pool sized by `WIENERCERT_THREADS` (falling back to the
//! number of available cores). Without the feature, or inside [`sequential`],
//! every helper degrades to a plain in-order loop. Results are always returned
//! in input order, so outputs never depend on scheduling.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper in this module forced onto the calling thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

fn forced_sequential() -> bool {
    FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Thread cap requested through the environment, if any.
pub fn thread_cap() -> Option<usize> {
    std::env::var("WIENERCERT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
mod pool {
    use rayon::ThreadPool;
    use std::sync::OnceLock;

    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();

    fn build() -> Option<ThreadPool> {
        let requested = super::thread_cap().unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        rayon::ThreadPoolBuilder::new()
            .num_threads(requested.max(1))
            .thread_name(|i| format!("wienercert-{i}"))
            .build()
            .ok()
    }

    pub(super) fn get() -> Option<&'static ThreadPool> {
        POOL.get_or_init(build).as_ref()
    }
}

/// Number of worker threads the helpers will use right now.
pub fn threads() -> usize {
    if forced_sequential() {
        return 1;
    }
    #[cfg(feature = "parallel")]
    {
        pool::get().map(|p| p.current_num_threads()).unwrap_or(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !forced_sequential() && n > 1 {
        if let Some(pool) = pool::get() {
            use rayon::prelude::*;
            return pool.install(|| (0..n).into_par_iter().map(&f).collect());
        }
    }
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_range(items.len(), |i| f(&items[i]))
}

/// Applies `f(row_index, row)` to consecutive rows of length `row_len`.
pub fn for_each_row_mut<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(row_len > 0 && data.len().is_multiple_of(row_len));
    #[cfg(feature = "parallel")]
    if !forced_sequential() && data.len() > row_len {
        if let Some(pool) = pool::get() {
            use rayon::prelude::*;
            pool.install(|| {
                data.par_chunks_mut(row_len)
                    .enumerate()
                    .for_each(|(i, row)| f(i, row))
            });
            return;
        }
    }
    for (i, row) in data.chunks_mut(row_len).enumerate() {
        f(i, row);
    }
}
