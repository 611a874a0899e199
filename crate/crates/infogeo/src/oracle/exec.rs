//! Deterministic execution of data-parallel loops.
//!
//! Work is split into chunks of a fixed size that never depends on the
//! worker count; per-chunk results are reduced in chunk order. Parallel and
//! sequential execution therefore produce bit-identical results, and the
//! parallel path is independent of how many threads actually run.
//!
//! The thread pool honors the `INFOGEO_THREADS` environment variable
//! (`1` falls back to the sequential path, `0`/unset uses the rayon
//! default). [`set_sequential`] forces the sequential path at runtime, which
//! the benchmarks use to compare both implementations. Compiling without the
//! `parallel` feature removes rayon entirely.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Items per chunk. Fixed so that summation order is reproducible.
pub const CHUNK: usize = 1024;

/// Force the sequential code path (used by benchmarks and determinism tests).
pub fn set_sequential(force: bool) {
    FORCE_SEQUENTIAL.store(force, Ordering::SeqCst);
}

pub fn is_sequential() -> bool {
    if FORCE_SEQUENTIAL.load(Ordering::SeqCst) {
        return true;
    }
    if !cfg!(feature = "parallel") {
        return true;
    }
    configured_threads() == Some(1)
}

fn configured_threads() -> Option<usize> {
    std::env::var("INFOGEO_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
fn pool() -> Option<&'static rayon::ThreadPool> {
    use std::sync::OnceLock;
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        configured_threads()
            .map(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("thread pool construction")
            })
    })
    .as_ref()
}

/// Sums `eval(i)` for `i` in `0..n_items`, chunked deterministically.
pub fn sum_indexed<F>(n_items: usize, eval: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunk_sum = |c: usize| -> f64 {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n_items);
        let mut s = 0.0;
        for i in lo..hi {
            s += eval(i);
        }
        s
    };
    let n_chunks = n_items.div_ceil(CHUNK);
    let partials = run_indexed(n_chunks, chunk_sum);
    partials.into_iter().sum()
}

/// Maps `eval` over `0..count`, preserving order.
pub fn run_indexed<T, F>(count: usize, eval: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            let work = || (0..count).into_par_iter().map(&eval).collect::<Vec<T>>();
            return match pool() {
                Some(p) => p.install(work),
                None => work(),
            };
        }
    }
    (0..count).map(eval).collect()
}
