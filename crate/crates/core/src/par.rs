//! Order-preserving data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the maps run on rayon; without it, or inside
//! [`with_workers`] with one worker, they run on the calling thread. Results
//! come back in input order either way, so callers stay deterministic.

use std::cell::Cell;

thread_local! {
    static SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

fn sequential_here() -> bool {
    !cfg!(feature = "parallel") || SEQUENTIAL.with(Cell::get)
}

/// Run `f` with `workers` threads (0 = all cores, 1 = strictly sequential).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 1 || !cfg!(feature = "parallel") {
        let prev = SEQUENTIAL.with(|s| s.replace(true));
        let out = f();
        SEQUENTIAL.with(|s| s.set(prev));
        return out;
    }
    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}

pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if sequential_here() {
        return items.iter().map(f).collect();
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}

pub fn map_range<R: Send>(n: u64, f: impl Fn(u64) -> R + Sync + Send) -> Vec<R> {
    if sequential_here() {
        return (0..n).map(f).collect();
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}

/// Number of threads a parallel map would use here.
pub fn current_workers() -> usize {
    if sequential_here() {
        return 1;
    }
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    1
}
