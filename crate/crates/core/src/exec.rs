//! Index-ordered parallel map with a sequential fallback.
//!
//! All batch stages route through [`map_indexed`]: with the `parallel`
//! feature it fans out on the rayon pool, without it the same closure runs
//! in a plain loop. Output order is index order either way, so results are
//! independent of the schedule. The `WVCL_THREADS` environment variable caps
//! the pool size when set.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
fn ensure_pool() {
    use std::sync::Once;
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        if let Ok(v) = std::env::var("WVCL_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                if n >= 1 {
                    // Fails if a pool was already installed; the cap is then
                    // whatever the host set up, which is fine.
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build_global();
                }
            }
        }
    });
}

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par_map_indexed(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map_indexed(n, f)
    }
}

/// Sequential reference path; always compiled so benches can compare.
pub fn seq_map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Explicit rayon path.
#[cfg(feature = "parallel")]
pub fn par_map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    ensure_pool();
    (0..n).into_par_iter().map(f).collect()
}
