//! Order-preserving data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the map runs on the rayon pool; results are
//! always collected in index order so reductions stay deterministic.

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether the crate was built with the rayon backend.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
