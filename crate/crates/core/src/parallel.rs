//! Data-parallel map with a sequential fallback.
//!
//! All batch layers (disorder averaging, sweeps, per-interval work) funnel
//! through [`par_map`], which preserves input order in its output. Results are
//! therefore schedule-independent: running with or without the `parallel`
//! feature, or at any thread count, produces identical bytes.

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Always-sequential map, kept as the baseline for the benchmark comparison.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
