//! Execution-mode switch for the batch and permanent engines.
//!
//! `Rayon` distributes work across threads when the `parallel` feature is
//! enabled and silently degrades to sequential execution otherwise, so
//! callers can hold one value and benchmarks can compare both paths.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Rayon,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }
}

/// Maps `items` and folds the results with `combine`, in parallel when
/// requested. The fold is performed in item order, so the result is
/// deterministic whenever `combine` is associative.
pub fn map_reduce<T, R>(
    par: Parallelism,
    items: Vec<T>,
    map: impl Fn(T) -> R + Sync + Send,
    identity: impl Fn() -> R + Sync + Send,
    combine: impl Fn(R, R) -> R + Sync + Send,
) -> R
where
    T: Send,
    R: Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return items
            .into_par_iter()
            .map(map)
            .fold(&identity, |a, b| combine(a, b))
            .reduce(&identity, &combine);
    }
    let _ = par;
    items.into_iter().map(map).fold(identity(), combine)
}
