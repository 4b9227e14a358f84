//! Data-parallel fold/reduce with a sequential fallback.
//!
//! With the `parallel` feature, [`Execution::Parallel`] runs on the rayon pool
//! that is current for the caller; without it every call is sequential. The
//! reductions used in this crate are over exact integer histograms, so both
//! paths give identical results.

/// How an enumeration is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `true` when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Folds every item into an accumulator created by `init`, then merges the
/// accumulators. `merge` must be associative and commutative up to the
/// caller's notion of equality.
pub fn fold_reduce<T, A, I, F, M>(exec: Execution, items: &[T], init: I, fold: F, merge: M) -> A
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &T) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .fold(&init, |mut acc, item| {
                fold(&mut acc, item);
                acc
            })
            .reduce(&init, &merge);
    }
    let _ = (exec, &merge);
    let mut acc = init();
    for item in items {
        fold(&mut acc, item);
    }
    acc
}

/// Maps in parallel (or not), preserving order.
pub fn map_collect<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
