//! Sequential/parallel execution of per-source sweeps.
//!
//! Work is always split into fixed-size chunks of source indices and the
//! per-chunk partial results are returned in chunk order. Callers reduce
//! them sequentially, so floating-point results are bit-identical no matter
//! how many workers ran or whether the `parallel` feature is enabled.

use std::ops::Range;

/// Number of sources handled by one unit of work.
pub const CHUNK: usize = 32;

/// How per-source sweeps are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, and
    /// degrades to [`Execution::Sequential`] otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

fn chunks(n: usize) -> impl Iterator<Item = Range<usize>> + Clone {
    (0..n.div_ceil(CHUNK)).map(move |c| c * CHUNK..((c + 1) * CHUNK).min(n))
}

/// Applies `f` to each chunk of `0..n`, returning results in chunk order.
pub fn map_chunks<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let ranges: Vec<Range<usize>> = chunks(n).collect();
            ranges.into_par_iter().map(f).collect()
        }
        _ => chunks(n).map(f).collect(),
    }
}

/// Maps independent jobs, preserving input order.
pub fn map_items<I, T, F>(items: &[I], exec: Execution, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
