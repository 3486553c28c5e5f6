//! Realization fan-out with a sequential fallback.
//!
//! Results are always returned in realization order, so reductions performed
//! by the caller do not depend on the thread count or on scheduling.

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon thread pool; identical to `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `f(start), f(start + 1), …, f(start + count − 1)`, collected in order.
pub fn map_indexed<T, F>(start: u64, count: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (start..start + count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (start..start + count).map(f).collect()
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, F>(start: u64, count: u64, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    map_indexed(start, count, exec, f).into_iter().collect()
}

/// Processes `[start, start + count)` in consecutive batches of `batch` indices,
/// handing each ordered batch of results to `sink` before the next is computed.
pub fn for_each_batch<T, F, S>(start: u64, count: u64, batch: u64, exec: Execution, f: F, mut sink: S) -> Result<()>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
    S: FnMut(Vec<T>) -> Result<()>,
{
    let batch = batch.max(1);
    let mut offset = 0;
    while offset < count {
        let len = batch.min(count - offset);
        sink(try_map_indexed(start + offset, len, exec, &f)?)?;
        offset += len;
    }
    Ok(())
}
