//! Chunked execution, on the rayon pool when the `parallel` feature is on.
//!
//! Work is always cut into the same chunks, and per-chunk results are
//! returned in chunk order, so reductions over them do not depend on the
//! execution mode or the number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        return Execution::Sequential;
    }
}

/// Number of chunks of size `chunk` needed for `total` items.
pub fn chunk_count(total: u64, chunk: u64) -> u64 {
    total.div_ceil(chunk.max(1))
}

/// Evaluate `job(chunk_index)` for every chunk and return results in chunk order.
pub fn map_chunks<T, F>(exec: Execution, chunks: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..chunks).map(job).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..chunks).into_par_iter().map(job).collect(),
    }
}
