//! Rayon-backed chunk runner.

use blockfade_core::mc::ChunkRunner;
use rayon::prelude::*;

/// Executes Monte Carlo chunks on the global rayon pool.
///
/// Chunk results come back in chunk order, so estimates are bit-identical
/// to [`blockfade_core::Sequential`] for any thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonRunner;

impl ChunkRunner for RayonRunner {
    fn map_chunks<R, F>(&self, n_chunks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n_chunks).into_par_iter().map(f).collect()
    }

    fn workers(&self) -> usize {
        rayon::current_num_threads()
    }
}
