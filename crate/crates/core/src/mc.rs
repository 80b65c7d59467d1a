//! Reproducible Monte Carlo estimation.
//!
//! Work is split into fixed-size chunks. Chunk `c` draws from its own
//! substream keyed by `(seed, c)` and the per-chunk moments are merged in
//! chunk order, so a result depends only on `(seed, chunk)` and never on how
//! many workers executed the chunks.

use alloc::vec::Vec;

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Counter-based generator used for every substream.
pub type StreamRng = ChaCha8Rng;

/// Default number of samples per substream.
pub const DEFAULT_CHUNK: usize = 4096;

/// Generator for substream `chunk_index` of `seed`.
pub fn substream(seed: u64, chunk_index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    rng
}

/// Executes independent chunk jobs and returns their results in chunk order.
pub trait ChunkRunner: Sync {
    /// Evaluates `f(0), ..., f(n_chunks - 1)`; the output is indexed by chunk.
    fn map_chunks<R, F>(&self, n_chunks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;

    /// Number of workers, for diagnostics.
    fn workers(&self) -> usize {
        1
    }
}

/// Runs chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkRunner for Sequential {
    fn map_chunks<R, F>(&self, n_chunks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n_chunks).map(f).collect()
    }
}

/// Streaming central moments up to order four.
///
/// Single samples are folded in with Welford/Terriberry updates; partial
/// results combine with the pairwise formulas of Chan and Pébay.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    /// Empty accumulator.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one observation.
    #[inline]
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Combines two disjoint accumulators.
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            n: self.n + other.n,
            mean,
            m2,
            m3,
            m4,
        }
    }

    /// Observation count.
    pub fn count(&self) -> u64 {
        self.n
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (n − 1 denominator); zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n as f64 - 1.0)).max(0.0)
        }
    }

    /// Fourth central moment (n denominator).
    pub fn central_moment4(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m4 / self.n as f64
        }
    }

    /// Large-sample standard error of [`Moments::variance`].
    pub fn variance_stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let s2 = self.m2 / n;
        ((self.central_moment4() - s2 * s2).max(0.0) / n).sqrt()
    }

    /// Summary with standard error of the mean.
    pub fn to_estimate(&self, seed: u64) -> McEstimate {
        let variance = self.variance();
        let stderr = if self.n == 0 {
            0.0
        } else {
            (variance / self.n as f64).sqrt()
        };
        McEstimate {
            mean: self.mean,
            variance,
            stderr,
            n_samples: self.n,
            seed,
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Result of a Monte Carlo mean estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `sqrt(variance / n_samples)`.
    pub stderr: f64,
    /// Number of samples.
    pub n_samples: u64,
    /// Base seed of the substreams.
    pub seed: u64,
}

fn check_budget(n_samples: usize, chunk: usize) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter("n_samples must be at least 2"));
    }
    if chunk == 0 {
        return Err(Error::InvalidParameter("chunk must be at least 1"));
    }
    Ok(())
}

fn chunk_bounds(n_samples: usize, chunk: usize, index: usize) -> (usize, usize) {
    let start = index * chunk;
    (start, (start + chunk).min(n_samples))
}

/// Moments of `n_samples` draws of `sampler`, chunked as described in the
/// module docs.
pub fn estimate_moments<S, R>(
    sampler: S,
    n_samples: usize,
    seed: u64,
    chunk: usize,
    runner: &R,
) -> Result<Moments>
where
    S: Fn(&mut StreamRng) -> f64 + Sync + Send,
    R: ChunkRunner + ?Sized,
{
    check_budget(n_samples, chunk)?;
    let n_chunks = n_samples.div_ceil(chunk);
    let parts = runner.map_chunks(n_chunks, |c| {
        let (start, end) = chunk_bounds(n_samples, chunk, c);
        let mut rng = substream(seed, c as u64);
        let mut m = Moments::new();
        for _ in start..end {
            m.push(sampler(&mut rng));
        }
        m
    });
    Ok(parts.iter().fold(Moments::new(), |acc, m| acc.merge(m)))
}

/// Mean, variance and standard error of `n_samples` draws of `sampler`.
pub fn estimate<S, R>(
    sampler: S,
    n_samples: usize,
    seed: u64,
    chunk: usize,
    runner: &R,
) -> Result<McEstimate>
where
    S: Fn(&mut StreamRng) -> f64 + Sync + Send,
    R: ChunkRunner + ?Sized,
{
    Ok(estimate_moments(sampler, n_samples, seed, chunk, runner)?.to_estimate(seed))
}

/// The raw draws of `sampler`, in the same order as [`estimate`] consumes them.
pub fn collect<S, R>(
    sampler: S,
    n_samples: usize,
    seed: u64,
    chunk: usize,
    runner: &R,
) -> Result<Vec<f64>>
where
    S: Fn(&mut StreamRng) -> f64 + Sync + Send,
    R: ChunkRunner + ?Sized,
{
    if chunk == 0 {
        return Err(Error::InvalidParameter("chunk must be at least 1"));
    }
    let n_chunks = n_samples.div_ceil(chunk);
    let parts = runner.map_chunks(n_chunks, |c| {
        let (start, end) = chunk_bounds(n_samples, chunk, c);
        let mut rng = substream(seed, c as u64);
        (start..end).map(|_| sampler(&mut rng)).collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// Fraction of `values` that are `<= threshold`.
///
/// This is the lower-tail convention of the DT bound's first term,
/// P[i ≤ τ]. Callers wanting the upper tail take the complement.
pub fn empirical_tail(values: &[f64], threshold: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("empirical_tail needs at least one value"));
    }
    let hits = values.iter().filter(|&&v| v <= threshold).count();
    Ok(hits as f64 / values.len() as f64)
}
