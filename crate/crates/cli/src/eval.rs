//! Point evaluation, sweeps over T or n, and the T* search.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use blockfade_core::channel::db_to_linear;
use blockfade_core::fbl::{self, dt_rate_from_samples, DEFAULT_DT_SAMPLES};
use blockfade_core::mc::{ChunkRunner, DEFAULT_CHUNK};
use blockfade_core::specfun::{q_inv, Tolerance};
use blockfade_core::{
    asymptotic, dt_epsilon, fano_upper, lower_bound_l, normal_approx_noncoh, upper_bound_u, vbar_estimate,
    ChannelParams, FblSpec, InfoDensitySamples, QuadratureSpec,
};
use rayon::prelude::*;

use crate::bound::Bound;
use crate::error::{CliError, Result};
use crate::row::SweepRow;

/// Default Monte Carlo budget for a `V̲` estimate.
pub const DEFAULT_VBAR_SAMPLES: usize = 1_000_000;

/// One bound at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    /// SNR in dB.
    pub snr_db: f64,
    /// Coherence time.
    pub t: u32,
    /// Target block-length; `None` is allowed for asymptotic bounds only.
    pub n: Option<usize>,
    /// Target error probability.
    pub epsilon: f64,
    /// Bound to evaluate.
    pub bound: Bound,
}

/// Numerical settings shared by every point of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Monte Carlo budget; `None` picks the per-bound default.
    pub samples: Option<usize>,
    /// Base seed; per-point seeds are derived from it.
    pub base_seed: u64,
    /// Quadrature accuracy for `L`, `C_coh` and `V_coh`.
    pub quad: QuadratureSpec,
    /// Series accuracy for `U`.
    pub tol: Tolerance,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            samples: None,
            base_seed: 1,
            quad: QuadratureSpec::default(),
            tol: Tolerance::default(),
        }
    }
}

impl Settings {
    /// Sample count used for `bound`.
    pub fn samples_for(&self, bound: Bound) -> usize {
        self.samples.unwrap_or(match bound {
            Bound::Dt => DEFAULT_DT_SAMPLES,
            _ => DEFAULT_VBAR_SAMPLES,
        })
    }
}

fn splitmix(z: u64) -> u64 {
    let z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the point `(t, n, bound)` under `base_seed`.
pub fn point_seed(base_seed: u64, t: u32, n: usize, bound: Bound) -> u64 {
    let tag = Bound::ALL.iter().position(|&b| b == bound).unwrap_or(0) as u64;
    let mut h = splitmix(base_seed);
    for word in [u64::from(t), n as u64, tag] {
        h = splitmix(h ^ word);
    }
    h
}

/// Codeword blocks for a requested block-length: `max(1, round(n/T))`.
pub fn blocks_for(n: usize, t: u32) -> usize {
    ((n as f64 / f64::from(t)).round() as usize).max(1)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Standard error of a DT rate, propagating the Monte Carlo error of ε
/// through the local slope of the empirical ε(log M) curve.
fn dt_rate_stderr(samples: &InfoDensitySamples, log_m: f64, eps_stderr: f64, n: usize) -> Option<f64> {
    let len = samples.len() as f64;
    let mean = samples.values.iter().sum::<f64>() / len;
    let var = samples.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    let h = 0.01 * var.sqrt().max(1e-3);
    let slope = (dt_epsilon(samples, log_m + h).mean - dt_epsilon(samples, (log_m - h).max(0.0)).mean) / (2.0 * h);
    (slope > 0.0).then(|| eps_stderr / slope / n as f64)
}

/// Evaluates one point.
///
/// Monte Carlo bounds round the block-length to `L = round(n/T)` blocks and
/// report `n' = L·T`. The normal approximations and the Fano bound use `n`
/// as given; asymptotic bounds do not depend on `n` and report `n'`.
pub fn eval_point<R: ChunkRunner + ?Sized>(point: &Point, settings: &Settings, runner: &R) -> Result<SweepRow> {
    let Point {
        snr_db,
        t,
        n,
        epsilon,
        bound,
    } = *point;
    if !snr_db.is_finite() {
        return Err(usage(format!("SNR must be finite, got {snr_db} dB")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(usage(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if t == 0 {
        return Err(usage("T must be at least 1"));
    }
    if bound.needs_noncoherent_model() && t < 2 {
        return Err(usage(format!(
            "bound `{bound}` needs T >= 2: the noncoherent model is undefined for T = 1"
        )));
    }
    let (n_used, blocks) = match n {
        None if bound.is_asymptotic() => (0, 0),
        None => return Err(usage(format!("bound `{bound}` needs a block-length (--n)"))),
        Some(0) => return Err(usage("block-length n must be positive")),
        Some(n) => {
            let blocks = blocks_for(n, t);
            if bound.is_asymptotic() || bound == Bound::Dt {
                (blocks * t as usize, blocks)
            } else {
                (n, blocks)
            }
        }
    };
    let rho = db_to_linear(snr_db);
    let noncoherent = || ChannelParams::new(t, rho).map_err(CliError::from);
    let seed = point_seed(settings.base_seed, t, n.unwrap_or(0), bound);
    let mut stderr_nats = None;
    let mut mc = None;
    let nats = match bound {
        Bound::L => lower_bound_l(&noncoherent()?, &settings.quad)?,
        Bound::U => upper_bound_u(&noncoherent()?, &settings.tol)?.0,
        Bound::CCoh => asymptotic::coherent_capacity(rho, &settings.quad)?,
        Bound::Fano => {
            let (u, _) = upper_bound_u(&noncoherent()?, &settings.tol)?;
            fano_upper(u, n_used, epsilon)?
        }
        Bound::NaCoh => {
            let c = asymptotic::coherent_capacity(rho, &settings.quad)?;
            let v = asymptotic::coherent_dispersion(t, rho, &settings.quad)?;
            fbl::normal_approx(c, v, n_used, epsilon)?
        }
        Bound::NaNoncoh => {
            let params = noncoherent()?;
            let samples = settings.samples_for(bound);
            let vbar = vbar_estimate(&params, samples, seed, runner)?;
            let rate = normal_approx_noncoh(&params, n_used, epsilon, &vbar, &settings.quad)?;
            let q = q_inv(epsilon)?;
            stderr_nats = Some(q.abs() * vbar.stderr / (2.0 * (vbar.mean * n_used as f64).sqrt()));
            mc = Some((vbar.n_samples, seed));
            rate
        }
        Bound::Dt => {
            let params = noncoherent()?;
            let spec = FblSpec::new(params, blocks, epsilon)?;
            let count = settings.samples_for(bound);
            let samples = InfoDensitySamples::draw(&params, blocks, count, seed, DEFAULT_CHUNK, false, runner)?;
            let r = dt_rate_from_samples(&spec, &samples)?;
            stderr_nats = dt_rate_stderr(&samples, r.log_m, r.mc.stderr, spec.n);
            mc = Some((r.mc.n_samples, seed));
            r.rate
        }
    };
    log::debug!("{bound} at T={t}, n={n_used}, {snr_db} dB: {nats} nats");
    Ok(SweepRow {
        snr_db,
        t,
        n: n_used,
        blocks,
        epsilon,
        bound,
        rate_bits_per_cu: nats / LN_2,
        stderr_bits: stderr_nats.map(|s| s / LN_2),
        n_samples: mc.map(|m| m.0),
        seed: mc.map(|m| m.1),
    })
}

/// Evaluates independent points concurrently; output order follows input order.
pub fn eval_points<R: ChunkRunner + ?Sized>(points: &[Point], settings: &Settings, runner: &R) -> Result<Vec<SweepRow>> {
    points.par_iter().map(|p| eval_point(p, settings, runner)).collect()
}

/// Inclusive arithmetic range `lo:hi:step` of coherence times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TRange {
    /// First value.
    pub lo: u32,
    /// Last value (inclusive, when reached by the step).
    pub hi: u32,
    /// Increment.
    pub step: u32,
}

impl TRange {
    /// The values of the range in ascending order.
    pub fn values(&self) -> Vec<u32> {
        if self.step == 0 || self.lo > self.hi {
            return Vec::new();
        }
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }
}

impl FromStr for TRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.trim().parse::<u32>().map_err(|e| format!("bad T range `{s}`: {e}"));
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, 1),
            [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
            _ => return Err(format!("T range `{s}` is not lo:hi or lo:hi:step")),
        };
        if step == 0 {
            return Err(format!("T range `{s}` has a zero step"));
        }
        if lo > hi {
            return Err(format!("T range `{s}` is empty"));
        }
        Ok(Self { lo, hi, step })
    }
}

impl fmt::Display for TRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

/// Rows for every `(T, bound)` at a fixed block-length, ascending in `T`.
pub fn sweep_t<R: ChunkRunner + ?Sized>(
    snr_db: f64,
    n: usize,
    epsilon: f64,
    t_values: &[u32],
    bounds: &[Bound],
    settings: &Settings,
    runner: &R,
) -> Result<Vec<SweepRow>> {
    if t_values.is_empty() || bounds.is_empty() {
        return Err(usage("the T sweep is empty"));
    }
    let mut ts = t_values.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if let Some(&t) = ts.iter().find(|&&t| t < 2 || t as usize > n / 2) {
        return Err(usage(format!("T = {t} is outside the sweep range [2, n/2] = [2, {}]", n / 2)));
    }
    let points: Vec<Point> = ts
        .iter()
        .flat_map(|&t| {
            bounds.iter().map(move |&bound| Point {
                snr_db,
                t,
                n: Some(n),
                epsilon,
                bound,
            })
        })
        .collect();
    eval_points(&points, settings, runner)
}

/// Rows for every `(n, bound)` at a fixed coherence time, ascending in `n`.
pub fn sweep_n<R: ChunkRunner + ?Sized>(
    snr_db: f64,
    t: u32,
    epsilon: f64,
    n_values: &[usize],
    bounds: &[Bound],
    settings: &Settings,
    runner: &R,
) -> Result<Vec<SweepRow>> {
    if n_values.is_empty() || bounds.is_empty() {
        return Err(usage("the n sweep is empty"));
    }
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let points: Vec<Point> = ns
        .iter()
        .flat_map(|&n| {
            bounds.iter().map(move |&bound| Point {
                snr_db,
                t,
                n: Some(n),
                epsilon,
                bound,
            })
        })
        .collect();
    eval_points(&points, settings, runner)
}

/// Maximizing coherence time of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TStar {
    /// Argmax coherence time.
    pub t: u32,
    /// Rate there, bits per channel use.
    pub rate_bits: f64,
    /// The winning row.
    pub row: SweepRow,
    /// Set when the runner-up is statistically indistinguishable.
    pub flatness_warning: Option<String>,
}

/// Argmax over `T` of a single-bound sweep; ties go to the smaller `T`.
pub fn find_tstar(rows: &[SweepRow]) -> Result<TStar> {
    let first = rows.first().ok_or_else(|| usage("cannot search T* over an empty sweep"))?;
    if rows.iter().any(|r| r.bound != first.bound) {
        return Err(usage("T* search needs rows of a single bound"));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.t);
    let mut best = sorted[0];
    for r in &sorted[1..] {
        if r.rate_bits_per_cu > best.rate_bits_per_cu {
            best = *r;
        }
    }
    let runner_up = sorted
        .iter()
        .filter(|r| r.t != best.t)
        .max_by(|a, b| a.rate_bits_per_cu.total_cmp(&b.rate_bits_per_cu));
    let flatness_warning = match (runner_up, best.stderr_bits) {
        (Some(r2), Some(se1)) => {
            let se = (se1.powi(2) + r2.stderr_bits.unwrap_or(0.0).powi(2)).sqrt();
            let gap = best.rate_bits_per_cu - r2.rate_bits_per_cu;
            (gap <= 2.0 * se).then(|| {
                format!(
                    "T* = {} is not resolved: T = {} trails by {gap:.3e} bits/cu, within 2 combined stderr ({:.3e})",
                    best.t,
                    r2.t,
                    2.0 * se
                )
            })
        }
        _ => None,
    };
    Ok(TStar {
        t: best.t,
        rate_bits: best.rate_bits_per_cu,
        row: best,
        flatness_warning,
    })
}

/// Rows breaking `dt ≤ fano` or `L ≤ U` at a shared `(snr, T, L, ε)`.
pub fn ordering_violations(rows: &[SweepRow]) -> Vec<String> {
    let key = |r: &SweepRow| (r.snr_db.to_bits(), r.t, r.blocks, r.epsilon.to_bits());
    let mut out = Vec::new();
    for (lo, hi) in [(Bound::Dt, Bound::Fano), (Bound::L, Bound::U)] {
        for a in rows.iter().filter(|r| r.bound == lo) {
            for b in rows.iter().filter(|r| r.bound == hi && key(r) == key(a)) {
                if a.rate_bits_per_cu > b.rate_bits_per_cu {
                    out.push(format!(
                        "{lo} = {} exceeds {hi} = {} at T = {}, n = {}",
                        a.rate_bits_per_cu, b.rate_bits_per_cu, a.t, a.n
                    ));
                }
            }
        }
    }
    out
}
