//! Finite block-length bounds on the maximal rate `R*(n, ε)`.
//!
//! * [`fano_upper`]: converse from Fano's inequality with a capacity upper
//!   bound plugged in.
//! * [`dt_rate`]: the dependence-testing achievability bound, maximized over
//!   the codebook size on one shared set of information-density samples.
//! * [`normal_approx_coh`] / [`normal_approx_noncoh`]: Gaussian
//!   approximations with the coherent dispersion and with the noncoherent
//!   dispersion `V̲(ρ)` estimated by [`vbar_estimate`].

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::asymptotic::{self, QuadratureSpec};
use crate::channel::{ChannelParams, DensitySampler, InfoDensitySamples};
use crate::mc::{self, ChunkRunner, McEstimate, Moments, DEFAULT_CHUNK};
use crate::specfun::{binary_entropy_nats, q_inv};
use crate::{Error, Result};

/// Bisection resolution on `log M`, in nats.
pub const LOG_M_RESOLUTION: f64 = 1e-6;

/// Default Monte Carlo budget for the DT bound at ε = 10⁻³.
pub const DEFAULT_DT_SAMPLES: usize = 2_000_000;

/// Block-length, number of coherence blocks and target error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblSpec {
    /// Block-length `n = L·T` in channel uses.
    pub n: usize,
    /// Number of coherence blocks per codeword, `L`.
    pub blocks: usize,
    /// Target block error probability.
    pub epsilon: f64,
    /// Channel.
    pub params: ChannelParams,
}

impl FblSpec {
    /// Codewords spanning `blocks` coherence intervals, so `n = blocks · T`.
    pub fn new(params: ChannelParams, blocks: usize, epsilon: f64) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidParameter("a codeword spans at least one block"));
        }
        check_epsilon(epsilon)?;
        Ok(Self {
            n: blocks * params.coherence_time() as usize,
            blocks,
            epsilon,
            params,
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            routine: "finite block-length bound",
            name: "epsilon",
            value: epsilon,
        });
    }
    Ok(())
}

/// Outcome of the DT codebook-size search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtSearchResult {
    /// Natural log of the codebook size.
    pub log_m: f64,
    /// `log_m / n`, nats per channel use.
    pub rate: f64,
    /// DT error bound at `log_m` (never above the target).
    pub epsilon_at_m: f64,
    /// The DT error estimate at `log_m`, with its standard error.
    pub mc: McEstimate,
}

/// Fano converse `(C̄ + H(ε)/n) / (1 − ε)` in nats per channel use.
///
/// `ε = 0` is accepted and returns `capacity_ub`.
pub fn fano_upper(capacity_ub: f64, n: usize, epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain {
            routine: "fano_upper",
            name: "epsilon",
            value: epsilon,
        });
    }
    if !(capacity_ub >= 0.0) {
        return Err(Error::InvalidParameter("capacity upper bound must be non-negative"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block-length must be positive"));
    }
    Ok((capacity_ub + binary_entropy_nats(epsilon) / n as f64) / (1.0 - epsilon))
}

/// `log((M − 1)/2)` for a real codebook size `M = e^{log_m}`.
fn dt_threshold(log_m: f64) -> f64 {
    let ln_m_minus_1 = if log_m > 1.0 {
        log_m + (-(-log_m).exp()).ln_1p()
    } else {
        log_m.exp_m1().ln()
    };
    ln_m_minus_1 - core::f64::consts::LN_2
}

/// DT error bound for a codebook of size `M = e^{log_m}`.
///
/// With `τ = log((M−1)/2)` the two terms of the bound are
/// `P[i ≤ τ] + (M−1)/2 · P_out[i > τ]`. Under the output law the second
/// probability equals `E[e^{−i} 1{i > τ}]` taken under the channel law, so
/// the bound is the channel-law mean of `min(1, e^{τ−i})`.
pub fn dt_epsilon(samples: &InfoDensitySamples, log_m: f64) -> McEstimate {
    let tau = dt_threshold(log_m);
    let moments: Moments = samples
        .values
        .iter()
        .map(|&i| if i <= tau { 1.0 } else { (tau - i).exp() })
        .collect();
    moments.to_estimate(samples.seed)
}

/// Largest `log M` whose DT bound is at most `spec.epsilon`, searched on the
/// given samples.
pub fn dt_rate_from_samples(spec: &FblSpec, samples: &InfoDensitySamples) -> Result<DtSearchResult> {
    if samples.params != spec.params || samples.blocks != spec.blocks {
        return Err(Error::InvalidParameter(
            "samples were drawn for a different channel or block count",
        ));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("the DT search needs at least two samples"));
    }
    let target = spec.epsilon;
    let mut lo = 0.0;
    let mean = samples.values.iter().sum::<f64>() / samples.len() as f64;
    let mut hi = mean.max(1.0);
    let mut doublings = 0;
    while dt_epsilon(samples, hi).mean <= target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence {
                routine: "dt_rate (bracketing)",
                iterations: doublings,
                estimate: hi,
            });
        }
    }
    while hi - lo > LOG_M_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if dt_epsilon(samples, mid).mean <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let at_lo = dt_epsilon(samples, lo);
    let limit = target / 10.0;
    if at_lo.stderr > limit {
        return Err(Error::StatisticalResolution {
            stderr: at_lo.stderr,
            limit,
        });
    }
    Ok(DtSearchResult {
        log_m: lo,
        rate: lo / spec.n as f64,
        epsilon_at_m: at_lo.mean,
        mc: at_lo,
    })
}

/// DT lower bound on `R*(n, ε)` from `n_samples` fresh codeword densities.
pub fn dt_rate<R: ChunkRunner + ?Sized>(
    spec: &FblSpec,
    n_samples: usize,
    seed: u64,
    runner: &R,
) -> Result<DtSearchResult> {
    let samples = InfoDensitySamples::draw(
        &spec.params,
        spec.blocks,
        n_samples,
        seed,
        DEFAULT_CHUNK,
        false,
        runner,
    )?;
    dt_rate_from_samples(spec, &samples)
}

/// Monte Carlo estimate of `V̲(ρ) = Var[i(x̄; y)] / T`.
///
/// `mean` holds the dispersion estimate and `stderr` its large-sample
/// standard error; `variance` is set so that `stderr = sqrt(variance / n)`.
pub fn vbar_estimate<R: ChunkRunner + ?Sized>(
    params: &ChannelParams,
    n_samples: usize,
    seed: u64,
    runner: &R,
) -> Result<McEstimate> {
    let sampler = DensitySampler::new(params)?;
    let moments = mc::estimate_moments(
        |rng| sampler.block(rng).unwrap_or(f64::NAN),
        n_samples,
        seed,
        DEFAULT_CHUNK,
        runner,
    )?;
    if !moments.mean().is_finite() {
        return Err(Error::NoConvergence {
            routine: "vbar_estimate (non-finite information density)",
            iterations: n_samples,
            estimate: moments.mean(),
        });
    }
    let t = params.t();
    let stderr = moments.variance_stderr() / t;
    Ok(McEstimate {
        mean: moments.variance() / t,
        variance: stderr * stderr * n_samples as f64,
        stderr,
        n_samples: moments.count(),
        seed,
    })
}

/// `C_coh(ρ) − sqrt(V_coh/n)·Q⁻¹(ε)`.
pub fn normal_approx_coh(
    params: &ChannelParams,
    n: usize,
    epsilon: f64,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::InvalidParameter("block-length must be positive"));
    }
    let capacity = asymptotic::coherent_capacity(params.snr(), quad_spec)?;
    let dispersion = asymptotic::coherent_dispersion(params.coherence_time(), params.snr(), quad_spec)?;
    normal_approx(capacity, dispersion, n, epsilon)
}

/// `L(ρ) − sqrt(V̲/n)·Q⁻¹(ε)` with `V̲` taken from `vbar.mean`.
pub fn normal_approx_noncoh(
    params: &ChannelParams,
    n: usize,
    epsilon: f64,
    vbar: &McEstimate,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::InvalidParameter("block-length must be positive"));
    }
    let lower = asymptotic::lower_bound_l(params, quad_spec)?;
    normal_approx(lower, vbar.mean, n, epsilon)
}

/// `rate − sqrt(dispersion/n)·Q⁻¹(ε)`.
pub fn normal_approx(rate: f64, dispersion: f64, n: usize, epsilon: f64) -> Result<f64> {
    if !(dispersion >= 0.0) {
        return Err(Error::InvalidParameter("dispersion must be non-negative"));
    }
    if epsilon == 0.5 {
        return Ok(rate);
    }
    Ok(rate - (dispersion / n as f64).sqrt() * q_inv(epsilon)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::Sequential;
    use alloc::vec;
    use alloc::vec::Vec;

    fn params(t: u32, snr: f64) -> ChannelParams {
        ChannelParams::new(t, snr).unwrap()
    }

    fn fixed_samples(values: Vec<f64>) -> InfoDensitySamples {
        InfoDensitySamples {
            values,
            per_block: None,
            seed: 0,
            chunk: 1,
            params: params(2, 1.0),
            blocks: 1,
        }
    }

    #[test]
    fn fano_examples() {
        let v = fano_upper(1.0, 1000, 1e-3).unwrap();
        assert!((v - 1.001_008_916_171_283_5).abs() < 1e-12);
        assert_eq!(fano_upper(0.7, 10, 0.0).unwrap(), 0.7);
        let v = fano_upper(0.0, 100, 0.5).unwrap();
        assert!((v - 0.013_862_943_611_198_906).abs() < 1e-15);
        assert!(fano_upper(1.0, 10, 1.0).is_err());
        assert!(fano_upper(1.0, 10, -0.1).is_err());
        assert!(fano_upper(-1.0, 10, 0.1).is_err());
    }

    #[test]
    fn fbl_spec_validation() {
        let p = params(50, 10.0);
        let s = FblSpec::new(p, 80, 1e-3).unwrap();
        assert_eq!(s.n, 4000);
        assert!(FblSpec::new(p, 0, 1e-3).is_err());
        assert!(FblSpec::new(p, 1, 0.0).is_err());
        assert!(FblSpec::new(p, 1, 1.0).is_err());
    }

    #[test]
    fn dt_threshold_is_log_half_m_minus_one() {
        for &m in &[1.5f64, 2.0, 3.0, 100.0, 1e10] {
            let want = ((m - 1.0) / 2.0).ln();
            assert!((dt_threshold(m.ln()) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        assert_eq!(dt_threshold(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn dt_epsilon_limits() {
        let s = fixed_samples(vec![-3.0, 0.5, 2.0, 9.0]);
        assert_eq!(dt_epsilon(&s, 0.0).mean, 0.0);
        assert_eq!(dt_epsilon(&s, 1e4).mean, 1.0);
        let mut prev = 0.0;
        for k in 0..400 {
            let e = dt_epsilon(&s, k as f64 * 0.05).mean;
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn dt_epsilon_equals_two_term_form_on_exact_law() {
        // With i ~ N(μ, σ²) under P and the output law tilted by e^{−i}
        // (i ~ N(μ − σ², σ²) under Q when μ = σ²/2), the two-term bound is
        // Φ((τ−μ)/σ) + (M−1)/2 · Q((τ − μ + σ²)/σ).
        let sigma = 2.0;
        let mu = sigma * sigma / 2.0;
        let n = 400_000;
        let mut rng = crate::mc::substream(3, 0);
        use rand_distr::{Distribution, Normal};
        let normal = Normal::new(mu, sigma).unwrap();
        let values: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let s = fixed_samples(values);
        let log_m = 4.0;
        let tau = dt_threshold(log_m);
        let m1_half = (tau).exp();
        let exact = (1.0 - crate::specfun::q_func((tau - mu) / sigma))
            + m1_half * crate::specfun::q_func((tau - mu + sigma * sigma) / sigma);
        let est = dt_epsilon(&s, log_m);
        assert!((est.mean - exact).abs() < 4.0 * est.stderr, "{} vs {exact}", est.mean);
    }

    #[test]
    fn dt_search_brackets_target() {
        let p = params(10, 10.0);
        let spec = FblSpec::new(p, 20, 1e-2).unwrap();
        let samples = InfoDensitySamples::draw(&p, 20, 100_000, 8, 4096, false, &Sequential).unwrap();
        let r = dt_rate_from_samples(&spec, &samples).unwrap();
        assert!(r.epsilon_at_m <= 1e-2);
        assert!(dt_epsilon(&samples, r.log_m + 1e-5).mean > 1e-2);
        assert!((r.rate - r.log_m / 200.0).abs() < 1e-15);
        // ε = 1e-3 on the same samples cannot exceed the ε = 1e-2 rate.
        let tight = FblSpec::new(p, 20, 1e-3).unwrap();
        match dt_rate_from_samples(&tight, &samples) {
            Ok(r2) => assert!(r2.rate <= r.rate),
            Err(Error::StatisticalResolution { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn dt_search_refuses_underresolved_targets() {
        let p = params(10, 10.0);
        let spec = FblSpec::new(p, 20, 1e-4).unwrap();
        let samples = InfoDensitySamples::draw(&p, 20, 2_000, 8, 512, false, &Sequential).unwrap();
        assert!(matches!(
            dt_rate_from_samples(&spec, &samples),
            Err(Error::StatisticalResolution { .. })
        ));
    }

    #[test]
    fn dt_search_rejects_mismatched_samples() {
        let p = params(10, 10.0);
        let spec = FblSpec::new(p, 20, 1e-2).unwrap();
        let samples = InfoDensitySamples::draw(&p, 19, 100, 8, 64, false, &Sequential).unwrap();
        assert!(dt_rate_from_samples(&spec, &samples).is_err());
    }

    #[test]
    fn normal_approx_at_half_is_first_order_term() {
        let q = QuadratureSpec::default();
        let p = params(50, 10.0);
        let c = asymptotic::coherent_capacity(10.0, &q).unwrap();
        assert_eq!(normal_approx_coh(&p, 4000, 0.5, &q).unwrap(), c);
        let vbar = McEstimate {
            mean: 0.3,
            variance: 0.0,
            stderr: 0.0,
            n_samples: 10,
            seed: 0,
        };
        let l = asymptotic::lower_bound_l(&p, &q).unwrap();
        assert_eq!(normal_approx_noncoh(&p, 4000, 0.5, &vbar, &q).unwrap(), l);
    }

    #[test]
    fn normal_approx_coh_penalty_composition() {
        let q = QuadratureSpec::default();
        let p = params(50, 10.0);
        let c = asymptotic::coherent_capacity(10.0, &q).unwrap();
        let v = asymptotic::coherent_dispersion(50, 10.0, &q).unwrap();
        let got = normal_approx_coh(&p, 4000, 1e-3, &q).unwrap();
        let penalty = (v / 4000.0).sqrt() * 3.090_232_306_167_813_5;
        assert!((c - got - penalty).abs() < 1e-12);
        let far = normal_approx_coh(&p, 1_000_000_000_000, 1e-3, &q).unwrap();
        assert!((c - far).abs() < 1e-4);
    }

    #[test]
    fn vbar_positive_and_monotone_approximation() {
        let q = QuadratureSpec::default();
        let p = params(10, 10.0);
        let v = vbar_estimate(&p, 100_000, 1, &Sequential).unwrap();
        assert!(v.mean > 0.0 && v.stderr > 0.0);
        let mut prev = f64::NEG_INFINITY;
        for n in [100, 1000, 4000, 10_000, 40_000, 1_000_000] {
            let r = normal_approx_noncoh(&p, n, 1e-3, &v, &q).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }
}
