//! Channel model, densities and information density of the noncoherent
//! Rayleigh block-fading channel.
//!
//! Per coherence block `y = s·x + w` with `s ~ CN(0, 1)` and
//! `w ~ CN(0, I_T)`. The DT bound and the dispersion are evaluated at the
//! representative input `x̄ = [√(Tρ), 0, …, 0]`. Every quantity used there
//! depends on `y` only through `|y₁|²` and `‖y₂..y_T‖²`, so output vectors
//! are never materialized: a block is sampled as the pair
//! `(|y₁|² ~ (1 + Tρ)·Exp(1), ‖y_rest‖² ~ Gamma(T − 1, 1))`.

use alloc::vec::Vec;

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::mc::{substream, ChunkRunner, StreamRng};
use crate::specfun::{self, LnRegIncGamma};
use crate::{Error, Result};

/// Static description of the channel: coherence time `T` and linear SNR `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    coherence_time: u32,
    snr: f64,
}

impl ChannelParams {
    /// Requires `T ≥ 2` and `ρ > 0`.
    pub fn new(coherence_time: u32, snr: f64) -> Result<Self> {
        if coherence_time < 2 {
            return Err(Error::InvalidParameter(
                "coherence time T must be at least 2 for the noncoherent bounds",
            ));
        }
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::InvalidParameter("SNR must be positive and finite"));
        }
        Ok(Self {
            coherence_time,
            snr,
        })
    }

    /// Same as [`ChannelParams::new`] with the SNR given in dB.
    pub fn from_db(coherence_time: u32, snr_db: f64) -> Result<Self> {
        Self::new(coherence_time, db_to_linear(snr_db))
    }

    /// Coherence time `T` in channel uses.
    pub fn coherence_time(&self) -> u32 {
        self.coherence_time
    }

    /// `T` as a float.
    pub fn t(&self) -> f64 {
        self.coherence_time as f64
    }

    /// Linear SNR `ρ`.
    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// `Tρ`, the energy per coherence block.
    pub fn block_energy(&self) -> f64 {
        self.t() * self.snr
    }

    /// `‖x̄‖²` of the representative input; always exactly `Tρ`.
    pub fn representative_input_norm_sq(&self) -> f64 {
        self.block_energy()
    }
}

/// Converts dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// The two statistics of an output block that the densities depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSufficientStats {
    /// `|y₁|²`, energy along the representative input direction.
    pub y1_sq: f64,
    /// `Σ_{k≥2} |y_k|²`, energy in the `T − 1` orthogonal directions.
    pub rest_sq: f64,
}

impl OutputSufficientStats {
    /// Both components must be non-negative.
    pub fn new(y1_sq: f64, rest_sq: f64) -> Result<Self> {
        if !(y1_sq >= 0.0) {
            return Err(Error::Domain {
                routine: "OutputSufficientStats",
                name: "y1_sq",
                value: y1_sq,
            });
        }
        if !(rest_sq >= 0.0) {
            return Err(Error::Domain {
                routine: "OutputSufficientStats",
                name: "rest_sq",
                value: rest_sq,
            });
        }
        Ok(Self { y1_sq, rest_sq })
    }

    /// `‖y‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.y1_sq + self.rest_sq
    }
}

/// ln p(y | x) for an input of squared norm `x_norm_sq` pointing along the
/// first axis, so that `|y†x|² = x_norm_sq · y1_sq`.
pub fn conditional_logpdf(
    params: &ChannelParams,
    x_norm_sq: f64,
    stats: &OutputSufficientStats,
) -> Result<f64> {
    if !(x_norm_sq >= 0.0) {
        return Err(Error::Domain {
            routine: "conditional_logpdf",
            name: "x_norm_sq",
            value: x_norm_sq,
        });
    }
    let det = 1.0 + x_norm_sq;
    let inner = x_norm_sq * stats.y1_sq;
    Ok(-params.t() * specfun::ln_pi() - det.ln() - stats.norm_sq() + inner / det)
}

fn check_positive_norm(routine: &'static str, y_norm_sq: f64) -> Result<()> {
    if y_norm_sq == 0.0 {
        return Err(Error::Singularity {
            routine,
            name: "y_norm_sq",
            value: y_norm_sq,
        });
    }
    if !(y_norm_sq > 0.0) {
        return Err(Error::Domain {
            routine,
            name: "y_norm_sq",
            value: y_norm_sq,
        });
    }
    Ok(())
}

/// ln q(y) of the auxiliary isotropic output law with
/// `‖y‖² ~ Gamma(1, T(1 + ρ))`, used by the duality upper bound.
pub fn output_logpdf_gamma(params: &ChannelParams, y_norm_sq: f64) -> Result<f64> {
    check_positive_norm("output_logpdf_gamma", y_norm_sq)?;
    let t = params.t();
    let scale = t * (params.snr() + 1.0);
    Ok(specfun::log_gamma(t)? + (1.0 - t) * y_norm_sq.ln()
        - t * specfun::ln_pi()
        - scale.ln()
        - y_norm_sq / scale)
}

/// ln q⁽ᵁ⁾(y), the output density induced by the i.d. unitary input.
pub fn output_logpdf_induced(params: &ChannelParams, y_norm_sq: f64) -> Result<f64> {
    check_positive_norm("output_logpdf_induced", y_norm_sq)?;
    let t = params.t();
    let tr = params.block_energy();
    let ln_p = specfun::ln_reg_inc_gamma(t - 1.0, tr * y_norm_sq / (1.0 + tr))?;
    Ok(-y_norm_sq / (1.0 + tr) + (1.0 - t) * y_norm_sq.ln() + specfun::log_gamma(t)?
        - t * specfun::ln_pi()
        - (1.0 + tr).ln()
        + ln_p
        + (t - 1.0) * (1.0 / tr).ln_1p())
}

/// Per-block information density i(x̄; y) with the (T, ρ)-dependent constants
/// evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct BlockDensity {
    shape: f64,
    ln_gamma_t: f64,
    gain: f64,
    ln_p: LnRegIncGamma,
}

impl BlockDensity {
    /// Precomputes the constants for `params`.
    pub fn new(params: &ChannelParams) -> Result<Self> {
        let tr = params.block_energy();
        let shape = params.t() - 1.0;
        Ok(Self {
            shape,
            ln_gamma_t: specfun::log_gamma(params.t())?,
            gain: tr / (1.0 + tr),
            ln_p: LnRegIncGamma::new(shape)?,
        })
    }

    /// i(x̄; y) in nats.
    ///
    /// The terms `log((1+Tρ)/Γ(T))` and `−log(1+‖x̄‖²)` combine to `−log Γ(T)`,
    /// and `|y†x̄|²/(1+‖x̄‖²) − Tρ‖y‖²/(1+Tρ)` to `−Tρ·rest_sq/(1+Tρ)`.
    #[inline]
    pub fn eval(&self, stats: &OutputSufficientStats) -> Result<f64> {
        let norm = stats.norm_sq();
        if !(norm > 0.0) {
            return Err(Error::Domain {
                routine: "info_density_block",
                name: "y_norm_sq",
                value: norm,
            });
        }
        let arg = self.gain * norm;
        Ok(-self.ln_gamma_t - self.gain * stats.rest_sq + self.shape * arg.ln()
            - self.ln_p.eval(arg)?)
    }
}

/// i(x̄; y) for one coherence block.
pub fn info_density_block(params: &ChannelParams, stats: &OutputSufficientStats) -> Result<f64> {
    BlockDensity::new(params)?.eval(stats)
}

/// Draws output statistics of the channel driven by `x̄`.
#[derive(Debug, Clone, Copy)]
pub struct OutputSampler {
    aligned_scale: f64,
    orthogonal: Gamma<f64>,
}

impl OutputSampler {
    /// Sampler for `params`.
    pub fn new(params: &ChannelParams) -> Result<Self> {
        let orthogonal = Gamma::new(params.t() - 1.0, 1.0)
            .map_err(|_| Error::InvalidParameter("gamma shape T - 1 must be positive"))?;
        Ok(Self {
            aligned_scale: 1.0 + params.block_energy(),
            orthogonal,
        })
    }

    /// `|y₁|²` by inverse-CDF exponential, `‖y_rest‖²` by Marsaglia–Tsang gamma.
    #[inline]
    pub fn sample(&self, rng: &mut StreamRng) -> OutputSufficientStats {
        let u: f64 = rng.random();
        OutputSufficientStats {
            y1_sq: -self.aligned_scale * (-u).ln_1p(),
            rest_sq: self.orthogonal.sample(rng),
        }
    }
}

/// One draw of the output statistics given `x̄`.
pub fn sample_output_stats(params: &ChannelParams, rng: &mut StreamRng) -> Result<OutputSufficientStats> {
    Ok(OutputSampler::new(params)?.sample(rng))
}

/// Sampler of per-block and per-codeword information densities.
#[derive(Debug, Clone, Copy)]
pub struct DensitySampler {
    output: OutputSampler,
    density: BlockDensity,
}

impl DensitySampler {
    /// Sampler for `params`.
    pub fn new(params: &ChannelParams) -> Result<Self> {
        Ok(Self {
            output: OutputSampler::new(params)?,
            density: BlockDensity::new(params)?,
        })
    }

    /// One block density.
    #[inline]
    pub fn block(&self, rng: &mut StreamRng) -> Result<f64> {
        self.density.eval(&self.output.sample(rng))
    }

    /// Sum of `blocks` independent block densities.
    #[inline]
    pub fn codeword(&self, blocks: usize, rng: &mut StreamRng) -> Result<f64> {
        let mut sum = 0.0;
        for _ in 0..blocks {
            sum += self.block(rng)?;
        }
        Ok(sum)
    }
}

/// i(x̄^L; y^L) = Σ_l i(x̄; y_l) for one codeword spanning `blocks` blocks.
pub fn sample_codeword_density(
    params: &ChannelParams,
    blocks: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("a codeword spans at least one block"));
    }
    DensitySampler::new(params)?.codeword(blocks, rng)
}

/// A batch of codeword information densities with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoDensitySamples {
    /// One value per codeword, in nats.
    pub values: Vec<f64>,
    /// Per-block densities, when retained; `values[j]` is the sum of `per_block[j]`.
    pub per_block: Option<Vec<Vec<f64>>>,
    /// Base seed of the substreams.
    pub seed: u64,
    /// Samples per substream.
    pub chunk: usize,
    /// Channel the samples were drawn from.
    pub params: ChannelParams,
    /// Blocks per codeword, `L`.
    pub blocks: usize,
}

impl InfoDensitySamples {
    /// Draws `n_samples` codeword densities; chunk `c` uses substream `(seed, c)`.
    #[allow(clippy::too_many_arguments)]
    pub fn draw<R: ChunkRunner + ?Sized>(
        params: &ChannelParams,
        blocks: usize,
        n_samples: usize,
        seed: u64,
        chunk: usize,
        retain_per_block: bool,
        runner: &R,
    ) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidParameter("a codeword spans at least one block"));
        }
        if n_samples == 0 || chunk == 0 {
            return Err(Error::InvalidParameter("n_samples and chunk must be positive"));
        }
        let sampler = DensitySampler::new(params)?;
        let n_chunks = n_samples.div_ceil(chunk);
        type Part = Result<(Vec<f64>, Option<Vec<Vec<f64>>>)>;
        let parts: Vec<Part> = runner.map_chunks(n_chunks, |c| {
            let start = c * chunk;
            let end = (start + chunk).min(n_samples);
            let mut rng = substream(seed, c as u64);
            let mut values = Vec::with_capacity(end - start);
            if retain_per_block {
                let mut rows = Vec::with_capacity(end - start);
                for _ in start..end {
                    let row = (0..blocks)
                        .map(|_| sampler.block(&mut rng))
                        .collect::<Result<Vec<f64>>>()?;
                    values.push(row.iter().sum());
                    rows.push(row);
                }
                Ok((values, Some(rows)))
            } else {
                for _ in start..end {
                    values.push(sampler.codeword(blocks, &mut rng)?);
                }
                Ok((values, None))
            }
        });
        let mut values = Vec::with_capacity(n_samples);
        let mut per_block = retain_per_block.then(|| Vec::with_capacity(n_samples));
        for part in parts {
            let (v, rows) = part?;
            values.extend(v);
            if let (Some(all), Some(rows)) = (per_block.as_mut(), rows) {
                all.extend(rows);
            }
        }
        Ok(Self {
            values,
            per_block,
            seed,
            chunk,
            params: *params,
            blocks,
        })
    }

    /// Number of codeword samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when there are no samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
