//! Infinite block-length quantities.
//!
//! * [`lower_bound_l`]: mutual information of the i.d. unitary input, `L(ρ)`.
//! * [`upper_bound_u`]: the duality upper bound `U(ρ)` obtained with the
//!   auxiliary output law `‖y‖² ~ Gamma(1, T(1 + ρ))`, relaxed to a
//!   supremum over the input norm and solved as an inf–sup over the power
//!   multiplier `λ` and the input power `p = ‖x‖²`.
//! * [`coherent_capacity`] and [`coherent_dispersion`]: the perfect-CSI
//!   benchmark.
//!
//! All rates are in nats per channel use.

use alloc::vec::Vec;

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::ChannelParams;
use crate::optim::{golden_max, golden_min};
use crate::quad;
use crate::specfun::{self, LnRegIncGamma, Tolerance};
use crate::{Error, Result};

/// Accuracy settings for the semi-infinite integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance of the adaptive rule.
    pub rel_tol: f64,
    /// Bound on the integral mass discarded by truncating the domain.
    pub truncation_tail: f64,
    /// Maximum number of subintervals.
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// All three settings must be positive.
    pub fn new(rel_tol: f64, truncation_tail: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && truncation_tail > 0.0) || max_subdivisions == 0 {
            return Err(Error::InvalidParameter("quadrature settings must be positive"));
        }
        Ok(Self {
            rel_tol,
            truncation_tail,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            truncation_tail: 1e-14,
            max_subdivisions: 4000,
        }
    }
}

/// Where the inf–sup for `U(ρ)` landed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundDiagnostics {
    /// Optimal multiplier λ*, always above `1/(T(1+ρ))`.
    pub lambda_star: f64,
    /// Maximizing input power `‖x‖²` at λ*.
    pub p_star: f64,
    /// The constant `c₁`.
    pub c1: f64,
    /// Optimized inf–sup value (nats per block, before dividing by T).
    pub inner_value: f64,
    /// Number of local maxima of the inner objective seen at λ*.
    pub inner_local_maxima: usize,
}

/// Weight of the `L(ρ)` integral: the law of `u = ‖y‖²/(1+Tρ)` under the
/// i.d. unitary input, `e^{-u} γ̃(T-1, Tρu) (1 + 1/(Tρ))^{T-1}`.
struct LowerBoundIntegrand {
    shape: f64,
    energy: f64,
    ln_scale: f64,
    small_u_log: f64,
    ln_p: LnRegIncGamma,
}

impl LowerBoundIntegrand {
    fn new(params: &ChannelParams) -> Result<Self> {
        let shape = params.t() - 1.0;
        let energy = params.block_energy();
        Ok(Self {
            shape,
            energy,
            ln_scale: shape * (1.0 / energy).ln_1p(),
            // u^{1-T} γ̃(T-1, Tρu) → (Tρ)^{T-1}/Γ(T) as u → 0
            small_u_log: shape * energy.ln() - specfun::log_gamma(params.t())?,
            ln_p: LnRegIncGamma::new(shape)?,
        })
    }

    fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let ln_p = match self.ln_p.eval(self.energy * u) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let log_term = if u < 1e-12 {
            self.small_u_log
        } else {
            ln_p - self.shape * u.ln()
        };
        (-u + ln_p + self.ln_scale).exp() * log_term
    }

    /// Upper limit such that the discarded tail is below `tail`.
    fn upper_limit(&self, tail: f64) -> f64 {
        let spread = self.shape / (1.0 + self.energy);
        let mut u_max = 60.0 + 10.0 * self.energy.ln_1p() + 4.0 * spread + 20.0 * spread.sqrt();
        // ∫_U^∞ e^{-u} (1+1/(Tρ))^{T-1} |log term| du ≲ e^{ln_scale - U} (1 + (T-1)(ln U + 1))
        while self.ln_scale - u_max + (1.0 + self.shape * (u_max.ln() + 1.0)).ln() > tail.ln() {
            u_max *= 1.5;
        }
        u_max
    }
}

/// `L(ρ)`, the i.d. unitary input's mutual information per channel use.
pub fn lower_bound_l(params: &ChannelParams, quad_spec: &QuadratureSpec) -> Result<f64> {
    let t = params.t();
    let tr = params.block_energy();
    let snr = params.snr();
    let head = ((t - 1.0) * tr.ln() - specfun::log_gamma(t)? - t + t * (1.0 + snr) / (1.0 + tr)) / t;
    let integrand = LowerBoundIntegrand::new(params)?;
    let u_max = integrand.upper_limit(quad_spec.truncation_tail);
    let integral = quad::adaptive(
        |u| integrand.eval(u),
        0.0,
        u_max,
        quad_spec.rel_tol,
        quad_spec.truncation_tail,
        quad_spec.max_subdivisions,
    )?;
    Ok(head - integral.value / t)
}

/// `L(ρ)` with a fixed composite Gauss–Legendre rule instead of the adaptive
/// one. Used to cross-check the quadrature.
pub fn lower_bound_l_fixed(params: &ChannelParams, order: usize, panels: usize) -> Result<f64> {
    let t = params.t();
    let tr = params.block_energy();
    let snr = params.snr();
    let head = ((t - 1.0) * tr.ln() - specfun::log_gamma(t)? - t + t * (1.0 + snr) / (1.0 + tr)) / t;
    let integrand = LowerBoundIntegrand::new(params)?;
    let u_max = integrand.upper_limit(1e-16);
    let rule = quad::GaussLegendre::new(order);
    Ok(head - rule.integrate(|u| integrand.eval(u), 0.0, u_max, panels) / t)
}

/// `c₁ = log(T(1+ρ)/Γ(T)) − T + 1/(ρ+1) + (T−1)ψ(T−1)`.
pub fn upper_bound_c1(params: &ChannelParams) -> Result<f64> {
    let t = params.t();
    let snr = params.snr();
    Ok((t * (1.0 + snr)).ln() - specfun::log_gamma(t)? - t
        + 1.0 / (snr + 1.0)
        + (t - 1.0) * specfun::digamma(t - 1.0)?)
}

/// `Σ_{k≥0} (T−1) r^k / (k + T − 1)` with `r = p/(1+p)`.
///
/// Summed term by term while `r^{T-1}` is small. Closer to `r = 1` the
/// integer-shape identity
/// `Σ_{k≥0} r^k/(k+a) = r^{-a} (−log(1−r) − Σ_{j=1}^{a−1} r^j/j)` is used,
/// which needs only `a − 1` terms and loses at most a factor `r^{-a} ≤ e^4`
/// to cancellation.
pub fn duality_series(coherence_time: u32, p: f64, tol: &Tolerance) -> Result<f64> {
    if coherence_time < 2 {
        return Err(Error::InvalidParameter("coherence time T must be at least 2"));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain {
            routine: "duality_series",
            name: "p",
            value: p,
        });
    }
    let a = (coherence_time - 1) as f64;
    if p == 0.0 {
        return Ok(1.0);
    }
    let ln_inv_r = (1.0 / p).ln_1p();
    let r = p / (1.0 + p);
    if a * ln_inv_r > 4.0 {
        let one_minus_r = 1.0 / (1.0 + p);
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut k = 0.0;
        loop {
            sum += a * pow / (k + a);
            pow *= r;
            k += 1.0;
            // a Σ_{j>K} r^j/(j+a) ≤ a r^{K+1} / ((K+a)(1−r))
            if a * pow / ((k + a) * one_minus_r) < tol.abs_tol {
                return Ok(sum);
            }
            if k > 1e8 {
                return Err(Error::NoConvergence {
                    routine: "duality_series",
                    iterations: k as usize,
                    estimate: a * pow / ((k + a) * one_minus_r),
                });
            }
        }
    }
    let mut partial = 0.0;
    let mut pow = 1.0;
    for j in 1..(coherence_time - 1) {
        pow *= r;
        partial += pow / j as f64;
    }
    Ok(a * (a * ln_inv_r).exp() * (p.ln_1p() - partial))
}

/// Inner objective of the inf–sup:
/// `S(p) − log(1+p) + p/(T(1+ρ)) + λ(Tρ − p)`.
pub fn inner_objective(params: &ChannelParams, lambda: f64, p: f64, tol: &Tolerance) -> Result<f64> {
    let t = params.t();
    Ok(duality_series(params.coherence_time(), p, tol)? - p.ln_1p()
        + p / (t * (1.0 + params.snr()))
        + lambda * (params.block_energy() - p))
}

const INNER_GRID: usize = 240;

/// Maximum over `p ∈ [0, p_max]` of the inner objective at fixed λ.
#[derive(Debug, Clone, Copy)]
struct InnerMax {
    value: f64,
    p: f64,
    local_maxima: usize,
    at_cap: bool,
}

struct UpperBoundSolver<'a> {
    params: &'a ChannelParams,
    tol: Tolerance,
    p_max: f64,
    grid: Vec<f64>,
}

impl<'a> UpperBoundSolver<'a> {
    fn new(params: &'a ChannelParams, tol: &Tolerance) -> Self {
        let p_max = 1e3 * params.block_energy();
        let p_min = 1e-4_f64.min(p_max * 1e-6);
        let (lo, hi) = (p_min.ln(), p_max.ln());
        let mut grid = Vec::with_capacity(INNER_GRID + 1);
        grid.push(0.0);
        for i in 0..INNER_GRID {
            grid.push((lo + (hi - lo) * i as f64 / (INNER_GRID - 1) as f64).exp());
        }
        Self {
            params,
            tol: *tol,
            p_max,
            grid,
        }
    }

    fn objective(&self, lambda: f64, p: f64) -> Result<f64> {
        inner_objective(self.params, lambda, p, &self.tol)
    }

    fn inner_max(&self, lambda: f64) -> Result<InnerMax> {
        let values = self
            .grid
            .iter()
            .map(|&p| self.objective(lambda, p))
            .collect::<Result<Vec<f64>>>()?;
        let n = values.len();
        let mut best = InnerMax {
            value: values[0],
            p: 0.0,
            local_maxima: 0,
            at_cap: false,
        };
        if values[0] >= values[1] {
            best.local_maxima += 1;
        }
        for i in 1..n {
            let left = values[i - 1];
            let right = if i + 1 < n { values[i + 1] } else { f64::NEG_INFINITY };
            if !(values[i] >= left && values[i] > right) {
                continue;
            }
            best.local_maxima += 1;
            if i + 1 == n {
                if values[i] > best.value {
                    best = InnerMax {
                        value: values[i],
                        p: self.grid[i],
                        at_cap: true,
                        ..best
                    };
                }
                continue;
            }
            let refined = if i == 1 {
                golden_max(
                    |p| self.objective(lambda, p).unwrap_or(f64::NEG_INFINITY),
                    0.0,
                    self.grid[2],
                    self.tol.rel_tol * self.grid[2],
                    self.tol.max_iter,
                )?
            } else {
                let r = golden_max(
                    |s| self.objective(lambda, s.exp()).unwrap_or(f64::NEG_INFINITY),
                    self.grid[i - 1].ln(),
                    self.grid[i + 1].ln(),
                    self.tol.rel_tol,
                    self.tol.max_iter,
                )?;
                crate::optim::Extremum { x: r.x.exp(), ..r }
            };
            let value = refined.value.max(values[i]);
            if value > best.value {
                best = InnerMax {
                    value,
                    p: if refined.value >= values[i] { refined.x } else { self.grid[i] },
                    at_cap: false,
                    ..best
                };
            }
        }
        Ok(best)
    }

    /// Outer objective as a function of `ln(λ − λ₀)`; infinite where the
    /// inner supremum runs into the power cap.
    fn outer(&self, lambda0: f64, log_mu: f64) -> Result<(f64, InnerMax)> {
        let inner = self.inner_max(lambda0 + log_mu.exp())?;
        if inner.at_cap {
            Ok((f64::INFINITY, inner))
        } else {
            Ok((inner.value, inner))
        }
    }
}

/// `U(ρ)`, the duality upper bound on capacity, with solver diagnostics.
///
/// The outer infimum runs over `λ > 1/(T(1+ρ))`: below that threshold the
/// inner objective grows linearly in `p` and the supremum is infinite. The
/// inner supremum is taken over `p ∈ [0, 10³·Tρ]`; multipliers whose
/// maximizer reaches the cap are treated as infeasible.
pub fn upper_bound_u(params: &ChannelParams, tol: &Tolerance) -> Result<(f64, UpperBoundDiagnostics)> {
    let t = params.t();
    let c1 = upper_bound_c1(params)?;
    let lambda0 = 1.0 / (t * (1.0 + params.snr()));
    let solver = UpperBoundSolver::new(params, tol);

    // Smallest feasible ln μ, by bisection on the cap indicator.
    let mut lo = (1e-12 * lambda0).ln();
    let mut hi = lambda0.ln();
    if solver.outer(lambda0, lo)?.0.is_infinite() {
        if solver.outer(lambda0, hi)?.0.is_infinite() {
            let mut found = false;
            for _ in 0..60 {
                hi += core::f64::consts::LN_2;
                if solver.outer(lambda0, hi)?.0.is_finite() {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::NoConvergence {
                    routine: "upper_bound_u (lambda window)",
                    iterations: 60,
                    estimate: hi.exp(),
                });
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if solver.outer(lambda0, mid)?.0.is_infinite() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo = hi;
    }

    // Double μ until the outer objective stops decreasing.
    let mut upper = lo.max(lambda0.ln());
    let mut current = solver.outer(lambda0, upper)?.0;
    let mut expansions = 0;
    loop {
        let next = solver.outer(lambda0, upper + core::f64::consts::LN_2)?.0;
        upper += core::f64::consts::LN_2;
        expansions += 1;
        if next >= current {
            break;
        }
        current = next;
        if expansions > 200 {
            return Err(Error::NoConvergence {
                routine: "upper_bound_u (lambda window)",
                iterations: expansions,
                estimate: upper.exp(),
            });
        }
    }

    let best = golden_min(
        |s| solver.outer(lambda0, s).map(|v| v.0).unwrap_or(f64::INFINITY),
        lo,
        upper,
        1e-9,
        tol.max_iter,
    )?;
    let (value, inner) = solver.outer(lambda0, best.x)?;
    // The endpoint lo may be the true minimizer (e.g. T = 2).
    let (value, inner, log_mu) = {
        let (v_lo, i_lo) = solver.outer(lambda0, lo)?;
        if v_lo < value {
            (v_lo, i_lo, lo)
        } else {
            (value, inner, best.x)
        }
    };
    if !value.is_finite() {
        return Err(Error::NoConvergence {
            routine: "upper_bound_u",
            iterations: best.evaluations,
            estimate: value,
        });
    }
    let diagnostics = UpperBoundDiagnostics {
        lambda_star: lambda0 + log_mu.exp(),
        p_star: inner.p,
        c1,
        inner_value: value,
        inner_local_maxima: inner.local_maxima,
    };
    debug_assert!(solver.p_max > inner.p);
    Ok((c1 / t + value / t, diagnostics))
}

/// Upper limit for `∫ e^{-z} f(z) dz` with `|f(z)| ≤ log(1+ρz)`-type growth.
fn exp_weight_upper_limit(snr: f64, tail: f64) -> f64 {
    let mut z = 40.0;
    while -z + (2.0 + (snr * z).ln_1p()).ln() > tail.ln() {
        z *= 1.25;
    }
    z
}

/// `C_coh(ρ) = E[log(1 + ρ|s|²)]`, `|s|² ~ Exp(1)`. Independent of T.
pub fn coherent_capacity(snr: f64, quad_spec: &QuadratureSpec) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::InvalidParameter("SNR must be positive and finite"));
    }
    let z_max = exp_weight_upper_limit(snr, quad_spec.truncation_tail);
    let r = quad::adaptive(
        |z| (-z).exp() * (snr * z).ln_1p(),
        0.0,
        z_max,
        quad_spec.rel_tol,
        quad_spec.truncation_tail * snr.min(1.0),
        quad_spec.max_subdivisions,
    )?;
    Ok(r.value)
}

/// `V_coh = T·Var[log(1+ρ|s|²)] + 1 − E²[1/(1+ρ|s|²)]`.
///
/// Unlike the noncoherent quantities this is defined for `T ≥ 1`, `ρ ≥ 0`.
pub fn coherent_dispersion(coherence_time: u32, snr: f64, quad_spec: &QuadratureSpec) -> Result<f64> {
    if coherence_time == 0 {
        return Err(Error::InvalidParameter("coherence time must be at least 1"));
    }
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::InvalidParameter("SNR must be non-negative and finite"));
    }
    if snr == 0.0 {
        return Ok(0.0);
    }
    let (variance, inv_mean) = coherent_moments(snr, quad_spec)?;
    Ok(coherence_time as f64 * variance + 1.0 - inv_mean * inv_mean)
}

/// `(Var[log(1+ρz)], E[1/(1+ρz)])` for `z ~ Exp(1)`.
pub fn coherent_moments(snr: f64, quad_spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let capacity = coherent_capacity(snr, quad_spec)?;
    let z_max = exp_weight_upper_limit(snr, quad_spec.truncation_tail);
    let variance = quad::adaptive(
        |z| {
            let d = (snr * z).ln_1p() - capacity;
            (-z).exp() * d * d
        },
        0.0,
        z_max * 1.5,
        quad_spec.rel_tol,
        quad_spec.truncation_tail * snr.min(1.0).powi(2),
        quad_spec.max_subdivisions,
    )?
    .value;
    let inv_mean = quad::adaptive(
        |z| (-z).exp() / (1.0 + snr * z),
        0.0,
        z_max,
        quad_spec.rel_tol,
        quad_spec.truncation_tail,
        quad_spec.max_subdivisions,
    )?
    .value;
    Ok((variance, inv_mean))
}
