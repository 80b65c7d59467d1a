//! Special functions: log-gamma, digamma, the regularized lower incomplete
//! gamma function (and its logarithm), the Gaussian Q-function with its
//! inverse, and the binary entropy in nats.

use core::f64::consts::{LN_2, PI, SQRT_2};

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// 0.5·ln(2π)
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Iteration budget for the incomplete-gamma series and continued fraction.
const INC_GAMMA_MAX_ITER: usize = 100_000;

/// Convergence settings for iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative tolerance.
    pub rel_tol: f64,
    /// Absolute tolerance.
    pub abs_tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl Tolerance {
    /// Validates and builds a tolerance.
    pub fn new(rel_tol: f64, abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol must be positive"));
        }
        if !(abs_tol > 0.0) {
            return Err(Error::InvalidParameter("abs_tol must be positive"));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_iter,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_iter: 500,
        }
    }
}

fn domain(routine: &'static str, name: &'static str, value: f64) -> Error {
    Error::Domain {
        routine,
        name,
        value,
    }
}

/// Stirling series for ln Γ(z), accurate to ~1e-17 for z ≥ 10.
fn ln_gamma_stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2
                                        * (1.0 / 1188.0
                                            + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log_gamma", "x", x));
    }
    if x >= 10.0 {
        return Ok(ln_gamma_stirling(x));
    }
    // Shift up with Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1)).
    let mut z = x;
    let mut prod = 1.0;
    while z < 10.0 {
        prod *= z;
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z) - prod.ln())
}

/// ψ(x) = d/dx ln Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", "x", x));
    }
    let mut z = x;
    let mut shift = 0.0;
    while z < 10.0 {
        shift += 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    Ok(z.ln() - 0.5 / z - tail - shift)
}

/// Power series for the lower regularized gamma, returned as
/// (log prefactor, sum) with P(a, x) = exp(prefactor) · sum.
fn inc_gamma_series(a: f64, x: f64, ln_gamma_a1: f64) -> Result<(f64, f64)> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut denom = a;
    for _ in 0..INC_GAMMA_MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term < sum * 1e-17 {
            return Ok((a * x.ln() - x - ln_gamma_a1, sum));
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma series",
        iterations: INC_GAMMA_MAX_ITER,
        estimate: term / sum,
    })
}

/// Continued fraction (modified Lentz) for the upper regularized gamma,
/// returned as (log prefactor, fraction) with Q(a, x) = exp(prefactor) · fraction.
fn inc_gamma_cf(a: f64, x: f64, ln_gamma_a: f64) -> Result<(f64, f64)> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok((a * x.ln() - x - ln_gamma_a, h));
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma continued fraction",
        iterations: INC_GAMMA_MAX_ITER,
        estimate: h,
    })
}

fn check_inc_gamma_args(routine: &'static str, a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(routine, "shape", a));
    }
    if !(x >= 0.0) {
        return Err(domain(routine, "x", x));
    }
    Ok(())
}

/// Regularized lower incomplete gamma γ̃(a, x) = γ(a, x) / Γ(a).
pub fn reg_inc_gamma(shape: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args("reg_inc_gamma", shape, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < shape + 1.0 {
        let (ln_pre, sum) = inc_gamma_series(shape, x, log_gamma(shape + 1.0)?)?;
        Ok((ln_pre.exp() * sum).min(1.0))
    } else {
        let (ln_pre, frac) = inc_gamma_cf(shape, x, log_gamma(shape)?)?;
        Ok((1.0 - ln_pre.exp() * frac).max(0.0))
    }
}

/// Regularized upper incomplete gamma 1 − γ̃(a, x).
pub fn reg_inc_gamma_upper(shape: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args("reg_inc_gamma_upper", shape, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < shape + 1.0 {
        let (ln_pre, sum) = inc_gamma_series(shape, x, log_gamma(shape + 1.0)?)?;
        Ok((1.0 - ln_pre.exp() * sum).max(0.0))
    } else {
        let (ln_pre, frac) = inc_gamma_cf(shape, x, log_gamma(shape)?)?;
        Ok((ln_pre.exp() * frac).min(1.0))
    }
}

/// ln γ̃(a, x), evaluated without forming γ̃ when it would underflow.
///
/// Returns `-inf` at `x = 0`.
pub fn ln_reg_inc_gamma(shape: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args("ln_reg_inc_gamma", shape, x)?;
    LnRegIncGamma::new(shape)?.eval(x)
}

/// ln γ̃(a, ·) with the shape-dependent constants cached, for hot loops.
#[derive(Debug, Clone, Copy)]
pub struct LnRegIncGamma {
    shape: f64,
    ln_gamma_a: f64,
    ln_gamma_a1: f64,
}

impl LnRegIncGamma {
    /// Caches ln Γ(a) and ln Γ(a + 1).
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(domain("ln_reg_inc_gamma", "shape", shape));
        }
        let ln_gamma_a = log_gamma(shape)?;
        Ok(Self {
            shape,
            ln_gamma_a,
            ln_gamma_a1: ln_gamma_a + shape.ln(),
        })
    }

    /// Shape parameter.
    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// ln γ̃(a, x) for x ≥ 0.
    #[inline]
    pub fn eval(&self, x: f64) -> Result<f64> {
        let a = self.shape;
        if x == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if !(x > 0.0) {
            return Err(domain("ln_reg_inc_gamma", "x", x));
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        if x < a + 1.0 {
            let (ln_pre, sum) = inc_gamma_series(a, x, self.ln_gamma_a1)?;
            return Ok(ln_pre + sum.ln());
        }
        let ln_prefactor = a * x.ln() - x - self.ln_gamma_a;
        let (_, frac) = inc_gamma_cf(a, x, self.ln_gamma_a)?;
        let q = ln_prefactor.exp() * frac;
        Ok((-q).ln_1p())
    }
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - HALF_LN_2PI).exp()
}

/// Rational approximation to Φ⁻¹(p) (Acklam), relative error ~1e-9.
fn normal_quantile_seed(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse of [`q_func`]: the x with Q(x) = p, for p in (0, 1).
///
/// Newton on ln Q seeded by a rational approximation, kept inside a shrinking
/// bracket and falling back to bisection whenever a step leaves it.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("q_inv", "p", p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-q_inv_upper_half(1.0 - p));
    }
    Ok(q_inv_upper_half(p))
}

/// Root of ln Q(x) = ln p on x ≥ 0, for p ≤ 0.5.
fn q_inv_upper_half(p: f64) -> f64 {
    let ln_p = p.ln();
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    let mut x = (-normal_quantile_seed(p)).clamp(lo, hi);
    for _ in 0..200 {
        let q = q_func(x);
        if q > p {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = std_normal_pdf(x);
        let step = if q > 0.0 && pdf > 0.0 {
            (q.ln() - ln_p) * q / pdf
        } else {
            f64::NAN
        };
        let mut next = x + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// Binary entropy in nats, with H(0) = H(1) = 0.
pub fn binary_entropy_nats(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (-p).ln_1p()
}

/// Converts nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

/// ln π, used by the channel densities.
pub(crate) fn ln_pi() -> f64 {
    PI.ln()
}
