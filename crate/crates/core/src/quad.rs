//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15) and a
//! fixed composite Gauss–Legendre rule used as an independent cross-check.

use alloc::vec;
use alloc::vec::Vec;

// Float math in no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Estimated integral.
    pub value: f64,
    /// Estimated absolute error.
    pub abs_error: f64,
    /// Number of subintervals in the final partition.
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// error is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidParameter("integration limits must be finite and ordered"));
    }
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::NoConvergence {
                routine: "adaptive quadrature (non-finite integrand)",
                iterations: panels.len(),
                estimate: error,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= max_subdivisions {
            return Err(Error::NoConvergence {
                routine: "adaptive quadrature",
                iterations: panels.len(),
                estimate: error,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` points, roots found by Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        let n = order.max(1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pn1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pn1) / (x * x - 1.0);
                let step = pn / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let lo = a + width * k as f64;
            let center = lo + 0.5 * width;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(center + 0.5 * width * x);
            }
            total += 0.5 * width * s;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let r = adaptive(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        let gl = GaussLegendre::new(10);
        assert!((gl.integrate(|x| x.powi(19), 0.0, 1.0, 1) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for n in [1, 2, 5, 20, 64] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn exponential_tail() {
        let r = adaptive(|x| (-x).exp() * (1.0 + x).ln(), 0.0, 80.0, 1e-12, 1e-15, 500).unwrap();
        // ∫ e^{-x} ln(1+x) dx = e E1(1)
        assert!((r.value - 0.596_347_362_323_194_1).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn reports_non_convergence() {
        let r = adaptive(|x| 1.0 / x.abs().sqrt().max(1e-300), -1.0, 1.0, 1e-15, 1e-15, 8);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
