//! Scalar search helpers.


use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizer and minimum found by a 1-D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Abscissa.
    pub x: f64,
    /// Objective value at `x`.
    pub value: f64,
    /// Objective evaluations used.
    pub evaluations: usize,
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `x_tol` (absolute).
pub fn golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<Extremum> {
    if !(lo <= hi) {
        return Err(Error::InvalidParameter("golden_min needs lo <= hi"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for iteration in 0..max_iter {
        let evaluations = iteration + 2;
        if (b - a).abs() <= x_tol {
            let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
            return Ok(Extremum {
                x,
                value,
                evaluations,
            });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    Err(Error::NoConvergence {
        routine: "golden-section search",
        iterations: max_iter,
        estimate: b - a,
    })
}

/// Golden-section maximization; see [`golden_min`].
pub fn golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<Extremum> {
    let r = golden_min(|x| -f(x), lo, hi, x_tol, max_iter)?;
    Ok(Extremum {
        value: -r.value,
        ..r
    })
}
