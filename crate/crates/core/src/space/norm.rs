//! The modular `rho(a) = sum |a_n|^{p_n}` and the Luxemburg norm
//! `||a|| = inf { lambda > 0 : rho(a / lambda) <= 1 }`.

use serde::{Deserialize, Serialize};

use super::exponent::ExponentSequence;
use super::sequence::SparseSequence;
use crate::error::{Error, Result};

/// Relative residual tolerance used when callers have no preference.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest exponent accepted before `|a_n|^{p_n}` is treated as an overflow risk.
pub const DEFAULT_P_MAX: f64 = 700.0;

/// Iteration budget for bracketing plus bisection. Bisection from a bracket
/// of ratio 2 reaches adjacent floats in about 53 steps.
pub const MAX_ITERATIONS: usize = 200;

/// Compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    err: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.err;
        let t = self.sum + y;
        self.err = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        for x in iter {
            k.add(x);
        }
        k
    }
}

fn check_cap(a: &SparseSequence, p: &ExponentSequence, cap: f64) -> Result<()> {
    for (n, _) in a.iter() {
        let exponent = p.at(n);
        if exponent > cap {
            return Err(Error::Overflow { index: n, exponent });
        }
    }
    Ok(())
}

/// `rho(a)`, summed in ascending index order with compensation.
pub fn modular(a: &SparseSequence, p: &ExponentSequence) -> Result<f64> {
    modular_with_cap(a, p, DEFAULT_P_MAX)
}

pub fn modular_with_cap(a: &SparseSequence, p: &ExponentSequence, cap: f64) -> Result<f64> {
    check_cap(a, p, cap)?;
    let mut acc = KahanSum::default();
    for (n, v) in a.iter() {
        let exponent = p.at(n);
        let term = v.norm().powf(exponent);
        if !term.is_finite() {
            return Err(Error::Overflow { index: n, exponent });
        }
        acc.add(term);
    }
    let total = acc.value();
    if !total.is_finite() {
        let (index, _) = a.iter().last().unwrap_or((1, Default::default()));
        return Err(Error::Overflow {
            index,
            exponent: p.at(index),
        });
    }
    Ok(total)
}

/// `rho(a / lambda)`; may be infinite for small `lambda`.
fn scaled_modular(a: &SparseSequence, p: &ExponentSequence, lambda: f64) -> f64 {
    a.iter()
        .map(|(n, v)| (v.norm() / lambda).powf(p.at(n)))
        .collect::<KahanSum>()
        .value()
}

/// `d/dlambda rho(a / lambda) = -sum p_n |a_n|^{p_n} lambda^{-p_n - 1}`.
fn scaled_modular_derivative(a: &SparseSequence, p: &ExponentSequence, lambda: f64) -> f64 {
    -a.iter()
        .map(|(n, v)| {
            let exponent = p.at(n);
            exponent * (v.norm() / lambda).powf(exponent) / lambda
        })
        .collect::<KahanSum>()
        .value()
}

/// Luxemburg norm together with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// `rho(a / value) - 1` at the returned value.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `rho(a / lambda) = 1` for `lambda`.
///
/// The map `lambda -> rho(a / lambda)` is continuous and strictly decreasing
/// for nonzero finitely supported `a`, so the infimum is the unique root.
/// The root is bracketed from below at `max|a_n| / #supp(a)` (where the
/// largest term alone is at least 1), the upper end is found by doubling,
/// and bisection runs until the bracket collapses to adjacent floats. A single
/// Newton step is kept only if it improves the residual.
///
/// `tol` bounds `|rho(a / value) - 1|`; exceeding it after the iteration
/// budget yields [`Error::NonConvergence`].
pub fn luxemburg_norm(a: &SparseSequence, p: &ExponentSequence, tol: f64) -> Result<NormResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    if a.is_zero() {
        return Ok(NormResult {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    check_cap(a, p, DEFAULT_P_MAX)?;

    let f = |lambda: f64| scaled_modular(a, p, lambda) - 1.0;
    let mut iterations = 0;

    let mut lo = a.sup_norm() / a.len() as f64;
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(NormResult {
            value: lo,
            residual: 0.0,
            iterations,
        });
    }
    let mut hi = lo;
    let mut f_hi;
    loop {
        hi *= 2.0;
        iterations += 1;
        f_hi = f(hi);
        if f_hi <= 0.0 {
            break;
        }
        lo = hi;
        f_lo = f_hi;
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                residual: f_hi,
            });
        }
    }

    while iterations < MAX_ITERATIONS {
        debug_assert!(f_lo >= 0.0 && f_hi <= 0.0, "bracket lost its sign change");
        if f_hi == 0.0 {
            lo = hi;
            f_lo = f_hi;
            break;
        }
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f_mid = f(mid);
        if f_mid >= 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    let (mut value, mut residual) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };

    let slope = scaled_modular_derivative(a, p, value);
    if slope.is_finite() && slope < 0.0 {
        let polished = value - residual / slope;
        if polished >= lo && polished <= hi {
            let r = f(polished);
            if r.abs() < residual.abs() {
                value = polished;
                residual = r;
            }
        }
    }

    if residual.abs() > tol {
        return Err(Error::NonConvergence {
            iterations,
            residual,
        });
    }
    Ok(NormResult {
        value,
        residual,
        iterations,
    })
}

/// Norm value only, at [`DEFAULT_TOL`].
pub fn norm(a: &SparseSequence, p: &ExponentSequence) -> Result<f64> {
    luxemburg_norm(a, p, DEFAULT_TOL).map(|r| r.value)
}

/// Closed form `rho(a)^{1/p}` for a constant exponent, evaluated as
/// `M (sum (|a_n|/M)^p)^{1/p}` with `M = max |a_n|` so large `p` stays finite.
pub fn norm_constant_p_oracle(a: &SparseSequence, p_value: f64) -> f64 {
    let m = a.sup_norm();
    if m == 0.0 {
        return 0.0;
    }
    let inner = a
        .iter()
        .map(|(_, v)| (v.norm() / m).powf(p_value))
        .collect::<KahanSum>()
        .value();
    m * inner.powf(1.0 / p_value)
}
