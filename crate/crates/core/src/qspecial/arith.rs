use num_complex::Complex64;
use serde::Serialize;

use super::context::check_q;
use crate::error::Result;

/// `[n]_q = (1 - q^n) / (1 - q)`.
pub fn q_bracket(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(bracket(n, q))
}

pub(crate) fn bracket(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // 1 - q^n without cancellation for small q^n.
    -(n as f64 * q.ln()).exp_m1() / (1.0 - q)
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
///
/// Each factor is below `1 / (1 - q)`, so the product only overflows for
/// large `n` close to `q = 1`; use [`ln_q_factorial`] there.
pub fn q_factorial(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(factorial(n, q))
}

pub(crate) fn factorial(n: usize, q: f64) -> f64 {
    (1..=n).map(|j| bracket(j, q)).product()
}

pub fn ln_q_factorial(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((1..=n).map(|j| bracket(j, q).ln()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PochhammerOrder {
    Finite(usize),
    Infinite,
}

/// Value of `(a; q)_n` plus what was kept of an infinite product.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PochhammerValue {
    pub value: Complex64,
    /// Number of factors multiplied.
    pub factors: usize,
    /// A-priori bound on `|log(exact / truncated)|`; zero for finite orders.
    pub tail_bound: f64,
}

/// `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`.
///
/// For the infinite order the product stops at the first `M` with
/// `|a| q^M / (1 - q) < tol`, which bounds the logarithm of the dropped tail
/// (up to the factor `1 / (1 - |a| q^M)`, which is below `1 + tol`).
pub fn q_pochhammer(a: Complex64, q: f64, order: PochhammerOrder, tol: f64) -> Result<PochhammerValue> {
    check_q(q)?;
    let factors = match order {
        PochhammerOrder::Finite(n) => n,
        PochhammerOrder::Infinite => infinite_order(a.norm(), q, tol),
    };
    let mut value = Complex64::new(1.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..factors {
        value *= Complex64::new(1.0, 0.0) - a * qk;
        qk *= q;
    }
    let tail_bound = match order {
        PochhammerOrder::Finite(_) => 0.0,
        PochhammerOrder::Infinite => {
            let t = a.norm() * q.powi(factors as i32);
            t / ((1.0 - q) * (1.0 - t).max(f64::MIN_POSITIVE))
        }
    };
    Ok(PochhammerValue {
        value,
        factors,
        tail_bound,
    })
}

/// Smallest `M` with `|a| q^M / (1 - q) < tol`.
pub(crate) fn infinite_order(abs_a: f64, q: f64, tol: f64) -> usize {
    if abs_a == 0.0 {
        return 0;
    }
    let m = ((tol * (1.0 - q) / abs_a).ln() / q.ln()).floor() + 1.0;
    if m > 0.0 {
        m as usize
    } else {
        0
    }
}
