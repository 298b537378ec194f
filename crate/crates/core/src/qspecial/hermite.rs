use super::arith::bracket;

/// Monic continuous q-Hermite polynomial `H_n(x)` from
/// `H_{n+1} = x H_n - [n]_q H_{n-1}`, `H_0 = 1`, `H_1 = x`.
///
/// This normalization gives `<H_n, H_m> = delta_nm [n]_q!` in `L^2(nu_q)`.
pub fn hermite_eval(n: usize, x: f64, q: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = x * cur - bracket(k, q) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[H_0(x), ..., H_{n_max}(x)]`.
pub fn hermite_all(n_max: usize, x: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(x);
    }
    for k in 1..n_max {
        out.push(x * out[k] - bracket(k, q) * out[k - 1]);
    }
    out
}

/// Orthonormal versions `p_n = H_n / sqrt([n]_q!)` of the same family, from
/// `x p_n = sqrt([n+1]) p_{n+1} + sqrt([n]) p_{n-1}`. These stay bounded for
/// degrees where `[n]_q!` itself overflows.
pub fn orthonormal_hermite_all(n_max: usize, x: f64, q: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    fill_orthonormal(&mut out, x, q);
    out
}

pub(crate) fn fill_orthonormal(out: &mut [f64], x: f64, q: f64) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 1..out.len() - 1 {
        out[k + 1] = (x * out[k] - bracket(k, q).sqrt() * out[k - 1]) / bracket(k + 1, q).sqrt();
    }
}
