use rayon::prelude::*;
use serde::Serialize;

use super::partitions::moment_pair_partitions;
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, FockWord, GramCache};
use crate::involution::GammaMap;
use crate::qspecial::{bracket, QContext};
use crate::transform::{default_nodes, WCoefficients};

/// Lower bound on the margin, beyond the tail bound, in units of the
/// quadrature tolerance, for a verdict to count as strict.
pub const STRICT_FACTOR: f64 = 10.0;
/// Tail masses below this are a normalization failure.
pub const NEGATIVE_TAIL_LIMIT: f64 = -1e-8;
/// Level cutoff of the two-mode space used for the operator route of `m4_sum`.
pub const SUM_LEVELS: usize = 6;

/// Numerical knobs shared by every stage of the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub tol_product: f64,
    pub tol_quad: f64,
    /// Overrides the truncation order `K`.
    pub k_max: Option<usize>,
    /// Overrides the quadrature node count of the w-coefficients.
    pub nodes: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tol_product: QContext::DEFAULT_TOL_PRODUCT,
            tol_quad: QContext::DEFAULT_TOL_QUAD,
            k_max: None,
            nodes: None,
        }
    }
}

impl PipelineConfig {
    pub fn context(&self, q: f64) -> Result<QContext> {
        let ctx = QContext::new(q)?.with_tolerances(self.tol_product, self.tol_quad)?;
        match self.k_max {
            Some(k) => ctx.with_k_max(k),
            None => Ok(ctx),
        }
    }

    /// Builds the involution and its coefficients for `q`.
    pub fn build(&self, q: f64) -> Result<(GammaMap, WCoefficients)> {
        let ctx = self.context(q)?;
        let gamma = GammaMap::new(&ctx);
        let k = ctx.k_max();
        let w = WCoefficients::build_with(&gamma, k, self.nodes.unwrap_or_else(|| default_nodes(k)))?;
        Ok((gamma, w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Operator,
    Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// `margin > tail_bound + 10 tol_quad` and `m4_gamma < m4_sum`.
    Strict,
    /// The margin is positive but inside the error budget.
    Inconclusive,
    /// The margin is not positive.
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaOperatorReport {
    /// `||(W X_0 W + X_1)^2 Omega||^2`, midpoint of the certified interval.
    pub value: f64,
    /// Half-width of the certified interval.
    pub uncertainty: f64,
    /// The same norm with every `W` truncated at `K`, applied literally.
    pub value_truncated: f64,
    /// `||(gamma(X_0)^2 + X_1^2) Omega||^2`.
    pub first_piece: f64,
    /// `||(gamma(X_0) X_1 + X_1 gamma(X_0)) Omega||^2`.
    pub second_piece: f64,
    /// `|value - first_piece - second_piece|` on the explicit vectors.
    pub decomposition_residual: f64,
    /// Norm lost by truncating `W~ e_1` and `W~ e_2` at `K`.
    pub leakage_1: f64,
    pub leakage_2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremDiagnostics {
    pub verdict: Verdict,
    pub k_max: usize,
    pub nodes: usize,
    pub m4_sum_operator: f64,
    pub m4_sum_partition: f64,
    pub m4_gamma_operator: f64,
    pub m4_gamma_operator_uncertainty: f64,
    pub m4_gamma_truncated: f64,
    pub decomposition_residual: f64,
    pub first_piece: f64,
    pub second_piece: f64,
    pub tail_mass: f64,
    pub direct_unitarity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub q: f64,
    pub m4_sum: f64,
    pub m4_gamma: f64,
    pub s_of_q: f64,
    pub tail_bound: f64,
    pub margin: f64,
    pub method: Method,
    pub diagnostics: TheoremDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub q: f64,
    pub m4_sum: f64,
    pub m4_gamma: f64,
    pub s: f64,
    pub margin: f64,
    pub tail: f64,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

pub fn m4_sum_analytic(q: f64) -> f64 {
    8.0 + 4.0 * q
}

/// `||(X_0 + X_1)^2 Omega||_q^2` on the two-mode space with `n_levels` levels.
pub fn m4_sum_operator(q: f64, n_levels: usize) -> Result<f64> {
    if n_levels < 5 {
        return Err(Error::Config(format!("operator route needs at least 5 levels, got {n_levels}")));
    }
    QContext::new(q)?;
    let space = FockSpace::new(2, n_levels, q)?;
    let x = space.field(0).plus(&space.field(1));
    let v = x.apply(&x.apply(&space.vacuum()));
    Ok(space.inner(&v, &v))
}

/// `S(q) = sum_{k<=K} w_k1^2 q^k [k]_q!` with the bound
/// `q^{K+1} (1 - sum_{k<=K} w_k1^2 [k]_q!)` on the omitted terms.
pub fn s_of_q(w: &WCoefficients) -> Result<(f64, f64)> {
    let q = w.q();
    let mut value = 0.0;
    let mut mass = 0.0;
    let mut power = 1.0;
    for k in 0..=w.k_max() {
        let c = w.w_hat(k, 1).powi(2);
        value += c * power;
        mass += c;
        power *= q;
    }
    let tail = 1.0 - mass;
    if tail < NEGATIVE_TAIL_LIMIT {
        return Err(Error::NegativeTail(tail));
    }
    Ok((value, power * tail.max(0.0)))
}

pub fn m4_gamma_analytic(q: f64, s: f64) -> f64 {
    8.0 + 2.0 * q + 2.0 * s
}

/// `W~` on one-mode vectors, truncated at `K`; components above `K` are dropped.
fn apply_w(w: &WCoefficients, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (word, c) in v.terms() {
        let n = word.level();
        if n > w.k_max() {
            continue;
        }
        for k in (n % 2..=w.k_max()).step_by(2) {
            out.add_term(FockWord::power(0, k), c * w.w(k, n));
        }
    }
    out
}

/// `sum_{k<=K} w_kn f_0^{(x) k}`, i.e. `W~ e_n` truncated.
fn w_column(w: &WCoefficients, n: usize) -> FockVector {
    apply_w(w, &FockVector::basis(FockWord::power(0, n)))
}

/// Fourth moment of `gamma(X_0) + X_1` from explicit Fock vectors.
///
/// The four terms of `(gamma(X_0) + X_1)^2 Omega` are built from the
/// truncated columns `W~ e_1` and `W~ e_2`. The norm lost to truncation is
/// restored from the direct-route norms of those columns, except for the
/// cross term `sum_{k>K} w_k1^2 q^k [k]_q!`, which lies in
/// `[0, q^{K+1} leakage_1]` and sets the uncertainty.
pub fn m4_gamma_operator(w: &WCoefficients) -> Result<GammaOperatorReport> {
    let q = w.q();
    let k_max = w.k_max();
    if k_max < 2 {
        return Err(Error::Config("operator route needs K >= 2".into()));
    }
    let mut gram = GramCache::new(q);
    let omega = FockVector::vacuum();
    let one_one = FockVector::basis(FockWord::new([1, 1]));

    let col1 = w_column(w, 1);
    let col2 = w_column(w, 2);
    // gamma(X_0)^2 Omega = W X_0^2 W Omega = W~ e_2 + Omega.
    let a = col2.sum(&omega);
    let d = one_one.sum(&omega);
    // gamma(X_0) X_1 Omega = W a_0^* f_1 = sum_k w_k1 f_0^k f_1.
    let mut b = FockVector::zero();
    let mut c = FockVector::zero();
    for (word, coeff) in col1.terms() {
        b.add_term(word.concat(&FockWord::new([1])), coeff);
        c.add_term(FockWord::new([1]).concat(word), coeff);
    }
    let first = a.sum(&d);
    let second = b.sum(&c);
    let whole = first.sum(&second);
    let explicit = whole.norm_sq(&mut gram);
    let first_norm = first.norm_sq(&mut gram);
    let second_norm = second.norm_sq(&mut gram);
    let decomposition_residual = (explicit - first_norm - second_norm).abs();

    let leakage_1 = w.leakage(1, k_max);
    let leakage_2 = bracket(2, q) * w.leakage(2, k_max);
    let uncertainty = q.powi(k_max as i32 + 1) * leakage_1.max(0.0);
    let first_piece = first_norm + leakage_2;
    let second_piece = second_norm + 2.0 * leakage_1 + uncertainty;

    // Literal truncation: (W X_0 W)^2 Omega with W~ cut at K at every step.
    let mut lit = omega.clone();
    for _ in 0..2 {
        lit = apply_w(w, &lit.field(0, q));
    }
    let lit_whole = lit.sum(&d).sum(&second);
    let value_truncated = lit_whole.norm_sq(&mut gram);

    Ok(GammaOperatorReport {
        value: first_piece + second_piece,
        uncertainty,
        value_truncated,
        first_piece,
        second_piece,
        decomposition_residual,
        leakage_1,
        leakage_2,
    })
}

pub fn theorem_check(q: f64) -> Result<MomentReport> {
    theorem_check_with(q, &PipelineConfig::default())
}

pub fn theorem_check_with(q: f64, config: &PipelineConfig) -> Result<MomentReport> {
    let (_, w) = config.build(q)?;
    report_from(&w, config.tol_quad)
}

/// Assembles the report from prebuilt coefficients.
pub fn report_from(w: &WCoefficients, tol_quad: f64) -> Result<MomentReport> {
    let q = w.q();
    let (s, tail_bound) = s_of_q(w)?;
    let m4_sum = m4_sum_analytic(q);
    let m4_gamma = m4_gamma_analytic(q, s);
    let margin = q - s;
    let operator = m4_gamma_operator(w)?;
    let verdict = if margin > tail_bound + STRICT_FACTOR * tol_quad && m4_gamma < m4_sum {
        Verdict::Strict
    } else if margin > 0.0 {
        Verdict::Inconclusive
    } else {
        Verdict::Violated
    };
    Ok(MomentReport {
        q,
        m4_sum,
        m4_gamma,
        s_of_q: s,
        tail_bound,
        margin,
        method: Method::Analytic,
        diagnostics: TheoremDiagnostics {
            verdict,
            k_max: w.k_max(),
            nodes: w.nodes(),
            m4_sum_operator: m4_sum_operator(q, SUM_LEVELS)?,
            m4_sum_partition: 4.0 * moment_pair_partitions(4, q)?,
            m4_gamma_operator: operator.value,
            m4_gamma_operator_uncertainty: operator.uncertainty,
            m4_gamma_truncated: operator.value_truncated,
            decomposition_residual: operator.decomposition_residual,
            first_piece: operator.first_piece,
            second_piece: operator.second_piece,
            tail_mass: w.diagnostics().tail_mass,
            direct_unitarity: w.diagnostics().direct_unitarity,
        },
    })
}

/// `steps` equally spaced points from `qmin` to `qmax`.
pub fn uniform_grid(qmin: f64, qmax: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![qmin],
        _ => (0..steps)
            .map(|i| qmin + (qmax - qmin) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Runs the theorem pipeline on every grid point in parallel; rows come back
/// sorted by `q`, with per-row failures recorded in `error`.
pub fn sweep(grid: &[f64], config: &PipelineConfig) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&q| match theorem_check_with(q, config) {
            Ok(r) => SweepRow {
                q,
                m4_sum: r.m4_sum,
                m4_gamma: r.m4_gamma,
                s: r.s_of_q,
                margin: r.margin,
                tail: r.tail_bound,
                verdict: Some(r.diagnostics.verdict),
                error: None,
            },
            Err(e) => SweepRow {
                q,
                m4_sum: f64::NAN,
                m4_gamma: f64::NAN,
                s: f64::NAN,
                margin: f64::NAN,
                tail: f64::NAN,
                verdict: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    rows.sort_by(|a, b| a.q.total_cmp(&b.q));
    rows
}
