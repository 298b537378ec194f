use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockWord};
use crate::involution::GammaMap;
use crate::moments::{m4_gamma_operator, m4_sum_analytic, m4_sum_operator, report_from, PipelineConfig};
use crate::transform::{build_big_w, w_property_checks, WCoefficients};

/// How an item's value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `value <= tolerance`.
    AtMost,
    /// `value >= -tolerance`.
    AtLeastNegative,
    /// `value > tolerance`.
    Exceeds,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyItem {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub rule: Rule,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub q: f64,
    pub level: usize,
    pub items: Vec<VerifyItem>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn item(&self, name: &str) -> Option<&VerifyItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyItem> {
        self.items.iter().filter(|i| !i.pass)
    }
}

#[derive(Default)]
struct Items(Vec<VerifyItem>);

impl Items {
    fn push(&mut self, name: impl Into<String>, value: f64, tolerance: f64, rule: Rule) {
        let pass = match rule {
            Rule::AtMost => value <= tolerance,
            Rule::AtLeastNegative => value >= -tolerance,
            Rule::Exceeds => value > tolerance,
        };
        self.0.push(VerifyItem {
            name: name.into(),
            value,
            tolerance,
            rule,
            pass,
        });
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.push(name, value, tolerance, Rule::AtMost);
    }
}

/// Smallest level cutoff the suite accepts.
pub const MIN_LEVEL: usize = 4;

/// Runs every structural and numerical invariant at `q` on a two-mode space
/// with `level` levels.
pub fn verify(q: f64, level: usize, config: &PipelineConfig) -> Result<VerifyReport> {
    if level < MIN_LEVEL {
        return Err(Error::Config(format!("verify needs --level >= {MIN_LEVEL}, got {level}")));
    }
    let (gamma, w) = config.build(q)?;
    let space = FockSpace::new(2, level, q)?;
    let mut items = Items::default();
    fock_items(&space, &mut items)?;
    gamma_items(&gamma, config.tol_quad, &mut items)?;
    w_items(&gamma, &w, &mut items)?;
    w_operator_items(&space, &gamma, &w, &mut items)?;
    theorem_items(&w, config.tol_quad, &mut items)?;
    let all_pass = items.0.iter().all(|i| i.pass);
    Ok(VerifyReport {
        q,
        level,
        items: items.0,
        all_pass,
    })
}

fn fock_items(space: &FockSpace, items: &mut Items) -> Result<()> {
    let n = space.n_max();
    for (i, j) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        items.at_most(format!("commutation_{i}{j}"), space.commutation_check(i, j), 1e-13);
    }
    for l in 0..=n.min(5) {
        items.push(
            format!("gram_min_eigenvalue_level_{l}"),
            space.gram_min_eigenvalue(l),
            1e-12,
            Rule::AtLeastNegative,
        );
    }
    for mode in 0..2u8 {
        items.at_most(format!("adjointness_mode_{mode}"), space.adjointness_residual(mode), 1e-12);
    }
    for k in 1..=3 {
        items.at_most(format!("pn_identity_n{k}"), space.pn_operator_check(k), 1e-12);
    }
    for l in 1..=4 {
        let dim = space.kernel_basis(l)?.len() as f64;
        items.at_most(format!("kernel_dim_level_{l}"), (dim - (1u64 << (l - 1)) as f64).abs(), 0.0);
    }
    let f1 = space.kernel_basis(1)?.remove(0);
    items.at_most("v_isometry_f1_n2_m1", space.v_isometry_check(2, &f1, 1, &f1).abs(), 1e-12);
    items.at_most("v_isometry_f1_n2_m2", space.v_isometry_check(2, &f1, 2, &f1).abs(), 1e-12);
    items.at_most("v_isometry_all_pairs", space.v_isometry_sweep()?, 1e-10);
    for l in 0..=n.min(4) {
        let r = space.completeness_check(l)?;
        items.at_most(
            format!("completeness_defect_level_{l}"),
            (r.defect.abs() + r.rank_defect.abs()) as f64,
            0.0,
        );
    }
    let x0 = space.field(0);
    let xs = x0.plus(&space.field(1));
    for half in 1..=n.min(4) {
        let lhs = space.vacuum_moment(&xs, 2 * half);
        let rhs = 2f64.powi(half as i32) * space.vacuum_moment(&x0, 2 * half);
        items.at_most(format!("vacuum_moment_scaling_order_{}", 2 * half), ((lhs - rhs) / rhs).abs(), 1e-10);
    }
    Ok(())
}

fn gamma_items(gamma: &GammaMap, tol_quad: f64, items: &mut Items) -> Result<()> {
    let l = gamma.ctx().support();
    let grid: Vec<f64> = (1..=200).map(|i| -l + 2.0 * l * i as f64 / 201.0).collect();
    let mut involution: f64 = 0.0;
    let mut oddness: f64 = 0.0;
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        let y = gamma.eval(x)?;
        involution = involution.max((gamma.eval(y)? - x).abs());
        oddness = oddness.max((gamma.eval(-x)? + y).abs());
        values.push(y);
    }
    let mut violations = 0usize;
    for i in 1..grid.len() {
        if grid[i - 1] * grid[i] > 0.0 && values[i] >= values[i - 1] {
            violations += 1;
        }
    }
    items.at_most("gamma_involution", involution, 1e-6);
    items.at_most("gamma_oddness", oddness, 1e-8);
    items.at_most("gamma_monotone_violations", violations as f64, 0.0);
    items.at_most("gamma_boundary", gamma.eval(l)?.abs() + gamma.eval(-l)?.abs(), 0.0);
    let xs = gamma.fixed_point();
    items.at_most("gamma_fixed_point", (gamma.eval(xs)? - xs).abs(), 1e-8);

    let cdf = gamma.cdf();
    let mut mass: f64 = 0.0;
    for (a, b) in [(0.05, 0.3), (0.1, 0.6), (0.4, 0.95)] {
        let (a, b) = (a * l, b * l);
        let lhs = cdf.cdf(b)? - cdf.cdf(a)?;
        let rhs = cdf.cdf(gamma.eval(a)?)? - cdf.cdf(gamma.eval(b)?)?;
        mass = mass.max((lhs - rhs).abs());
    }
    items.at_most("gamma_measure_preservation", mass, 2.0 * tol_quad);
    items.at_most("gamma_pushforward_order_8", gamma.check_pushforward(8)?.max_discrepancy, 1e-7);

    let mut ode: f64 = 0.0;
    for i in 1..=20 {
        let x = l * (i as f64 / 21.0 * 0.98 + 0.01) * if i % 2 == 0 { 1.0 } else { -1.0 };
        ode = ode.max(gamma.ode_residual(x, 1e-4)?.abs());
    }
    items.at_most("gamma_ode_residual", ode, 1e-5);
    Ok(())
}

fn w_items(gamma: &GammaMap, w: &WCoefficients, items: &mut Items) -> Result<()> {
    let d = w.diagnostics();
    items.at_most("w00", (w.w(0, 0) - 1.0).abs(), 1e-10);
    items.at_most("w_parity", d.parity_residual, 1e-10);
    items.at_most("w_norm_e1_truncated", d.tail_mass.abs(), 1e-6);
    items.at_most("w_gram_unitarity_truncated", d.truncated_unitarity, 1e-6);
    items.at_most("w_involution_truncated", d.involution_residual, 1e-6);
    items.at_most("w_gram_unitarity_completed", d.direct_unitarity, 1e-6);
    items.at_most("w_node_consistency", w.node_consistency(gamma)?, 1e-8);
    Ok(())
}

fn w_operator_items(space: &FockSpace, gamma: &GammaMap, w: &WCoefficients, items: &mut Items) -> Result<()> {
    let big = build_big_w(space, w)?;
    items.at_most("big_w_reconstruction_defect", big.reconstruction_defect, 1e-3);
    let report = w_property_checks(space, &big, w, gamma)?;
    items.at_most("w_operator_squared", report.involution_residual, 1e-6);
    items.at_most("w_operator_self_adjoint", report.self_adjoint_residual, 1e-8);
    for m in &report.moments {
        items.at_most(format!("w_conjugate_vacuum_moment_{}", m.m), (m.value - m.target).abs(), 1e-6);
    }
    let omega = space.vacuum();
    let vac = space.norm(&(big.op.apply(&omega) - &omega));
    items.at_most("w_operator_fixes_vacuum", vac, 1e-12);
    items.at_most("w_operator_fixes_kernel", report.kernel_residual, 1e-10);
    items.at_most("w_operator_series", report.series_residual, 1e-10);
    let f1 = space.index_of(&FockWord::new([1])).map(|i| space.basis(i));
    if let Some(f1) = f1 {
        items.at_most("w_operator_fixes_f1", space.norm(&(big.op.apply(&f1) - &f1)), 1e-12);
    }
    Ok(())
}

fn theorem_items(w: &WCoefficients, tol_quad: f64, items: &mut Items) -> Result<()> {
    let q = w.q();
    let report = report_from(w, tol_quad)?;
    let op = m4_gamma_operator(w)?;
    items.at_most("m4_sum_operator", (m4_sum_operator(q, 6)? - m4_sum_analytic(q)).abs(), 1e-10);
    items.at_most("m4_gamma_decomposition_residual", op.decomposition_residual, 1e-8);
    items.at_most("m4_gamma_first_piece", (op.first_piece - (6.0 + 2.0 * q)).abs(), 1e-6);
    items.at_most(
        "m4_gamma_route_agreement",
        (op.value - report.m4_gamma).abs(),
        1e-5 + report.tail_bound,
    );
    items.push(
        "theorem_margin",
        report.margin,
        report.tail_bound + 10.0 * tol_quad,
        Rule::Exceeds,
    );
    Ok(())
}
