//! The coefficients `w_kn` of the one-mode transform `W~` and its extension
//! `W = V (W~ (x) Id) V^*` to the two-mode Fock space.
//!
//! `W~` is `f -> f o gamma` written in the q-Hermite basis:
//! `w_kn = (1/[k]_q!) int H_k(x) H_n(gamma(x)) dnu_q(x)`. Internally the
//! orthonormal form `w^_kn = int p_k(x) p_n(gamma(x)) dnu_q`, with
//! `w_kn = sqrt([n]_q! / [k]_q!) w^_kn`, is stored; it is symmetric.
//!
//! Integrals over the right half use the swap rule
//! `int_{x>0} F(x, gamma x) dnu = int_{x*}^{L} [F(x, gamma x) + F(gamma x, x)] dnu`,
//! which keeps the integrand smooth in the angle variable on `[0, theta*]`.
//! The left half follows by oddness of `gamma` and parity of `p_k`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, OperatorKind, OperatorRep};
use crate::integrate::{GaussPanels, TanhSinh};
use crate::involution::{GammaMap, DIRECT_STEP};
use crate::qspecial::{factorial, fill_orthonormal};

/// Order of each Gauss-Legendre panel on `[0, theta*]`.
pub const PANEL_ORDER: usize = 32;
/// Highest degree of the direct-route Gram matrix `int p_i(gamma) p_j(gamma)`.
pub const DIRECT_DEGREE: usize = 12;
/// Limit on the direct-route unitarity residual before the build is rejected.
pub const UNITARITY_LIMIT: f64 = 1e-5;
/// Limit on the V-reconstruction defect of [`build_big_w`].
pub const PROJECTION_LIMIT: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct WDiagnostics {
    pub k_max: usize,
    pub nodes: usize,
    /// `1 - sum_{k<=K} w_k1^2 [k]_q!`.
    pub tail_mass: f64,
    /// Largest `|w_kn|` with `k + n` odd.
    pub parity_residual: f64,
    /// Largest `|sum_{k<=K} w^_ki w^_kj - delta_ij|` for `i, j <= min(12, K/2)`.
    pub truncated_unitarity: f64,
    /// Largest `|int p_i(gamma) p_j(gamma) dnu - delta_ij|` for `i, j <= 12`.
    pub direct_unitarity: f64,
    /// Largest `|sum_{k<=K} w_ik w_kj - delta_ij|` for `i, j <= K/2`.
    pub involution_residual: f64,
}

#[derive(Clone, Debug)]
pub struct WCoefficients {
    q: f64,
    k_max: usize,
    nodes: usize,
    normalized: DMatrix<f64>,
    factorials: Vec<f64>,
    direct_gram: DMatrix<f64>,
    diagnostics: WDiagnostics,
}

/// Default quadrature size for truncation order `k`.
pub fn default_nodes(k: usize) -> usize {
    (k + 64).max(256)
}

impl WCoefficients {
    /// Builds `w` to the order `K` of the map's context with the default
    /// node count.
    pub fn build(gamma: &GammaMap) -> Result<Self> {
        let k = gamma.ctx().k_max();
        Self::build_with(gamma, k, default_nodes(k))
    }

    pub fn build_with(gamma: &GammaMap, k_max: usize, nodes: usize) -> Result<Self> {
        if k_max == 0 || nodes == 0 {
            return Err(Error::Config("w-coefficients need K >= 1 and at least one node".into()));
        }
        let q = gamma.ctx().q();
        let normalized = swap_rule_matrix(gamma, k_max, nodes);
        let direct_gram = direct_gram(gamma, DIRECT_DEGREE.min(k_max));
        let factorials = (0..=k_max).map(|k| factorial(k, q)).collect();
        let mut w = Self {
            q,
            k_max,
            nodes: nodes.div_ceil(PANEL_ORDER) * PANEL_ORDER,
            normalized,
            factorials,
            direct_gram,
            diagnostics: WDiagnostics {
                k_max,
                nodes: 0,
                tail_mass: 0.0,
                parity_residual: 0.0,
                truncated_unitarity: 0.0,
                direct_unitarity: 0.0,
                involution_residual: 0.0,
            },
        };
        w.diagnostics = w.compute_diagnostics();
        if !(w.diagnostics.direct_unitarity <= UNITARITY_LIMIT) {
            return Err(Error::UnderResolved {
                residual: w.diagnostics.direct_unitarity,
                limit: UNITARITY_LIMIT,
            });
        }
        Ok(w)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn diagnostics(&self) -> &WDiagnostics {
        &self.diagnostics
    }

    /// `w_kn`.
    pub fn w(&self, k: usize, n: usize) -> f64 {
        self.normalized[(k, n)] * (self.factorials[n] / self.factorials[k]).sqrt()
    }

    /// `w^_kn = int p_k p_n(gamma) dnu_q`.
    pub fn w_hat(&self, k: usize, n: usize) -> f64 {
        self.normalized[(k, n)]
    }

    pub fn normalized(&self) -> &DMatrix<f64> {
        &self.normalized
    }

    /// `[k]_q!` for `k <= K`.
    pub fn factorial(&self, k: usize) -> f64 {
        self.factorials[k]
    }

    /// `int p_i(gamma) p_j(gamma) dnu_q` for `i, j <= min(K, 12)`.
    pub fn direct_gram(&self) -> &DMatrix<f64> {
        &self.direct_gram
    }

    /// `(w_k1, w_k1^2 [k]_q!)` for `k <= K`.
    pub fn column_one(&self) -> Vec<(f64, f64)> {
        (0..=self.k_max)
            .map(|k| (self.w(k, 1), self.w_hat(k, 1).powi(2)))
            .collect()
    }

    /// `||W~ e_n||^2 / [n]_q!` minus its part on `e_k, k <= m`, using the
    /// direct-route norm for the full vector. Needs `n <= min(K, 12)`.
    pub fn leakage(&self, n: usize, m: usize) -> f64 {
        let kept: f64 = (0..=m.min(self.k_max)).map(|k| self.w_hat(k, n).powi(2)).sum();
        self.direct_gram[(n, n)] - kept
    }

    /// Largest `|w_k1(nodes) - w_k1(2 nodes)|`.
    pub fn node_consistency(&self, gamma: &GammaMap) -> Result<f64> {
        let fine = Self::build_with(gamma, self.k_max, 2 * self.nodes)?;
        Ok((0..=self.k_max)
            .map(|k| (self.w(k, 1) - fine.w(k, 1)).abs())
            .fold(0.0, f64::max))
    }

    fn compute_diagnostics(&self) -> WDiagnostics {
        let k = self.k_max;
        let wh = &self.normalized;
        let tail_mass = 1.0 - (0..=k).map(|i| wh[(i, 1.min(k))].powi(2)).sum::<f64>();
        let mut parity_residual: f64 = 0.0;
        for i in 0..=k {
            for j in 0..=k {
                if (i + j) % 2 == 1 {
                    parity_residual = parity_residual.max(self.w(i, j).abs());
                }
            }
        }
        let half = (k / 2).min(DIRECT_DEGREE);
        let gram = wh.columns(0, half + 1).transpose() * wh.columns(0, half + 1);
        let truncated_unitarity = max_off_identity(&gram);
        let direct_unitarity = max_off_identity(&self.direct_gram);
        let half = k / 2;
        // In normalized form W~^2 = Id reads sum_k w^_ik w^_kj = delta_ij.
        let square = wh.rows(0, half + 1) * wh.columns(0, half + 1);
        let involution_residual = max_off_identity(&square);
        WDiagnostics {
            k_max: k,
            nodes: self.nodes,
            tail_mass,
            parity_residual,
            truncated_unitarity,
            direct_unitarity,
            involution_residual,
        }
    }
}

fn max_off_identity(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

/// `w^` by the swap rule on `[0, theta*]`.
fn swap_rule_matrix(gamma: &GammaMap, k_max: usize, nodes: usize) -> DMatrix<f64> {
    let q = gamma.ctx().q();
    let l = gamma.ctx().support();
    let density = gamma.cdf().density();
    let theta_star = density.theta_of(gamma.fixed_point());
    let rule = GaussPanels::new(nodes.div_ceil(PANEL_ORDER), PANEL_ORDER);
    let points = rule.nodes(0.0, theta_star);
    let mut px = DMatrix::zeros(k_max + 1, points.len());
    let mut py = DMatrix::zeros(k_max + 1, points.len());
    let mut buf = vec![0.0; k_max + 1];
    for (j, &(theta, weight)) in points.iter().enumerate() {
        let root = (weight * density.theta_density(theta)).sqrt();
        let x = l * theta.cos();
        let y = gamma.positive_branch(theta, std::f64::consts::FRAC_PI_2 - theta);
        fill_orthonormal(&mut buf, x, q);
        px.column_mut(j).copy_from_slice(&buf);
        fill_orthonormal(&mut buf, y, q);
        py.column_mut(j).copy_from_slice(&buf);
        px.column_mut(j).scale_mut(root);
        py.column_mut(j).scale_mut(root);
    }
    let cross = &px * py.transpose();
    let right = &cross + cross.transpose();
    DMatrix::from_fn(k_max + 1, k_max + 1, |k, n| {
        if (k + n) % 2 == 0 {
            2.0 * right[(k, n)]
        } else {
            0.0
        }
    })
}

/// `int p_i(gamma) p_j(gamma) dnu_q` by tanh-sinh, independent of the swap rule.
fn direct_gram(gamma: &GammaMap, degree: usize) -> DMatrix<f64> {
    let q = gamma.ctx().q();
    let samples = gamma.direct_samples(&TanhSinh::new(DIRECT_STEP));
    let mut p = DMatrix::zeros(degree + 1, samples.len());
    let mut buf = vec![0.0; degree + 1];
    for (j, &(w, _, y)) in samples.iter().enumerate() {
        fill_orthonormal(&mut buf, y, q);
        let root = w.sqrt();
        for (i, v) in buf.iter().enumerate() {
            p[(i, j)] = v * root;
        }
    }
    &p * p.transpose()
}

/// The extension `W` on a truncated two-mode space.
#[derive(Clone, Debug)]
pub struct BigW {
    pub op: OperatorRep,
    /// Largest Gram norm of `psi - sum_n (a_0^*)^n phi_n` over basis words.
    pub reconstruction_defect: f64,
    /// Largest relative norm lost by truncating `W e_j` at the cutoff.
    pub max_leakage: f64,
}

/// `W = V (W~ (x) Id) V^*` on `space`, truncated at its cutoff.
pub fn build_big_w(space: &FockSpace, w: &WCoefficients) -> Result<BigW> {
    let n_max = space.n_max();
    if w.k_max() < n_max {
        return Err(Error::Config(format!(
            "w-coefficients to order {} cannot fill a space with cutoff {n_max}",
            w.k_max()
        )));
    }
    let dim = space.dim();
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut reconstruction_defect: f64 = 0.0;
    let mut max_leakage: f64 = 0.0;
    let creation = space.creation(0);
    for level in 0..=n_max {
        for j in space.level_range(level) {
            let psi = space.basis(j);
            let parts = space.decompose(&psi, level);
            let mut back = DVector::zeros(dim);
            let mut image = DVector::zeros(dim);
            for (n, phi) in parts.iter().enumerate() {
                if phi.amax() == 0.0 {
                    continue;
                }
                back += space.raise(phi, n);
                let room = n_max - (level - n);
                let mut raised = phi.clone();
                for k in 0..=room {
                    let c = w.w(k, n);
                    if c != 0.0 {
                        image += &raised * c;
                    }
                    raised = creation.apply(&raised);
                }
            }
            reconstruction_defect = reconstruction_defect.max(space.norm(&(back - &psi)));
            let norm = space.inner(&psi, &psi);
            max_leakage = max_leakage.max((norm - space.inner(&image, &image)) / norm);
            matrix.set_column(j, &image);
        }
    }
    if reconstruction_defect > PROJECTION_LIMIT {
        return Err(Error::Truncation {
            defect: reconstruction_defect,
            limit: PROJECTION_LIMIT,
        });
    }
    Ok(BigW {
        op: OperatorRep::new(matrix, OperatorKind::Mixed),
        reconstruction_defect,
        max_leakage,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentCheck {
    pub m: usize,
    pub value: f64,
    pub target: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WPropertyReport {
    /// Largest entry of `W^2 - Id` on columns at levels `<= N - 1`.
    pub involution_residual: f64,
    /// Largest entry of `G W - W^T G`.
    pub self_adjoint_residual: f64,
    /// `<Omega, (W X_0 W)^m Omega>_q` against `int gamma^m dnu_q`.
    pub moments: Vec<MomentCheck>,
    pub moment_residual: f64,
    /// Largest Gram norm of `W phi - phi` over kernel bases.
    pub kernel_residual: f64,
    /// Largest Gram norm of `W X_0 phi - sum_{k=1}^{N-l} w_k1 (a_0^*)^k phi`.
    pub series_residual: f64,
    /// Largest norm of the omitted terms `k > N - l`, relative to `||phi||`.
    pub series_tail: f64,
}

/// Residuals of the four structural properties of `W`.
pub fn w_property_checks(space: &FockSpace, big: &BigW, w: &WCoefficients, gamma: &GammaMap) -> Result<WPropertyReport> {
    let n_max = space.n_max();
    let wm = &big.op.matrix;
    let id = DMatrix::<f64>::identity(space.dim(), space.dim());
    let square = wm * wm - &id;
    let involution_residual = space.max_abs_on_levels(&square, n_max.saturating_sub(1));
    let g = space.gram_full();
    let self_adjoint_residual = (g * wm - wm.transpose() * g).amax();

    let x0 = space.field(0);
    let conjugated = big.op.compose(&x0).compose(&big.op);
    let reference = gamma.check_pushforward(6)?;
    let moments: Vec<MomentCheck> = (1..=6)
        .map(|m| MomentCheck {
            m,
            value: space.vacuum_moment(&conjugated, m),
            target: reference.rows[m].gamma_moment,
        })
        .collect();
    let moment_residual = moments.iter().map(|c| (c.value - c.target).abs()).fold(0.0, f64::max);

    let mut kernel_residual: f64 = 0.0;
    let mut series_residual: f64 = 0.0;
    let mut series_tail: f64 = 0.0;
    let creation = space.creation(0);
    for level in 0..=n_max {
        for phi in space.kernel_basis(level)? {
            kernel_residual = kernel_residual.max(space.norm(&(big.op.apply(&phi) - &phi)));
            if level == n_max {
                continue;
            }
            let lhs = big.op.apply(&x0.apply(&phi));
            let mut rhs = DVector::zeros(space.dim());
            let mut raised = creation.apply(&phi);
            for k in 1..=n_max - level {
                rhs += &raised * w.w(k, 1);
                raised = creation.apply(&raised);
            }
            series_residual = series_residual.max(space.norm(&(lhs - rhs)));
            series_tail = series_tail.max(w.leakage(1, n_max - level).max(0.0).sqrt());
        }
    }
    Ok(WPropertyReport {
        involution_residual,
        self_adjoint_residual,
        moments,
        moment_residual,
        kernel_residual,
        series_residual,
        series_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::QContext;
    use approx::assert_abs_diff_eq;

    fn coefficients(q: f64, k: usize) -> (GammaMap, WCoefficients) {
        let g = GammaMap::new(&QContext::new(q).unwrap());
        let w = WCoefficients::build_with(&g, k, default_nodes(k)).unwrap();
        (g, w)
    }

    #[test]
    fn basic_entries_and_parity() {
        let (g, w) = coefficients(0.5, 24);
        assert_abs_diff_eq!(w.w(0, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.w(0, 1), 0.0, epsilon = 1e-15);
        assert_eq!(w.diagnostics().parity_residual, 0.0);
        assert!(w.diagnostics().direct_unitarity < 1e-8, "{:?}", w.diagnostics());
        // w_10 = int x dnu = 0 and w_11 = int x gamma(x) dnu.
        let direct: f64 = g
            .direct_samples(&TanhSinh::new(DIRECT_STEP))
            .iter()
            .map(|&(wt, x, y)| wt * x * y)
            .sum();
        assert_abs_diff_eq!(w.w(1, 1), direct, epsilon = 1e-9);
    }

    #[test]
    fn gram_symmetry_of_w() {
        let (_, w) = coefficients(0.3, 24);
        for k in 0..=10 {
            for n in 0..=10 {
                let lhs = w.w(k, n) * w.factorial(k);
                let rhs = w.w(n, k) * w.factorial(n);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }

    #[test]
    fn converges_under_refinement() {
        let (g, w) = coefficients(0.5, 24);
        assert!(w.node_consistency(&g).unwrap() < 1e-8);
    }

    #[test]
    fn big_w_fixes_kernel_and_vacuum() {
        let (g, w) = coefficients(0.5, 24);
        let space = FockSpace::new(2, 5, 0.5).unwrap();
        let big = build_big_w(&space, &w).unwrap();
        assert!(big.reconstruction_defect < 1e-12);
        let omega = space.vacuum();
        assert!((big.op.apply(&omega) - &omega).amax() < 1e-12);
        let report = w_property_checks(&space, &big, &w, &g).unwrap();
        assert!(report.kernel_residual < 1e-10);
        assert!(report.series_residual < 1e-10);
        assert!(report.self_adjoint_residual < 1e-8);
        assert_abs_diff_eq!(report.moments[0].value, 0.0, epsilon = 1e-12);
        assert!(report.series_tail > 0.0);
    }

    #[test]
    fn rejects_short_coefficients() {
        let (_, w) = coefficients(0.5, 4);
        let space = FockSpace::new(2, 6, 0.5).unwrap();
        assert!(build_big_w(&space, &w).is_err());
    }
}
