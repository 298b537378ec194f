use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::arith::bracket;
use super::context::QContext;
use crate::error::{Error, Result};

/// Gauss rule for `nu_q`.
#[derive(Clone, Debug, Serialize)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Golub-Welsch: the nodes are the eigenvalues of the truncated Jacobi matrix
/// (zero diagonal, off-diagonal `sqrt([n]_q)`), i.e. of the one-mode `a + a*`
/// restricted to levels below `n_nodes`; the weights are the squared first
/// components of the normalized eigenvectors.
pub fn quadrature(ctx: &QContext, n_nodes: usize) -> Result<GaussRule> {
    if n_nodes == 0 {
        return Err(Error::Config("quadrature needs at least one node".into()));
    }
    let q = ctx.q();
    let mut jacobi = DMatrix::<f64>::zeros(n_nodes, n_nodes);
    for n in 1..n_nodes {
        let b = bracket(n, q).sqrt();
        jacobi[(n - 1, n)] = b;
        jacobi[(n, n - 1)] = b;
    }
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen(format!("Jacobi matrix of size {n_nodes} did not converge")))?;
    let mut pairs: Vec<(f64, f64)> = (0..n_nodes)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.iter().any(|&(x, w)| !x.is_finite() || !(w > 0.0)) {
        return Err(Error::Eigen("non-finite node or non-positive weight".into()));
    }
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}
