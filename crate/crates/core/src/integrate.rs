//! Fixed quadrature rules shared by the pipeline.
//!
//! Both rules hand out their nodes so that expensive integrands (anything that
//! evaluates the involution) are computed once and reused across many
//! test functions.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Composite Gauss-Legendre rule with equal panels.
#[derive(Clone, Debug)]
pub struct GaussPanels {
    panels: usize,
    reference: Vec<(f64, f64)>,
}

impl GaussPanels {
    pub fn new(panels: usize, order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).unwrap();
        let reference = GaussLegendre::new(order).as_node_weight_pairs().to_vec();
        Self {
            panels: panels.max(1),
            reference,
        }
    }

    pub fn len(&self) -> usize {
        self.panels * self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes and weights on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.len());
        for p in 0..self.panels {
            let lo = a + h * p as f64;
            for &(t, w) in &self.reference {
                out.push((lo + 0.5 * h * (t + 1.0), 0.5 * h * w));
            }
        }
        out
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.nodes(a, b).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Node of a rule on the unit interval, carrying both `s` and `1 - s` to full
/// relative precision so integrands can resolve either endpoint.
#[derive(Clone, Copy, Debug)]
pub struct UnitNode {
    pub s: f64,
    pub s_complement: f64,
    pub weight: f64,
}

/// Tanh-sinh (double exponential) rule on `(0, 1)` with step `h`.
///
/// Converges geometrically in `1/h` for integrands with algebraic endpoint
/// singularities.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    nodes: Vec<UnitNode>,
}

impl TanhSinh {
    pub fn new(h: f64) -> Self {
        let mut nodes = Vec::new();
        let mut k: i64 = 0;
        loop {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            // s = 1 / (1 + e^{-2u}), 1 - s = 1 / (1 + e^{2u})
            let e = (-2.0 * u).exp();
            let s = 1.0 / (1.0 + e);
            let sc = e / (1.0 + e);
            let weight = h * PI * t.cosh() * s * sc;
            if sc < 1e-300 || weight < 1e-300 {
                break;
            }
            nodes.push(UnitNode {
                s,
                s_complement: sc,
                weight,
            });
            if k > 0 {
                nodes.push(UnitNode {
                    s: sc,
                    s_complement: s,
                    weight,
                });
            }
            k += 1;
        }
        nodes.sort_by(|a, b| a.s.total_cmp(&b.s));
        Self { nodes }
    }

    pub fn nodes(&self) -> &[UnitNode] {
        &self.nodes
    }

    pub fn integrate<F: FnMut(&UnitNode) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}
