use serde::Serialize;

use crate::error::{Error, Result};

/// Deformation parameter together with the numeric knobs every pipeline
/// stage reads.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QContext {
    q: f64,
    support: f64,
    tol_product: f64,
    tol_quad: f64,
    k_max: usize,
    n_levels: usize,
}

impl QContext {
    pub const DEFAULT_TOL_PRODUCT: f64 = 1e-16;
    pub const DEFAULT_TOL_QUAD: f64 = 1e-10;
    pub const DEFAULT_LEVELS: usize = 6;
    pub const MIN_K: usize = 24;

    /// Context with default tolerances; `q` must lie in the open interval (0, 1).
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self {
            q,
            support: 2.0 / (1.0 - q).sqrt(),
            tol_product: Self::DEFAULT_TOL_PRODUCT,
            tol_quad: Self::DEFAULT_TOL_QUAD,
            k_max: Self::default_k_max(q, Self::DEFAULT_TOL_QUAD),
            n_levels: Self::DEFAULT_LEVELS,
        })
    }

    /// Series cutoff large enough that `q^(K+1)` drops below `tol`.
    pub fn default_k_max(q: f64, tol: f64) -> usize {
        let k = (tol.ln() / q.ln()).ceil();
        if k.is_finite() && k > Self::MIN_K as f64 {
            k as usize
        } else {
            Self::MIN_K
        }
    }

    /// Replaces both tolerances. The series cutoff is re-derived from `tol_quad`.
    pub fn with_tolerances(mut self, tol_product: f64, tol_quad: f64) -> Result<Self> {
        for (name, v) in [("tol_product", tol_product), ("tol_quad", tol_quad)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        self.tol_product = tol_product;
        self.tol_quad = tol_quad;
        self.k_max = Self::default_k_max(self.q, tol_quad);
        Ok(self)
    }

    pub fn with_k_max(mut self, k_max: usize) -> Result<Self> {
        if k_max < 4 {
            return Err(Error::Config(format!("series cutoff K must be >= 4, got {k_max}")));
        }
        self.k_max = k_max;
        Ok(self)
    }

    pub fn with_n_levels(mut self, n_levels: usize) -> Result<Self> {
        if n_levels < 4 {
            return Err(Error::Config(format!("level cutoff N must be >= 4, got {n_levels}")));
        }
        self.n_levels = n_levels;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Half-width `L = 2 / sqrt(1 - q)` of the support of `nu_q`.
    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn tol_product(&self) -> f64 {
        self.tol_product
    }

    pub fn tol_quad(&self) -> f64 {
        self.tol_quad
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}
