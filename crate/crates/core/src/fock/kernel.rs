use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use super::space::FockSpace;
use crate::error::{Error, Result};
use crate::qspecial::factorial;

/// Singular values below this count as zero in rank decisions.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub level: usize,
    pub expected: usize,
    /// `dims[n]` = dimension of `(a_0^*)^n` applied to the kernel at level `level - n`.
    pub dims: Vec<usize>,
    pub rank: usize,
    /// `d^level - sum(dims)`.
    pub defect: i64,
    /// `d^level - rank` of the union.
    pub rank_defect: i64,
}

impl FockSpace {
    /// Basis of `ker a_0` within `level`, orthonormal in the q-inner product,
    /// as full-space coordinate vectors.
    pub fn kernel_basis(&self, level: usize) -> Result<Vec<DVector<f64>>> {
        self.kernel_basis_with_tol(level, RANK_TOL)
    }

    pub fn kernel_basis_with_tol(&self, level: usize, tol: f64) -> Result<Vec<DVector<f64>>> {
        self.check_level(level)?;
        if level == 0 {
            return Ok(vec![self.vacuum()]);
        }
        let cols = self.level_range(level);
        let rows = self.level_range(level - 1);
        let a = self.annihilation(0).matrix;
        let n = cols.len();
        let mut block = DMatrix::zeros(n, n);
        block
            .view_mut((0, 0), (rows.len(), n))
            .copy_from(&a.view((rows.start, cols.start), (rows.len(), n)));
        let svd = SVD::new(block, false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Eigen("singular value decomposition failed".into()))?;
        let local: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < tol)
            .map(|(i, _)| v_t.row(i).transpose())
            .collect();
        let ortho = gram_schmidt(&local, self.gram(level));
        Ok(ortho.into_iter().map(|v| self.embed(level, &v)).collect())
    }

    /// `(a_0^*)^n v`.
    pub fn raise(&self, v: &DVector<f64>, n: usize) -> DVector<f64> {
        let mut out = v.clone();
        for _ in 0..n {
            out = self.raise_once(&out);
        }
        out
    }

    /// `<(a_0^*)^n phi, (a_0^*)^m xi>_q - delta_nm [n]_q! <phi, xi>_q`.
    pub fn v_isometry_check(&self, n: usize, phi: &DVector<f64>, m: usize, xi: &DVector<f64>) -> f64 {
        let lhs = self.inner(&self.raise(phi, n), &self.raise(xi, m));
        let rhs = if n == m { factorial(n, self.q()) * self.inner(phi, xi) } else { 0.0 };
        lhs - rhs
    }

    /// Largest `|v_isometry_check(n, phi, m, xi)|` over all kernel basis
    /// vectors `phi, xi` and all `n, m` that stay inside the cutoff, each
    /// relative to `sqrt([n]_q! [m]_q!)`, the size of the raised pair. Pairs
    /// landing on different levels are orthogonal by construction and are
    /// skipped.
    pub fn v_isometry_sweep(&self) -> Result<f64> {
        struct Raised {
            level: usize,
            n: usize,
            base: usize,
            v: DVector<f64>,
        }
        let mut bases: Vec<DVector<f64>> = Vec::new();
        let mut raised: Vec<Raised> = Vec::new();
        for level in 0..=self.n_max() {
            for phi in self.kernel_basis(level)? {
                let mut v = phi.clone();
                for n in 0..=self.n_max() - level {
                    raised.push(Raised { level: level + n, n, base: bases.len(), v: v.clone() });
                    v = self.raise_once(&v);
                }
                bases.push(phi);
            }
        }
        let images: Vec<DVector<f64>> = raised.iter().map(|r| self.gram_full() * &r.v).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in raised.iter().enumerate() {
            for (j, b) in raised.iter().enumerate().skip(i) {
                if a.level != b.level {
                    continue;
                }
                let lhs = a.v.dot(&images[j]);
                let rhs = if a.n == b.n {
                    factorial(a.n, self.q()) * self.inner(&bases[a.base], &bases[b.base])
                } else {
                    0.0
                };
                let scale = (factorial(a.n, self.q()) * factorial(b.n, self.q())).sqrt();
                worst = worst.max((lhs - rhs).abs() / scale);
            }
        }
        Ok(worst)
    }

    pub fn completeness_check(&self, level: usize) -> Result<CompletenessReport> {
        self.check_level(level)?;
        let range = self.level_range(level);
        let mut dims = Vec::with_capacity(level + 1);
        let mut columns: Vec<DVector<f64>> = Vec::new();
        for n in 0..=level {
            let kernel = self.kernel_basis(level - n)?;
            dims.push(kernel.len());
            for phi in &kernel {
                columns.push(self.raise(phi, n).rows(range.start, range.len()).into_owned());
            }
        }
        let rank = if columns.is_empty() {
            0
        } else {
            let m = DMatrix::from_columns(&columns);
            let s = m.singular_values();
            let top = s.max();
            s.iter().filter(|&&v| v > RANK_TOL * top.max(1.0)).count()
        };
        let expected = range.len();
        let total: usize = dims.iter().sum();
        Ok(CompletenessReport {
            level,
            expected,
            dims,
            rank,
            defect: expected as i64 - total as i64,
            rank_defect: expected as i64 - rank as i64,
        })
    }

    /// Splits a vector supported on `level` as `sum_n (a_0^*)^n phi_n` with
    /// `phi_n` in the kernel of `a_0` at level `level - n`; returns the `phi_n`.
    pub fn decompose(&self, psi: &DVector<f64>, level: usize) -> Vec<DVector<f64>> {
        let mut rest = psi.clone();
        let mut parts = vec![DVector::zeros(self.dim()); level + 1];
        for n in (0..=level).rev() {
            let mut phi = rest.clone();
            for _ in 0..n {
                phi = self.lower_once(&phi);
            }
            phi /= factorial(n, self.q());
            rest -= self.raise(&phi, n);
            parts[n] = phi;
        }
        parts
    }

    fn embed(&self, level: usize, local: &DVector<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(self.level_range(level).start, local.len()).copy_from(local);
        v
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.n_max() {
            return Err(Error::Config(format!("level {level} exceeds cutoff {}", self.n_max())));
        }
        Ok(())
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass in the inner
/// product `u^T g v`.
fn gram_schmidt(vectors: &[DVector<f64>], g: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut u = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = e.dot(&(g * &u));
                u -= e * c;
            }
        }
        let norm = u.dot(&(g * &u)).sqrt();
        if norm > RANK_TOL {
            out.push(u / norm);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockWord;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_dimensions() {
        let s = FockSpace::new(2, 5, 0.5).unwrap();
        assert_eq!(s.kernel_basis(0).unwrap(), vec![s.vacuum()]);
        let k1 = s.kernel_basis(1).unwrap();
        assert_eq!(k1.len(), 1);
        let f1 = s.index_of(&FockWord::new([1])).unwrap();
        assert_abs_diff_eq!(k1[0][f1].abs(), 1.0, epsilon = 1e-14);
        for n in 1..=4 {
            let k = s.kernel_basis(n).unwrap();
            assert_eq!(k.len(), 1 << (n - 1));
            let a = s.annihilation(0);
            for phi in &k {
                assert!(a.apply(phi).amax() < 1e-12);
                assert_abs_diff_eq!(s.inner(phi, phi), 1.0, epsilon = 1e-12);
            }
        }
        assert!(s.kernel_basis(6).is_err());
    }

    #[test]
    fn isometry_constants() {
        let q = 0.5;
        let s = FockSpace::new(2, 6, q).unwrap();
        let f1 = s.kernel_basis(1).unwrap().remove(0);
        assert!(s.v_isometry_check(0, &f1, 0, &f1).abs() < 1e-15);
        assert!(s.v_isometry_check(2, &f1, 1, &f1).abs() < 1e-12);
        assert!(s.v_isometry_check(2, &f1, 2, &f1).abs() < 1e-12);
        let lhs = s.inner(&s.raise(&f1, 2), &s.raise(&f1, 2));
        assert_abs_diff_eq!(lhs, 1.0 + q, epsilon = 1e-12);
        let k2 = s.kernel_basis(2).unwrap();
        for phi in &k2 {
            for xi in &k2 {
                assert!(s.v_isometry_check(3, phi, 3, xi).abs() < 1e-12);
                assert!(s.v_isometry_check(3, phi, 1, xi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn isometry_sweep() {
        for q in [0.1, 0.9] {
            let s = FockSpace::new(2, 6, q).unwrap();
            let r = s.v_isometry_sweep().unwrap();
            assert!(r < 1e-10, "q={q} {r:e}");
        }
    }

    #[test]
    fn completeness() {
        for q in [0.1, 0.5, 0.9] {
            let s = FockSpace::new(2, 5, q).unwrap();
            for l in 0..=4 {
                let r = s.completeness_check(l).unwrap();
                assert_eq!((r.defect, r.rank_defect), (0, 0), "{r:?}");
            }
        }
        let r = FockSpace::new(2, 2, 0.5).unwrap().completeness_check(2).unwrap();
        assert_eq!(r.dims, vec![2, 1, 1]);
    }

    #[test]
    fn decomposition_reconstructs() {
        let s = FockSpace::new(2, 5, 0.6).unwrap();
        let a = s.annihilation(0);
        for i in s.level_range(4) {
            let psi = s.basis(i);
            let parts = s.decompose(&psi, 4);
            let mut back = DVector::zeros(s.dim());
            for (n, phi) in parts.iter().enumerate() {
                assert!(a.apply(phi).amax() < 1e-12);
                back += s.raise(phi, n);
            }
            assert!((back - psi).amax() < 1e-12);
        }
    }
}
