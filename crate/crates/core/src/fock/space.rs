use std::collections::HashMap;
use std::io::Write;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::gram::GramCache;
use super::sparse::FockVector;
use super::word::FockWord;
use crate::error::{Error, Result};
use crate::qspecial::bracket;

/// Largest dense basis the space will build.
pub const MAX_DIM: usize = 1023;

/// Truncated Fock space over `d` orthonormal modes with words of at most
/// `n_max` letters, in the level-then-lexicographic basis order.
#[derive(Clone, Debug)]
pub struct FockSpace {
    d: usize,
    n_max: usize,
    q: f64,
    words: Vec<FockWord>,
    index: HashMap<FockWord, usize>,
    offsets: Vec<usize>,
    grams: Vec<DMatrix<f64>>,
    gram_full: DMatrix<f64>,
    raise0: DMatrix<f64>,
    lower0: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Raising,
    Lowering,
    Preserving,
    Mixed,
}

impl OperatorKind {
    fn shift(self) -> Option<i32> {
        match self {
            Self::Raising => Some(1),
            Self::Lowering => Some(-1),
            Self::Preserving => Some(0),
            Self::Mixed => None,
        }
    }

    fn from_shift(shift: Option<i32>) -> Self {
        match shift {
            Some(0) => Self::Preserving,
            Some(s) if s > 0 => Self::Raising,
            Some(_) => Self::Lowering,
            None => Self::Mixed,
        }
    }
}

/// Matrix of an operator in the word basis; column `j` holds the image of
/// basis word `j`.
#[derive(Clone, Debug)]
pub struct OperatorRep {
    pub matrix: DMatrix<f64>,
    pub kind: OperatorKind,
    shift: Option<i32>,
}

impl OperatorRep {
    pub fn new(matrix: DMatrix<f64>, kind: OperatorKind) -> Self {
        Self {
            matrix,
            kind,
            shift: kind.shift(),
        }
    }

    pub fn compose(&self, other: &OperatorRep) -> Self {
        let shift = self.shift.zip(other.shift).map(|(a, b)| a + b);
        Self {
            matrix: &self.matrix * &other.matrix,
            kind: OperatorKind::from_shift(shift),
            shift,
        }
    }

    pub fn plus(&self, other: &OperatorRep) -> Self {
        let shift = if self.shift == other.shift { self.shift } else { None };
        Self {
            matrix: &self.matrix + &other.matrix,
            kind: OperatorKind::from_shift(shift),
            shift,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrix: &self.matrix * c,
            ..self.clone()
        }
    }

    pub fn power(&self, n: usize) -> Self {
        let dim = self.matrix.nrows();
        let mut out = OperatorRep::new(DMatrix::identity(dim, dim), OperatorKind::Preserving);
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }
}

/// `P_n(x) = prod_{j=1}^n (q^j x + [j]_q)`.
pub fn pn_eval(n: usize, x: f64, q: f64) -> f64 {
    (1..=n).map(|j| q.powi(j as i32) * x + bracket(j, q)).product()
}

impl FockSpace {
    pub fn new(d: usize, n_max: usize, q: f64) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::Config(format!("mode count {d} must be 1 or 2")));
        }
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidQ(q));
        }
        let dim: usize = (0..=n_max).map(|l| d.pow(l as u32)).sum();
        if dim > MAX_DIM {
            return Err(Error::Config(format!(
                "{d}-mode space with {n_max} levels has dimension {dim} > {MAX_DIM}"
            )));
        }
        let mut words = Vec::with_capacity(dim);
        let mut offsets = vec![0];
        for l in 0..=n_max {
            words.extend(FockWord::enumerate(d, l));
            offsets.push(words.len());
        }
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut cache = GramCache::new(q);
        let grams: Vec<DMatrix<f64>> = (0..=n_max)
            .map(|l| {
                let block = &words[offsets[l]..offsets[l + 1]];
                let n = block.len();
                let mut g = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = cache.inner(&block[i], &block[j]);
                        g[(i, j)] = v;
                        g[(j, i)] = v;
                    }
                }
                g
            })
            .collect();
        let mut gram_full = DMatrix::zeros(dim, dim);
        for (l, g) in grams.iter().enumerate() {
            let o = offsets[l];
            gram_full.view_mut((o, o), g.shape()).copy_from(g);
        }
        let mut space = Self {
            d,
            n_max,
            q,
            words,
            index,
            offsets,
            grams,
            gram_full,
            raise0: DMatrix::zeros(0, 0),
            lower0: DMatrix::zeros(0, 0),
        };
        space.raise0 = space.creation(0).matrix;
        space.lower0 = space.annihilation(0).matrix;
        Ok(space)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[FockWord] {
        &self.words
    }

    pub fn index_of(&self, word: &FockWord) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn level_range(&self, level: usize) -> Range<usize> {
        self.offsets[level]..self.offsets[level + 1]
    }

    /// Basis indices with at most `level` letters.
    pub fn up_to(&self, level: usize) -> Range<usize> {
        0..self.offsets[level.min(self.n_max) + 1]
    }

    pub fn gram(&self, level: usize) -> &DMatrix<f64> {
        &self.grams[level]
    }

    pub fn gram_full(&self) -> &DMatrix<f64> {
        &self.gram_full
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.gram_full * v))
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    pub fn vacuum(&self) -> DVector<f64> {
        self.basis(0)
    }

    pub fn basis(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// Dense coordinates of `v`; components above the cutoff are dropped.
    pub fn coordinates(&self, v: &FockVector) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for (w, c) in v.terms() {
            if let Some(i) = self.index_of(w) {
                out[i] += c;
            }
        }
        out
    }

    pub fn to_sparse(&self, v: &DVector<f64>) -> FockVector {
        let mut out = FockVector::zero();
        for (i, &c) in v.iter().enumerate() {
            out.add_term(self.words[i].clone(), c);
        }
        out
    }

    /// `a_0^* v`.
    pub fn raise_once(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.raise0 * v
    }

    /// `a_0 v`.
    pub fn lower_once(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.lower0 * v
    }

    pub fn identity(&self) -> OperatorRep {
        OperatorRep::new(DMatrix::identity(self.dim(), self.dim()), OperatorKind::Preserving)
    }

    /// `a_mode^*`; words at the cutoff level map to zero.
    pub fn creation(&self, mode: u8) -> OperatorRep {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (j, w) in self.words.iter().enumerate() {
            if let Some(i) = self.index_of(&w.prepend(mode)) {
                m[(i, j)] = 1.0;
            }
        }
        OperatorRep::new(m, OperatorKind::Raising)
    }

    /// `a_mode`.
    pub fn annihilation(&self, mode: u8) -> OperatorRep {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (j, w) in self.words.iter().enumerate() {
            let image = FockVector::basis(w.clone()).annihilate(mode, self.q);
            for (u, c) in image.terms() {
                m[(self.index[u], j)] += c;
            }
        }
        OperatorRep::new(m, OperatorKind::Lowering)
    }

    /// `X_mode = a_mode + a_mode^*`.
    pub fn field(&self, mode: u8) -> OperatorRep {
        self.annihilation(mode).plus(&self.creation(mode))
    }

    /// Adjoint in the q-inner product, `G^{-1} A^T G`.
    pub fn adjoint(&self, op: &OperatorRep) -> Result<OperatorRep> {
        let rhs = op.matrix.transpose() * &self.gram_full;
        let matrix = self.solve_gram(rhs)?;
        let shift = op.shift.map(|s| -s);
        Ok(OperatorRep {
            matrix,
            kind: OperatorKind::from_shift(shift),
            shift,
        })
    }

    fn solve_gram(&self, rhs: DMatrix<f64>) -> Result<DMatrix<f64>> {
        if let Some(chol) = self.gram_full.clone().cholesky() {
            return Ok(chol.solve(&rhs));
        }
        let jittered = &self.gram_full + DMatrix::identity(self.dim(), self.dim()) * 1e-14;
        jittered
            .cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::Eigen("Gram matrix is not positive definite".into()))
    }

    /// Largest entry of the columns of `m` indexed by words of level at
    /// most `level`.
    pub fn max_abs_on_levels(&self, m: &DMatrix<f64>, level: usize) -> f64 {
        self.up_to(level)
            .flat_map(|j| m.column(j).iter().copied().collect::<Vec<_>>())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `a_i a_j^* - q a_j^* a_i - delta_ij Id` on levels below the cutoff.
    pub fn commutation_check(&self, i: u8, j: u8) -> f64 {
        let (ai, aj_star) = (self.annihilation(i), self.creation(j));
        let mut m = &ai.matrix * &aj_star.matrix - (&aj_star.matrix * &ai.matrix) * self.q;
        if i == j {
            m -= DMatrix::<f64>::identity(self.dim(), self.dim());
        }
        if self.n_max == 0 {
            return 0.0;
        }
        self.max_abs_on_levels(&m, self.n_max - 1)
    }

    /// `a_0^n (a_0^*)^n - P_n(a_0^* a_0)` on levels at most `N - n`.
    pub fn pn_operator_check(&self, n: usize) -> f64 {
        if n > self.n_max {
            return 0.0;
        }
        let (a, a_star) = (self.annihilation(0), self.creation(0));
        let lhs = a.power(n).compose(&a_star.power(n));
        let number = a_star.compose(&a).matrix;
        let id = DMatrix::<f64>::identity(self.dim(), self.dim());
        let mut rhs = id.clone();
        for j in 1..=n {
            rhs = (&number * self.q.powi(j as i32) + &id * bracket(j, self.q)) * rhs;
        }
        self.max_abs_on_levels(&(lhs.matrix - rhs), self.n_max - n)
    }

    /// `max |<a^* e_i, e_j> - <e_i, a e_j>|` over pairs with `e_i` below the
    /// cutoff.
    pub fn adjointness_residual(&self, mode: u8) -> f64 {
        let c = self.creation(mode).matrix;
        let a = self.annihilation(mode).matrix;
        let lhs = c.transpose() * &self.gram_full;
        let rhs = &self.gram_full * a;
        let diff = (lhs - rhs).transpose();
        if self.n_max == 0 {
            return 0.0;
        }
        self.max_abs_on_levels(&diff, self.n_max - 1)
    }

    /// Smallest eigenvalue of the level-`level` Gram matrix.
    pub fn gram_min_eigenvalue(&self, level: usize) -> f64 {
        self.grams[level]
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `<Omega, A^m Omega>_q`.
    pub fn vacuum_moment(&self, op: &OperatorRep, m: usize) -> f64 {
        let mut v = self.vacuum();
        for _ in 0..m {
            v = op.apply(&v);
        }
        self.inner(&self.vacuum(), &v)
    }

    /// Writes `m` as CSV with a header row of word labels.
    pub fn dump_csv<W: Write>(&self, m: &DMatrix<f64>, out: &mut W) -> Result<()> {
        let labels: Vec<String> = self.words.iter().take(m.ncols()).map(|w| w.to_string()).collect();
        writeln!(out, "row,{}", labels.join(","))?;
        for i in 0..m.nrows() {
            let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{},{}", self.words[i], row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::factorial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dimensions_and_low_grams() {
        let s = FockSpace::new(2, 4, 0.5).unwrap();
        assert_eq!(s.dim(), 31);
        assert_eq!(s.gram(0)[(0, 0)], 1.0);
        assert_eq!(s.gram(1), &DMatrix::identity(2, 2));
        assert!(FockSpace::new(3, 2, 0.5).is_err());
        assert!(FockSpace::new(2, 10, 0.5).is_err());
        assert!(FockSpace::new(2, 3, 1.0).is_err());
    }

    #[test]
    fn one_mode_gram_is_factorial_diagonal() {
        let q = 0.7;
        let s = FockSpace::new(1, 8, q).unwrap();
        for n in 0..=8 {
            assert_abs_diff_eq!(s.gram(n)[(0, 0)], factorial(n, q), epsilon = 1e-14);
        }
    }

    #[test]
    fn creation_and_annihilation_examples() {
        let s = FockSpace::new(2, 3, 0.5).unwrap();
        let f0 = s.index_of(&FockWord::new([0])).unwrap();
        let f00 = s.index_of(&FockWord::new([0, 0])).unwrap();
        let f10 = s.index_of(&FockWord::new([1, 0])).unwrap();
        let f1 = s.index_of(&FockWord::new([1])).unwrap();
        let c = s.creation(0);
        assert_eq!(c.apply(&s.vacuum()), s.basis(f0));
        let a = s.annihilation(0);
        assert_abs_diff_eq!(a.matrix[(f0, f00)], 1.5);
        assert_abs_diff_eq!(a.matrix[(f1, f10)], 0.5);
        assert_eq!(c.kind, OperatorKind::Raising);
        assert_eq!(c.compose(&a).kind, OperatorKind::Preserving);
        assert_eq!(c.plus(&a).kind, OperatorKind::Mixed);
    }

    #[test]
    fn commutation_and_adjointness() {
        for q in [0.0, 0.5, 0.9] {
            let s = FockSpace::new(2, 5, q).unwrap();
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                assert!(s.commutation_check(i, j) < 1e-13);
            }
            assert!(s.adjointness_residual(0) < 1e-12);
            assert!(s.adjointness_residual(1) < 1e-12);
            let adj = s.adjoint(&s.creation(0)).unwrap();
            let diff = &adj.matrix - &s.annihilation(0).matrix;
            assert!(s.max_abs_on_levels(&diff, 4) < 1e-10);
            assert_eq!(adj.kind, OperatorKind::Lowering);
        }
    }

    #[test]
    fn pn_identity() {
        let q = 0.5;
        assert_abs_diff_eq!(pn_eval(3, 0.0, q), factorial(3, q));
        assert_abs_diff_eq!(pn_eval(1, 2.0, q), q * 2.0 + 1.0);
        let s = FockSpace::new(2, 6, q).unwrap();
        for n in 1..=3 {
            assert!(s.pn_operator_check(n) < 1e-12);
        }
    }

    #[test]
    fn gram_positive_and_vacuum_moments() {
        for q in [0.1, 0.5, 0.9] {
            let s = FockSpace::new(2, 8, q).unwrap();
            for l in 0..=5 {
                assert!(s.gram_min_eigenvalue(l) > -1e-12);
            }
            let x0 = s.field(0);
            let xs = x0.plus(&s.field(1));
            for n in 1..=4 {
                let lhs = s.vacuum_moment(&xs, 2 * n);
                let rhs = 2f64.powi(n as i32) * s.vacuum_moment(&x0, 2 * n);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10 * rhs);
            }
        }
    }

    #[test]
    fn csv_dump_labels() {
        let s = FockSpace::new(2, 1, 0.5).unwrap();
        let mut buf = Vec::new();
        s.dump_csv(s.gram_full(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("row,vac,0,1\nvac,1.0000000000000000e0,"));
    }
}
