use std::collections::{BTreeMap, HashMap};

use super::gram::GramCache;
use super::word::FockWord;

/// Finite linear combination of basis words, without a level cutoff.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<FockWord, f64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(FockWord::vacuum())
    }

    pub fn basis(word: FockWord) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(word, 1.0);
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockWord, f64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coefficient(&self, word: &FockWord) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_level(&self) -> usize {
        self.terms.keys().map(FockWord::level).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, word: FockWord, c: f64) {
        if c != 0.0 {
            *self.terms.entry(word).or_insert(0.0) += c;
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: f64) {
        for (w, v) in other.terms() {
            self.add_term(w.clone(), c * v);
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sum(&self, other: &FockVector) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    /// `a_mode^*`: prepends the letter.
    pub fn create(&self, mode: u8) -> Self {
        let terms = self.terms.iter().map(|(w, &c)| (w.prepend(mode), c)).collect();
        Self { terms }
    }

    /// `a_mode`: deletes a matching letter at position `k` with weight `q^k`.
    pub fn annihilate(&self, mode: u8, q: f64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            let mut weight = 1.0;
            for (k, &letter) in w.letters().iter().enumerate() {
                if letter == mode {
                    out.add_term(w.without(k), c * weight);
                }
                weight *= q;
            }
        }
        out
    }

    /// `X_mode = a_mode + a_mode^*`.
    pub fn field(&self, mode: u8, q: f64) -> Self {
        self.create(mode).sum(&self.annihilate(mode, q))
    }

    /// Components with at most `level` letters.
    pub fn truncated(&self, level: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.level() <= level)
            .map(|(w, &c)| (w.clone(), c))
            .collect();
        Self { terms }
    }

    /// `<self, other>_q`. Terms are grouped by letter content first, since
    /// words with different content are orthogonal.
    pub fn inner(&self, other: &FockVector, gram: &mut GramCache) -> f64 {
        let mut groups: HashMap<Vec<usize>, Vec<(&FockWord, f64)>> = HashMap::new();
        for (h, b) in other.terms() {
            groups.entry(content(h)).or_default().push((h, b));
        }
        let mut total = 0.0;
        for (g, a) in self.terms() {
            if let Some(matches) = groups.get(&content(g)) {
                for &(h, b) in matches {
                    total += a * b * gram.inner(g, h);
                }
            }
        }
        total
    }

    pub fn norm_sq(&self, gram: &mut GramCache) -> f64 {
        self.inner(self, gram)
    }
}

/// Letter counts, indexed by mode.
fn content(word: &FockWord) -> Vec<usize> {
    let mut counts = Vec::new();
    for &c in word.letters() {
        let c = c as usize;
        if counts.len() <= c {
            counts.resize(c + 1, 0);
        }
        counts[c] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::bracket;
    use approx::assert_abs_diff_eq;

    #[test]
    fn operator_examples() {
        let q = 0.5;
        let f00 = FockVector::basis(FockWord::new([0, 0]));
        let a = f00.annihilate(0, q);
        assert_abs_diff_eq!(a.coefficient(&FockWord::new([0])), bracket(2, q));
        let f10 = FockVector::basis(FockWord::new([1, 0]));
        let a = f10.annihilate(0, q);
        assert_abs_diff_eq!(a.coefficient(&FockWord::new([1])), q);
        assert_eq!(a.len(), 1);
        assert!(FockVector::vacuum().annihilate(0, q).is_empty());
        assert_eq!(FockVector::vacuum().create(0), FockVector::basis(FockWord::new([0])));
    }

    #[test]
    fn vacuum_fourth_moment_of_sum() {
        for q in [0.1, 0.5, 0.9] {
            let mut gram = GramCache::new(q);
            let x = |v: &FockVector| v.field(0, q).sum(&v.field(1, q));
            let v = x(&x(&FockVector::vacuum()));
            assert_abs_diff_eq!(v.norm_sq(&mut gram), 8.0 + 4.0 * q, epsilon = 1e-13);
        }
    }
}
