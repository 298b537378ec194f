use std::collections::HashMap;

use super::word::FockWord;
use crate::qspecial::factorial;

/// Memoized q-inner product of basis words.
///
/// Uses `<g1 g', h> = sum_k q^{k-1} [g1 = h_k] <g', h without h_k>`, with
/// words of different length or letter content orthogonal.
#[derive(Clone, Debug)]
pub struct GramCache {
    q: f64,
    powers: Vec<f64>,
    memo: HashMap<(FockWord, FockWord), f64>,
}

impl GramCache {
    pub fn new(q: f64) -> Self {
        Self {
            q,
            powers: vec![1.0],
            memo: HashMap::new(),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    fn power(&mut self, k: usize) -> f64 {
        while self.powers.len() <= k {
            let next = self.powers.last().unwrap() * self.q;
            self.powers.push(next);
        }
        self.powers[k]
    }

    pub fn inner(&mut self, g: &FockWord, h: &FockWord) -> f64 {
        if g.level() != h.level() || !same_content(g, h) {
            return 0.0;
        }
        if g.level() == 0 {
            return 1.0;
        }
        if g == h && g.letters().iter().all(|&c| c == g.letters()[0]) {
            return factorial(g.level(), self.q);
        }
        let key = if g <= h { (g.clone(), h.clone()) } else { (h.clone(), g.clone()) };
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let first = g.letters()[0];
        let rest = g.without(0);
        let mut total = 0.0;
        for (k, &c) in h.letters().iter().enumerate() {
            if c == first {
                let w = self.power(k);
                total += w * self.inner(&rest, &h.without(k));
            }
        }
        self.memo.insert(key, total);
        total
    }
}

fn same_content(g: &FockWord, h: &FockWord) -> bool {
    let mut counts = [0i64; 256];
    for &c in g.letters() {
        counts[c as usize] += 1;
    }
    for &c in h.letters() {
        counts[c as usize] -= 1;
    }
    counts.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::bracket;
    use approx::assert_abs_diff_eq;

    /// Sum over letter-preserving permutations of `q^{inversions}`.
    fn permutation_oracle(g: &[u8], h: &[u8], q: f64) -> f64 {
        fn go(g: &[u8], h: &mut Vec<Option<u8>>, q: f64) -> f64 {
            let Some((&first, rest)) = g.split_first() else {
                return 1.0;
            };
            let mut total = 0.0;
            let mut skipped = 0;
            for k in 0..h.len() {
                match h[k] {
                    None => continue,
                    Some(c) if c == first => {
                        h[k] = None;
                        total += q.powi(skipped) * go(rest, h, q);
                        h[k] = Some(c);
                    }
                    Some(_) => {}
                }
                skipped += 1;
            }
            total
        }
        if g.len() != h.len() {
            return 0.0;
        }
        go(g, &mut h.iter().map(|&c| Some(c)).collect(), q)
    }

    #[test]
    fn small_examples() {
        let q = 0.3;
        let mut cache = GramCache::new(q);
        assert_abs_diff_eq!(cache.inner(&FockWord::new([0, 1]), &FockWord::new([1, 0])), q);
        assert_eq!(cache.inner(&FockWord::new([0]), &FockWord::new([1])), 0.0);
        assert_eq!(cache.inner(&FockWord::new([0]), &FockWord::new([0, 0])), 0.0);
        for k in 1..8 {
            let a = FockWord::power(0, k).concat(&FockWord::new([1]));
            let b = FockWord::new([1]).concat(&FockWord::power(0, k));
            assert_abs_diff_eq!(cache.inner(&a, &b), q.powi(k as i32) * factorial(k, q), epsilon = 1e-14);
            assert_abs_diff_eq!(cache.inner(&a, &a), factorial(k, q), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(cache.inner(&FockWord::power(0, 2), &FockWord::power(0, 2)), bracket(2, q));
    }

    #[test]
    fn matches_permutation_oracle() {
        let q = 0.45;
        let mut cache = GramCache::new(q);
        for level in 0..=5 {
            let words = FockWord::enumerate(2, level);
            for g in &words {
                for h in &words {
                    let expected = permutation_oracle(g.letters(), h.letters(), q);
                    assert_abs_diff_eq!(cache.inner(g, h), expected, epsilon = 1e-13);
                    assert_eq!(cache.inner(g, h), cache.inner(h, g));
                }
            }
        }
    }

    #[test]
    fn free_limit_is_identity() {
        let mut cache = GramCache::new(0.0);
        let words = FockWord::enumerate(2, 4);
        for g in &words {
            for h in &words {
                assert_eq!(cache.inner(g, h), if g == h { 1.0 } else { 0.0 });
            }
        }
    }
}
