use std::cmp::Ordering;
use std::fmt;

/// A basis tensor `f_{g1} (x) ... (x) f_{gn}`; the empty word is the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FockWord(pub Vec<u8>);

impl FockWord {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        Self(letters.into())
    }

    /// `f_mode^{(x) k}`.
    pub fn power(mode: u8, k: usize) -> Self {
        Self(vec![mode; k])
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// The word with `mode` prepended.
    pub fn prepend(&self, mode: u8) -> Self {
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.push(mode);
        letters.extend_from_slice(&self.0);
        Self(letters)
    }

    /// The word with `other` appended.
    pub fn concat(&self, other: &FockWord) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Self(letters)
    }

    /// The word with the letter at `pos` removed.
    pub fn without(&self, pos: usize) -> Self {
        let mut letters = self.0.clone();
        letters.remove(pos);
        Self(letters)
    }

    pub fn count(&self, mode: u8) -> usize {
        self.0.iter().filter(|&&c| c == mode).count()
    }

    /// All words over `d` letters at `level`, in lexicographic order.
    pub fn enumerate(d: usize, level: usize) -> Vec<FockWord> {
        let total = d.pow(level as u32);
        (0..total)
            .map(|mut code| {
                let mut letters = vec![0u8; level];
                for slot in letters.iter_mut().rev() {
                    *slot = (code % d) as u8;
                    code /= d;
                }
                FockWord(letters)
            })
            .collect()
    }
}

impl Ord for FockWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level().cmp(&other.level()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FockWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("vac");
        }
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order() {
        let words = FockWord::enumerate(2, 2);
        let labels: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(labels, ["00", "01", "10", "11"]);
        assert_eq!(FockWord::enumerate(2, 0), vec![FockWord::vacuum()]);
        assert_eq!(FockWord::enumerate(1, 3), vec![FockWord::power(0, 3)]);
    }

    #[test]
    fn level_then_lex() {
        assert!(FockWord::new([1]) < FockWord::new([0, 0]));
        assert!(FockWord::new([0, 1]) < FockWord::new([1, 0]));
        assert_eq!(FockWord::vacuum().to_string(), "vac");
    }
}
