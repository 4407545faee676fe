use std::fmt;

/// A generator or its inverse, addressed by 0-based chain position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    /// Builds a letter from the 1-based signed convention (`+1`, `-3`, ...).
    ///
    /// Panics on `0`.
    pub fn from_signed(s: i32) -> Self {
        assert!(s != 0, "signed generator index must be non-zero");
        Letter {
            generator: s.unsigned_abs() as usize - 1,
            inverse: s < 0,
        }
    }

    pub fn signed(self) -> i32 {
        let g = self.generator as i32 + 1;
        if self.inverse {
            -g
        } else {
            g
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Position in the canonical signed-generator order `+1, -1, +2, -2, ...`.
    pub fn ordinal(self) -> usize {
        2 * self.generator + self.inverse as usize
    }

    pub fn from_ordinal(o: usize) -> Self {
        Letter {
            generator: o / 2,
            inverse: o % 2 == 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.signed())
    }
}

pub type Word = Vec<Letter>;

/// Word from signed 1-based indices, e.g. `word(&[1, 3, -1, -3])`.
pub fn word(signed: &[i32]) -> Word {
    signed.iter().map(|&s| Letter::from_signed(s)).collect()
}

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// `a b a^-1 b^-1`
pub fn commutator(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = Vec::with_capacity(2 * (a.len() + b.len()));
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w.extend(inverse_word(a));
    w.extend(inverse_word(b));
    w
}

pub fn signed_form(w: &[Letter]) -> Vec<i32> {
    w.iter().map(|l| l.signed()).collect()
}

/// All freely reduced words of length exactly `len` over `k` generators, in
/// lexicographic order of letter ordinals.
pub fn reduced_words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for o in 0..2 * k {
                let l = Letter::from_ordinal(o);
                if w.last().is_some_and(|&p: &Letter| p == l.inv()) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_roundtrip() {
        for s in [-4, -1, 1, 2, 7] {
            assert_eq!(Letter::from_signed(s).signed(), s);
        }
        assert_eq!(Letter::from_signed(-2).ordinal(), 3);
        assert_eq!(Letter::from_ordinal(3), Letter::from_signed(-2));
    }

    #[test]
    fn commutator_shape() {
        let c = commutator(&word(&[1]), &word(&[3]));
        assert_eq!(signed_form(&c), vec![1, 3, -1, -3]);
    }

    #[test]
    fn reduced_word_counts() {
        // 2k (2k-1)^(len-1)
        assert_eq!(reduced_words(2, 0).len(), 1);
        assert_eq!(reduced_words(2, 1).len(), 4);
        assert_eq!(reduced_words(2, 3).len(), 4 * 9);
        assert_eq!(reduced_words(6, 2).len(), 12 * 11);
    }
}
