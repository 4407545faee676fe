use crate::error::{Error, Result};
use crate::group::word::Letter;

/// Right action of the chain generators on `{0, .., n-1}`, one permutation
/// per generator in array form together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationAction {
    n: usize,
    forward: Vec<Vec<u32>>,
    backward: Vec<Vec<u32>>,
}

impl PermutationAction {
    pub fn new(n: usize, forward: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAction("empty vertex set".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidAction("vertex count exceeds u32".into()));
        }
        let mut backward = Vec::with_capacity(forward.len());
        for (g, perm) in forward.iter().enumerate() {
            if perm.len() != n {
                return Err(Error::InvalidAction(format!(
                    "generator {} has {} images, expected {n}",
                    g + 1,
                    perm.len()
                )));
            }
            let mut inv = vec![u32::MAX; n];
            for (x, &y) in perm.iter().enumerate() {
                let y = y as usize;
                if y >= n || inv[y] != u32::MAX {
                    return Err(Error::InvalidAction(format!(
                        "generator {} is not a bijection",
                        g + 1
                    )));
                }
                inv[y] = x as u32;
            }
            backward.push(inv);
        }
        Ok(PermutationAction {
            n,
            forward,
            backward,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn generator_count(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self, generator: usize) -> &[u32] {
        &self.forward[generator]
    }

    pub fn backward(&self, generator: usize) -> &[u32] {
        &self.backward[generator]
    }

    #[inline]
    pub fn step(&self, x: usize, l: Letter) -> usize {
        if l.inverse {
            self.backward[l.generator][x] as usize
        } else {
            self.forward[l.generator][x] as usize
        }
    }

    pub fn apply_word(&self, x: usize, w: &[Letter]) -> usize {
        w.iter().fold(x, |v, &l| self.step(v, l))
    }

    /// Array form of the permutation induced by `w` (left-to-right).
    pub fn word_permutation(&self, w: &[Letter]) -> Vec<u32> {
        (0..self.n).map(|x| self.apply_word(x, w) as u32).collect()
    }

    pub fn fixes_all(&self, w: &[Letter]) -> bool {
        (0..self.n).all(|x| self.apply_word(x, w) == x)
    }

    pub fn check_letters(&self, w: &[Letter]) -> Result<()> {
        for l in w {
            if l.generator >= self.forward.len() {
                return Err(Error::GeneratorOutOfRange {
                    index: l.generator + 1,
                    len: self.forward.len(),
                });
            }
        }
        Ok(())
    }

    /// Number of vertices reachable from `base`.
    pub fn orbit_size(&self, base: usize) -> usize {
        let mut seen = vec![false; self.n];
        seen[base] = true;
        let mut stack = vec![base];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for g in 0..self.forward.len() {
                for y in [self.forward[g][x], self.backward[g][x]] {
                    let y = y as usize;
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit_size(0) == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::word;

    #[test]
    fn rejects_non_bijection() {
        assert!(PermutationAction::new(3, vec![vec![0, 0, 1]]).is_err());
        assert!(PermutationAction::new(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn inverse_arrays_compose_to_identity() {
        let a = PermutationAction::new(4, vec![vec![1, 2, 3, 0], vec![1, 0, 3, 2]]).unwrap();
        for g in 0..2 {
            for x in 0..4 {
                assert_eq!(a.backward(g)[a.forward(g)[x] as usize] as usize, x);
            }
        }
        assert_eq!(a.apply_word(0, &word(&[1, 1, -2])), 3);
        assert!(a.fixes_all(&word(&[1, 1, 1, 1])));
        assert!(a.is_transitive());
    }
}
