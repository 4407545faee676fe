//! Fixed-point statistics of the coset actions: the probability that a
//! fixed group element stabilises a uniformly random coset, and the sum of
//! these probabilities over a Cayley ball.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::Result;
use crate::group::{GroupInstance, Word};
use crate::schreier::{enumerate_ball, LabeledSchreierGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    pub word: Word,
    pub fixed: usize,
    pub total: usize,
    pub fraction: BigRational,
}

fn fixed_count(graph: &LabeledSchreierGraph, word: &[crate::group::Letter]) -> usize {
    (0..graph.vertex_count())
        .into_par_iter()
        .filter(|&x| word.iter().fold(x, |v, &l| graph.step(v, l)) == x)
        .count()
}

pub fn fixed_point_fraction(
    graph: &LabeledSchreierGraph,
    word: &[crate::group::Letter],
) -> Result<FixedPointReport> {
    let k = graph.generator_count();
    if let Some(l) = word.iter().find(|l| l.generator >= k) {
        return Err(crate::Error::GeneratorOutOfRange {
            index: l.generator + 1,
            len: k,
        });
    }
    let n = graph.vertex_count();
    let fixed = fixed_count(graph, word);
    Ok(FixedPointReport {
        word: word.to_vec(),
        fixed,
        total: n,
        fraction: BigRational::new(BigInt::from(fixed), BigInt::from(n)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReport {
    pub d: usize,
    /// Ball radius `d^2 + 1`.
    pub radius: usize,
    /// Elements of the ball other than the identity.
    pub elements: usize,
    /// Sum of fixed-point counts over those elements.
    pub fixed_total: u64,
    pub gamma: BigRational,
}

/// Sum of fixed-point fractions over the non-identity elements of the
/// Cayley ball of radius `d^2 + 1`.
pub fn gamma_sum(
    graph: &LabeledSchreierGraph,
    group: &GroupInstance,
    d: usize,
) -> Result<GammaReport> {
    let radius = d * d + 1;
    let ball = enumerate_ball(group, radius)?;
    let words: Vec<Word> = (1..ball.elements.len()).map(|i| ball.word(i)).collect();
    let fixed_total: u64 = words.iter().map(|w| fixed_count(graph, w) as u64).sum();
    Ok(GammaReport {
        d,
        radius,
        elements: words.len(),
        fixed_total,
        gamma: BigRational::new(
            BigInt::from(fixed_total),
            BigInt::from(graph.vertex_count()),
        ),
    })
}
