//! Group labels for a rewiring and the correction set that turns the
//! labeled rewiring into a generating set of the coset-action groupoid.
//!
//! A kept edge `(x, i)` is labeled by its own generator. Each omitted edge
//! gets a shortest walk through the kept edges; the discrepancy
//! `g(e) = s_i * (walk product)^-1` stabilises `x`, and the non-trivial
//! discrepancies form the correction set `I`. The kept edges together with
//! `I` generate the groupoid, so `(|H| + |I|) / N - 1` bounds the rank
//! `r(G, H) = (d(H) - 1) / [G : H]` from above.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{inverse_word, GroupElement, GroupInstance, Letter, Word};
use crate::homology::SnfResult;
use crate::rewire::{EdgeSet, Scratch};
use crate::schreier::LabeledSchreierGraph;

/// One traversal of a kept edge `(source, generator)`, forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WalkStep {
    pub source: u32,
    pub generator: u32,
    pub forward: bool,
}

impl WalkStep {
    pub fn letter(self) -> Letter {
        Letter::new(self.generator as usize, !self.forward)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmittedWalk {
    pub vertex: usize,
    pub generator: usize,
    pub steps: Vec<WalkStep>,
}

impl OmittedWalk {
    pub fn word(&self) -> Word {
        self.steps.iter().map(|s| s.letter()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LabeledRewiring {
    n: usize,
    k: usize,
    walks: Vec<OmittedWalk>,
    /// Edge id `x * k + i` to its walk, `u32::MAX` for kept edges.
    walk_of_edge: Vec<u32>,
}

impl LabeledRewiring {
    pub fn walks(&self) -> &[OmittedWalk] {
        &self.walks
    }

    pub fn walk_for(&self, x: usize, generator: usize) -> Option<&OmittedWalk> {
        match self.walk_of_edge[x * self.k + generator] {
            u32::MAX => None,
            w => Some(&self.walks[w as usize]),
        }
    }

    pub fn walk_index(&self, x: usize, generator: usize) -> Option<usize> {
        match self.walk_of_edge[x * self.k + generator] {
            u32::MAX => None,
            w => Some(w as usize),
        }
    }

    pub fn max_walk_len(&self) -> usize {
        self.walks.iter().map(|w| w.steps.len()).max().unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }
}

/// Labeled adjacency of the kept edges, each list sorted by
/// `(neighbor, generator, direction)` with forward before backward.
pub(crate) fn kept_adjacency(
    graph: &LabeledSchreierGraph,
    h: &EdgeSet,
) -> Vec<Vec<(u32, WalkStep)>> {
    let n = graph.vertex_count();
    let mut adj: Vec<Vec<(u32, WalkStep)>> = vec![Vec::new(); n];
    for (x, i) in h.iter() {
        let y = graph.target(x, i);
        let step = WalkStep {
            source: x as u32,
            generator: i as u32,
            forward: true,
        };
        adj[x].push((y as u32, step));
        adj[y].push((
            x as u32,
            WalkStep {
                forward: false,
                ..step
            },
        ));
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(w, s)| (w, s.generator, !s.forward));
    }
    adj
}

pub(crate) fn is_connected(adj: &[Vec<(u32, WalkStep)>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &(y, _) in &adj[x] {
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                stack.push(y as usize);
            }
        }
    }
    count == n
}

/// Shortest walk from `from` to `to` through the kept edges; among shortest
/// walks the lexicographically smallest sequence of
/// `(neighbor, generator, direction)` is returned.
fn shortest_walk(
    adj: &[Vec<(u32, WalkStep)>],
    from: usize,
    to: usize,
    s: &mut Scratch,
) -> Option<Vec<WalkStep>> {
    s.reset();
    s.visit(to, 0);
    let mut head = 0;
    let mut found = from == to;
    while !found && head < s.queue_len() {
        let x = s.queued(head);
        head += 1;
        let d = s.distance(x).unwrap() + 1;
        for &(y, _) in &adj[x] {
            if s.visit(y as usize, d) && y as usize == from {
                found = true;
                break;
            }
        }
    }
    if !found {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = from;
    while cur != to {
        let d = s.distance(cur).unwrap();
        let &(next, step) = adj[cur]
            .iter()
            .find(|&&(w, _)| s.distance(w as usize) == Some(d - 1))
            .expect("breadth-first layers are complete below the source");
        steps.push(step);
        cur = next as usize;
    }
    Some(steps)
}

pub fn label_rewiring(graph: &LabeledSchreierGraph, h: &EdgeSet) -> Result<LabeledRewiring> {
    let n = graph.vertex_count();
    let k = graph.generator_count();
    if h.vertex_count() != n || h.generator_count() != k {
        return Err(Error::LabelingMismatch(
            "edge set does not match the graph".into(),
        ));
    }
    let adj = kept_adjacency(graph, h);
    if !is_connected(&adj) {
        return Err(Error::Disconnected);
    }
    let omitted: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..k).map(move |i| (x, i)))
        .filter(|&(x, i)| !h.contains(x, i))
        .collect();
    let walks: Vec<OmittedWalk> = omitted
        .par_iter()
        .map_init(
            || Scratch::new(n),
            |s, &(x, i)| {
                let steps =
                    shortest_walk(&adj, x, graph.target(x, i), s).expect("connected kept graph");
                OmittedWalk {
                    vertex: x,
                    generator: i,
                    steps,
                }
            },
        )
        .collect();
    let mut walk_of_edge = vec![u32::MAX; n * k];
    for (w, walk) in walks.iter().enumerate() {
        walk_of_edge[walk.vertex * k + walk.generator] = w as u32;
    }
    Ok(LabeledRewiring {
        n,
        k,
        walks,
        walk_of_edge,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionEntry {
    pub vertex: usize,
    pub element: GroupElement,
    /// `s_i` followed by the inverted walk.
    pub witness: Word,
}

#[derive(Clone, Debug)]
pub struct CorrectionSet {
    n: usize,
    /// Deduplicated by `(vertex, element)`, sorted by vertex then encoding.
    pub entries: Vec<CorrectionEntry>,
    /// For each walk of the labeling, its entry (`None` when `g(e) = 1`).
    pub entry_of_walk: Vec<Option<u32>>,
}

impl CorrectionSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|I| / N`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::from(self.entries.len()), BigInt::from(self.n))
    }
}

pub fn correction_set(
    graph: &LabeledSchreierGraph,
    labeling: &LabeledRewiring,
    group: &GroupInstance,
) -> Result<CorrectionSet> {
    let evaluated: Vec<Result<Option<(Vec<u8>, CorrectionEntry)>>> = labeling
        .walks
        .par_iter()
        .map(|walk| {
            let mut witness = vec![Letter::new(walk.generator, false)];
            witness.extend(inverse_word(&walk.word()));
            let end = witness.iter().fold(walk.vertex, |v, &l| graph.step(v, l));
            if end != walk.vertex {
                return Err(Error::CorrectionNotStabilizing {
                    vertex: walk.vertex,
                    generator: walk.generator + 1,
                });
            }
            let element = group.evaluate_word(&witness)?;
            if element.is_identity() {
                return Ok(None);
            }
            Ok(Some((
                element.encode(),
                CorrectionEntry {
                    vertex: walk.vertex,
                    element,
                    witness,
                },
            )))
        })
        .collect();

    let mut unique: BTreeMap<(usize, Vec<u8>), CorrectionEntry> = BTreeMap::new();
    let mut keys: Vec<Option<(usize, Vec<u8>)>> = Vec::with_capacity(evaluated.len());
    for item in evaluated {
        match item? {
            None => keys.push(None),
            Some((code, entry)) => {
                let key = (entry.vertex, code);
                keys.push(Some(key.clone()));
                unique.entry(key).or_insert(entry);
            }
        }
    }
    let position: BTreeMap<&(usize, Vec<u8>), u32> = unique
        .keys()
        .enumerate()
        .map(|(i, k)| (k, i as u32))
        .collect();
    let entry_of_walk = keys
        .iter()
        .map(|k| k.as_ref().map(|k| position[k]))
        .collect();
    Ok(CorrectionSet {
        n: labeling.n,
        entries: unique.into_values().collect(),
        entry_of_walk,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankUpperBound {
    /// `(|H| + |I|) / N - 1`.
    pub measured: BigRational,
    /// `|H| / N - 1 + gamma`, when the fixed-point sum is supplied.
    pub fixed_point_sum: Option<BigRational>,
}

pub fn rank_upper_bound(
    kept_edges: usize,
    n: usize,
    correction: &CorrectionSet,
    gamma: Option<&BigRational>,
) -> RankUpperBound {
    let base = BigRational::new(BigInt::from(kept_edges), BigInt::from(n)) - BigRational::one();
    RankUpperBound {
        measured: &base + correction.measure(),
        fixed_point_sum: gamma.map(|g| &base + g),
    }
}

/// `betti + #{invariant factors > 1}`, a lower bound for the number of
/// generators of the subgroup.
pub fn abelian_rank_lower_bound(snf: &SnfResult) -> usize {
    snf.betti + snf.torsion_factors().len()
}
