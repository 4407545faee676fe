//! Labeled Schreier graphs and rooted ball codes.
//!
//! Schreier graphs are edge-deterministic: every vertex has exactly one
//! outgoing and one incoming edge per generator. A breadth-first traversal
//! that visits signed generators in the fixed order `+1, -1, +2, -2, ...`
//! therefore discovers the vertices of two isomorphic rooted labeled balls in
//! the same order, and the table of neighbor discovery indices is a complete
//! isomorphism invariant.

use std::collections::HashMap;
use std::hash::Hash;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupInstance, Letter, PermutationAction};

/// Frontier guard for exact Cayley-ball enumeration.
pub const BALL_LIMIT: usize = 10_000_000;

/// Marks a neighbor outside the ball.
pub const BOUNDARY: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSchreierGraph {
    n: usize,
    k: usize,
    out: Vec<Vec<u32>>,
    back: Vec<Vec<u32>>,
}

impl LabeledSchreierGraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn generator_count(&self) -> usize {
        self.k
    }

    /// `k * n`: loops and parallel edges included.
    pub fn edge_count(&self) -> usize {
        self.k * self.n
    }

    /// Target of the `generator`-labeled edge leaving `x`.
    #[inline]
    pub fn target(&self, x: usize, generator: usize) -> usize {
        self.out[generator][x] as usize
    }

    #[inline]
    pub fn step(&self, x: usize, l: Letter) -> usize {
        if l.inverse {
            self.back[l.generator][x] as usize
        } else {
            self.out[l.generator][x] as usize
        }
    }

    pub fn out_neighbors(&self, generator: usize) -> &[u32] {
        &self.out[generator]
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for o in 0..2 * self.k {
                let y = self.step(x, Letter::from_ordinal(o));
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    /// Ball code of the radius-`r` ball around `v`.
    pub fn ball_code(&self, v: usize, r: usize) -> BallCode {
        let mut entries = Vec::new();
        let walk = walk_ball(
            v,
            r,
            self.k,
            usize::MAX,
            |&x| x,
            |&x, l| self.step(x, l),
            |e| {
                entries.push(e);
                true
            },
        );
        match walk {
            WalkOutcome::Complete(nodes) => BallCode {
                radius: r,
                vertices: nodes.len(),
                entries,
            },
            _ => unreachable!("unbounded walk without early stop"),
        }
    }

    /// Streams the ball code of `v` against `reference`, stopping at the
    /// first difference.
    pub fn ball_matches(&self, v: usize, reference: &BallCode) -> bool {
        let mut pos = 0;
        let entries = &reference.entries;
        let walk = walk_ball(
            v,
            reference.radius,
            self.k,
            reference.vertices,
            |&x| x,
            |&x, l| self.step(x, l),
            |e| {
                let ok = entries.get(pos) == Some(&e);
                pos += 1;
                ok
            },
        );
        matches!(walk, WalkOutcome::Complete(_)) && pos == entries.len()
    }

    /// Adjacency dump, one line per vertex: `v 1→w 2→w ...` with 1-based
    /// generator labels.
    pub fn write_adjacency<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for x in 0..self.n {
            write!(w, "{x}")?;
            for g in 0..self.k {
                write!(w, " {}→{}", g + 1, self.out[g][x])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn build_schreier(action: &PermutationAction) -> LabeledSchreierGraph {
    let k = action.generator_count();
    LabeledSchreierGraph {
        n: action.vertex_count(),
        k,
        out: (0..k).map(|g| action.forward(g).to_vec()).collect(),
        back: (0..k).map(|g| action.backward(g).to_vec()).collect(),
    }
}

/// Canonical code of a rooted labeled ball: for every discovered vertex in
/// discovery order and every signed generator, the discovery index of the
/// neighbor or [`BOUNDARY`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BallCode {
    pub radius: usize,
    pub vertices: usize,
    pub entries: Vec<u32>,
}

enum WalkOutcome<N> {
    Complete(Vec<N>),
    Stopped,
    TooLarge,
}

/// Breadth-first walk of the radius-`r` ball. `emit` receives the code
/// entries in order and may stop the walk by returning `false`. The walk is
/// aborted once more than `limit` vertices are discovered.
fn walk_ball<N, K, FK, FS, FE>(
    root: N,
    r: usize,
    k: usize,
    limit: usize,
    key: FK,
    step: FS,
    mut emit: FE,
) -> WalkOutcome<N>
where
    K: Hash + Eq,
    FK: Fn(&N) -> K,
    FS: Fn(&N, Letter) -> N,
    FE: FnMut(u32) -> bool,
{
    let mut index: HashMap<K, u32> = HashMap::new();
    index.insert(key(&root), 0);
    let mut nodes = vec![root];
    let mut dist = vec![0usize];
    let mut head = 0;
    while head < nodes.len() {
        for o in 0..2 * k {
            let next = step(&nodes[head], Letter::from_ordinal(o));
            let nk = key(&next);
            let e = match index.get(&nk) {
                Some(&i) => i,
                None if dist[head] < r => {
                    let i = nodes.len() as u32;
                    if nodes.len() >= limit {
                        return WalkOutcome::TooLarge;
                    }
                    index.insert(nk, i);
                    nodes.push(next);
                    dist.push(dist[head] + 1);
                    i
                }
                None => BOUNDARY,
            };
            if !emit(e) {
                return WalkOutcome::Stopped;
            }
        }
        head += 1;
    }
    WalkOutcome::Complete(nodes)
}

/// Exact enumeration of a Cayley ball: distinct elements in discovery
/// order with the breadth-first tree that reached them.
pub struct BallEnumeration {
    pub code: BallCode,
    pub elements: Vec<GroupElement>,
    /// `(parent index, letter)`; the root's entry is unused.
    pub parents: Vec<(u32, Letter)>,
}

impl BallEnumeration {
    /// Geodesic word reaching element `i`.
    pub fn word(&self, mut i: usize) -> Vec<Letter> {
        let mut w = Vec::new();
        while i != 0 {
            let (p, l) = self.parents[i];
            w.push(l);
            i = p as usize;
        }
        w.reverse();
        w
    }
}

pub fn enumerate_ball(group: &GroupInstance, r: usize) -> Result<BallEnumeration> {
    let k = group.rank();
    let mut entries = Vec::new();
    let mut parents = vec![(0u32, Letter::new(0, false))];
    let mut count = 1usize;
    let mut cur = 0usize;
    let mut slot = 0usize;
    let walk = walk_ball(
        group.identity(),
        r,
        k,
        BALL_LIMIT,
        GroupElement::encode,
        |g, l| g.mul(group.letter_element(l)),
        |e| {
            if e != BOUNDARY && e as usize == count {
                parents.push((cur as u32, Letter::from_ordinal(slot)));
                count += 1;
            }
            entries.push(e);
            slot += 1;
            if slot == 2 * k {
                slot = 0;
                cur += 1;
            }
            true
        },
    );
    match walk {
        WalkOutcome::Complete(elements) => Ok(BallEnumeration {
            code: BallCode {
                radius: r,
                vertices: elements.len(),
                entries,
            },
            elements,
            parents,
        }),
        WalkOutcome::TooLarge => Err(Error::BallTooLarge {
            radius: r,
            limit: BALL_LIMIT,
        }),
        WalkOutcome::Stopped => unreachable!(),
    }
}

/// Code of the rooted ball `B_r(Cay(G, S), e)`.
pub fn cayley_ball(group: &GroupInstance, r: usize) -> Result<BallCode> {
    enumerate_ball(group, r).map(|b| b.code)
}

/// Vertices whose radius-`(R + 1)` ball differs from the Cayley ball, in
/// increasing order.
pub fn exceptional_vertices(
    graph: &LabeledSchreierGraph,
    group: &GroupInstance,
    radius: usize,
) -> Result<Vec<usize>> {
    let reference = cayley_ball(group, radius + 1)?;
    let bad: Vec<bool> = (0..graph.vertex_count())
        .into_par_iter()
        .map(|v| !graph.ball_matches(v, &reference))
        .collect();
    Ok(bad
        .iter()
        .enumerate()
        .filter_map(|(v, &b)| b.then_some(v))
        .collect())
}
