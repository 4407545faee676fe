//! The right-angled rewiring: keep every edge of the first generator, keep
//! the edges of generator `i` only at a maximal `R`-separated set of each
//! cycle of generator `i - 1`, and keep everything at exceptional vertices.
//! Distortion is measured exactly rather than taken from the routing bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::GroupInstance;
use crate::schreier::{exceptional_vertices, LabeledSchreierGraph};

/// Cycles of one generator, each starting at its smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    /// 0-based chain position.
    pub generator: usize,
    pub cycles: Vec<Vec<u32>>,
}

pub fn cycle_decomposition(graph: &LabeledSchreierGraph, generator: usize) -> CycleDecomposition {
    let n = graph.vertex_count();
    let next = graph.out_neighbors(generator);
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x as u32);
            x = next[x] as usize;
        }
        cycles.push(cycle);
    }
    CycleDecomposition { generator, cycles }
}

/// Greedy maximal `r`-separated positions on a cycle of length `len`:
/// `0, r, 2r, ..` with `max(1, len / r)` points.
pub fn separated_positions(len: usize, r: usize) -> Vec<usize> {
    assert!(len >= 1 && r >= 1);
    let m = (len / r).max(1);
    (0..m).map(|j| j * r).collect()
}

/// A subset of the labeled edges `(x, i)` of a Schreier graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    k: usize,
    member: Vec<bool>,
}

impl EdgeSet {
    pub fn empty(n: usize, k: usize) -> Self {
        EdgeSet {
            n,
            k,
            member: vec![false; n * k],
        }
    }

    pub fn full(graph: &LabeledSchreierGraph) -> Self {
        EdgeSet {
            n: graph.vertex_count(),
            k: graph.generator_count(),
            member: vec![true; graph.edge_count()],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn generator_count(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn contains(&self, x: usize, generator: usize) -> bool {
        self.member[x * self.k + generator]
    }

    pub fn insert(&mut self, x: usize, generator: usize) {
        self.member[x * self.k + generator] = true;
    }

    pub fn remove(&mut self, x: usize, generator: usize) {
        self.member[x * self.k + generator] = false;
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Member edges `(x, i)` in `x`-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(e, _)| (e / self.k, e % self.k))
    }

    /// Undirected multigraph of the member edges of `graph`.
    pub fn to_edge_list(&self, graph: &LabeledSchreierGraph) -> EdgeList {
        EdgeList::new(
            self.n,
            self.iter()
                .map(|(x, i)| (x as u32, graph.target(x, i) as u32))
                .collect(),
        )
    }
}

/// Plain undirected multigraph, the common ground for distance comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl EdgeList {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Self {
        EdgeList { n, edges }
    }

    pub fn of_graph(graph: &LabeledSchreierGraph) -> Self {
        EdgeSet::full(graph).to_edge_list(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// Compressed adjacency for repeated bounded searches.
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn new(g: &EdgeList) -> Self {
        let mut deg = vec![0usize; g.n + 1];
        for &(u, v) in &g.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0usize; g.n + 1];
        for x in 0..g.n {
            offsets[x + 1] = offsets[x] + deg[x];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[g.n]];
        for &(u, v) in &g.edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Adjacency { offsets, targets }
    }

    fn neighbors(&self, x: usize) -> &[u32] {
        &self.targets[self.offsets[x]..self.offsets[x + 1]]
    }
}

/// Reusable per-thread search buffers.
pub(crate) struct Scratch {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    generation: u32,
    queue: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch {
            stamp: vec![0; n],
            dist: vec![0; n],
            generation: 0,
            queue: Vec::new(),
        }
    }

    pub(crate) fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.queue.clear();
    }

    #[inline]
    pub(crate) fn visit(&mut self, x: usize, d: u32) -> bool {
        if self.stamp[x] == self.generation {
            return false;
        }
        self.stamp[x] = self.generation;
        self.dist[x] = d;
        self.queue.push(x as u32);
        true
    }

    #[inline]
    pub(crate) fn distance(&self, x: usize) -> Option<u32> {
        (self.stamp[x] == self.generation).then(|| self.dist[x])
    }

    pub(crate) fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub(crate) fn queued(&self, i: usize) -> usize {
        self.queue[i] as usize
    }
}

/// Largest distance from `src` to any of `targets`, or `None` when one of
/// them is unreachable.
fn max_distance(adj: &Adjacency, src: usize, targets: &[u32], s: &mut Scratch) -> Option<u32> {
    s.reset();
    s.visit(src, 0);
    let mut remaining = targets.iter().filter(|&&t| t as usize != src).count();
    let mut best = 0;
    let mut head = 0;
    while remaining > 0 && head < s.queue_len() {
        let x = s.queued(head);
        head += 1;
        let d = s.dist[x] + 1;
        for &y in adj.neighbors(x) {
            if s.visit(y as usize, d) {
                let hits = targets.iter().filter(|&&t| t == y).count();
                if hits > 0 {
                    remaining -= hits;
                    best = d;
                }
            }
        }
    }
    (remaining == 0).then_some(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distortion {
    Finite(u64),
    Unbounded,
}

impl Distortion {
    pub fn finite(self) -> Option<u64> {
        match self {
            Distortion::Finite(d) => Some(d),
            Distortion::Unbounded => None,
        }
    }
}

/// One direction of the bi-Lipschitz distance: the largest distance in
/// `other` between the endpoints of an edge of `edges`.
fn stretch(edges: &EdgeList, other: &Adjacency) -> Distortion {
    let mut by_source: Vec<Vec<u32>> = vec![Vec::new(); edges.n];
    for &(u, v) in &edges.edges {
        by_source[u as usize].push(v);
    }
    let n = edges.n;
    let worst = by_source
        .par_iter()
        .enumerate()
        .map_init(
            || Scratch::new(n),
            |s, (x, targets)| {
                if targets.is_empty() {
                    Distortion::Finite(0)
                } else {
                    max_distance(other, x, targets, s)
                        .map_or(Distortion::Unbounded, |d| Distortion::Finite(d as u64))
                }
            },
        )
        .max();
    worst.unwrap_or(Distortion::Finite(0))
}

/// `d_L(G, H) = max(max_{(x,y) in E(G)} d_H(x,y), max_{(x,y) in E(H)} d_G(x,y))`.
pub fn bilipschitz_distance(g: &EdgeList, h: &EdgeList) -> Distortion {
    assert_eq!(g.n, h.n, "edge sets over different vertex sets");
    let adj_g = Adjacency::new(g);
    let adj_h = Adjacency::new(h);
    stretch(g, &adj_h).max(stretch(h, &adj_g))
}

pub fn edge_density(edges: usize, n: usize) -> BigRational {
    assert!(n >= 1);
    BigRational::new(BigInt::from(edges), BigInt::from(n))
}

#[derive(Clone, Debug)]
pub struct RewiringResult {
    pub radius: usize,
    /// `selected[i][x]`: whether `x` belongs to the kept set of generator `i`.
    pub selected: Vec<Vec<bool>>,
    /// Exceptional vertices in increasing order.
    pub exceptional: Vec<usize>,
    pub edges: EdgeSet,
    pub density: BigRational,
    pub distortion: Distortion,
    /// `(2R + 1)^k`.
    pub budget: BigInt,
    /// Every vertex is exceptional, so nothing was removed.
    pub degenerate: bool,
}

impl RewiringResult {
    pub fn vertex_count(&self) -> usize {
        self.edges.vertex_count()
    }

    pub fn generator_count(&self) -> usize {
        self.edges.generator_count()
    }

    pub fn bad_fraction(&self) -> BigRational {
        edge_density(self.exceptional.len(), self.vertex_count())
    }

    /// `1 + (k - 1)/R + 2k |X_bad| / N`.
    pub fn density_bound(&self) -> BigRational {
        let k = self.generator_count() as i64;
        BigRational::one()
            + BigRational::new(BigInt::from(k - 1), BigInt::from(self.radius))
            + BigRational::from_integer(BigInt::from(2 * k)) * self.bad_fraction()
    }

    /// Re-checks the density and distortion bounds.
    pub fn check_invariants(&self) -> Result<()> {
        if self.density > self.density_bound() {
            return Err(Error::Invariant(format!(
                "density {} exceeds bound {}",
                self.density,
                self.density_bound()
            )));
        }
        match self.distortion {
            Distortion::Finite(d) if BigInt::from(d) <= self.budget => Ok(()),
            d => Err(Error::Invariant(format!(
                "distortion {d:?} exceeds budget {}",
                self.budget
            ))),
        }
    }
}

pub fn build_rewiring(
    graph: &LabeledSchreierGraph,
    group: &GroupInstance,
    radius: usize,
) -> Result<RewiringResult> {
    if radius < 2 || !radius.is_multiple_of(2) {
        return Err(Error::InvalidRadius(radius));
    }
    group.verify_right_angled().require()?;
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = graph.vertex_count();
    let k = graph.generator_count();

    let mut selected = vec![vec![true; n]];
    for i in 1..k {
        let mut keep = vec![false; n];
        for cycle in cycle_decomposition(graph, i - 1).cycles {
            for pos in separated_positions(cycle.len(), radius) {
                keep[cycle[pos] as usize] = true;
            }
        }
        selected.push(keep);
    }

    let exceptional = exceptional_vertices(graph, group, radius)?;
    let mut edges = EdgeSet::empty(n, k);
    for (i, keep) in selected.iter().enumerate() {
        for (x, &on) in keep.iter().enumerate() {
            if on {
                edges.insert(x, i);
            }
        }
    }
    for &v in &exceptional {
        for i in 0..k {
            edges.insert(v, i);
        }
    }

    let density = edge_density(edges.len(), n);
    let distortion = bilipschitz_distance(&EdgeList::of_graph(graph), &edges.to_edge_list(graph));
    let budget = BigInt::from(2 * radius + 1).pow(k as u32);
    let degenerate = exceptional.len() == n;
    Ok(RewiringResult {
        radius,
        selected,
        exceptional,
        edges,
        density,
        distortion,
        budget,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_family, FamilyTag, PermutationAction};
    use crate::schreier::build_schreier;

    fn torus(n: u64) -> (GroupInstance, LabeledSchreierGraph) {
        let (g, qs) = make_family(FamilyTag::Torus, Some(2), &[n]).unwrap();
        (g, build_schreier(qs[0].action()))
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn separated_examples() {
        assert_eq!(separated_positions(8, 2), vec![0, 2, 4, 6]);
        assert_eq!(separated_positions(5, 2), vec![0, 2]);
        assert_eq!(separated_positions(1, 4), vec![0]);
    }

    #[test]
    fn cycles_of_torus_and_projective() {
        let (_, g) = torus(8);
        let c = cycle_decomposition(&g, 0);
        assert_eq!(c.cycles.len(), 8);
        assert!(c.cycles.iter().all(|cy| cy.len() == 8));
        let (_, qs) = make_family(FamilyTag::Sl3zProjective, None, &[5]).unwrap();
        let g = build_schreier(qs[0].action());
        let c = cycle_decomposition(&g, 0);
        let fixed = c.cycles.iter().filter(|cy| cy.len() == 1).count();
        assert_eq!(fixed, 6);
        assert!(c.cycles.iter().any(|cy| cy.len() == 5));
        assert_eq!(c.cycles.iter().map(Vec::len).sum::<usize>(), 31);
    }

    #[test]
    fn torus_rewiring_n8() {
        let (grp, g) = torus(8);
        let r = build_rewiring(&g, &grp, 2).unwrap();
        assert_eq!(r.edges.len(), 96);
        assert_eq!(r.density, ratio(3, 2));
        assert!(r.exceptional.is_empty());
        assert_eq!(r.distortion, Distortion::Finite(3));
        assert_eq!(r.budget, BigInt::from(25));
        assert!(!r.degenerate);
        r.check_invariants().unwrap();
    }

    #[test]
    fn torus_rewiring_all_exceptional() {
        let (grp, g) = torus(6);
        let r = build_rewiring(&g, &grp, 2).unwrap();
        assert_eq!(r.exceptional.len(), 36);
        assert_eq!(r.edges.len(), 72);
        assert_eq!(r.density, ratio(2, 1));
        assert!(r.degenerate);
        assert_eq!(r.distortion, Distortion::Finite(1));
    }

    #[test]
    fn rejects_bad_radius() {
        let (grp, g) = torus(8);
        assert_eq!(
            build_rewiring(&g, &grp, 3).unwrap_err(),
            Error::InvalidRadius(3)
        );
        assert_eq!(
            build_rewiring(&g, &grp, 0).unwrap_err(),
            Error::InvalidRadius(0)
        );
    }

    #[test]
    fn bilipschitz_examples() {
        let (_, g) = torus(8);
        let full = EdgeList::of_graph(&g);
        assert_eq!(bilipschitz_distance(&full, &full), Distortion::Finite(1));

        let cycle: Vec<(u32, u32)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let path = cycle[..7].to_vec();
        assert_eq!(
            bilipschitz_distance(&EdgeList::new(8, cycle.clone()), &EdgeList::new(8, path)),
            Distortion::Finite(7)
        );
        assert_eq!(
            bilipschitz_distance(&EdgeList::new(8, cycle), &EdgeList::new(8, vec![(0, 1)])),
            Distortion::Unbounded
        );
    }

    #[test]
    fn density_examples() {
        assert_eq!(edge_density(96, 64), ratio(3, 2));
        assert_eq!(edge_density(128, 64), ratio(2, 1));
        assert_eq!(edge_density(64, 64), ratio(1, 1));
    }

    #[test]
    fn coverage_along_previous_cycles() {
        let (_, qs) = make_family(FamilyTag::Sl3zProjective, None, &[7]).unwrap();
        let g = build_schreier(qs[0].action());
        let grp = crate::group::GroupInstance::from_tag(FamilyTag::Sl3zProjective, None).unwrap();
        let r = build_rewiring(&g, &grp, 2).unwrap();
        for i in 1..6 {
            for cycle in cycle_decomposition(&g, i - 1).cycles {
                let len = cycle.len();
                for a in 0..len {
                    let near = (0..len).any(|b| {
                        let d = a.abs_diff(b).min(len - a.abs_diff(b));
                        d <= 2 && r.selected[i][cycle[b] as usize]
                    });
                    assert!(near);
                }
            }
        }
        r.check_invariants().unwrap();
        for (x, i) in r.edges.iter() {
            assert!(x < g.vertex_count() && i < 6);
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let a = PermutationAction::new(4, vec![vec![1, 0, 3, 2], vec![0, 1, 2, 3]]).unwrap();
        let g = build_schreier(&a);
        let grp = GroupInstance::torus(2).unwrap();
        assert_eq!(
            build_rewiring(&g, &grp, 2).unwrap_err(),
            Error::Disconnected
        );
    }
}
