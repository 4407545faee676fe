use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupInstance, Letter, Word};
use crate::groupoid::{CorrectionSet, LabeledRewiring};
use crate::rewire::EdgeSet;
use crate::schreier::LabeledSchreierGraph;

/// A 1-cell of the complex behind a presentation generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    /// The Schreier edge `(source, generator)`.
    Edge { source: u32, generator: u32 },
    /// The correction loop of entry `entry` sitting at `vertex`.
    Loop { vertex: u32, entry: u32 },
}

/// Spanning-tree contraction of a 2-complex on the coset graph: generators
/// are the non-tree 1-cells, relators are signed 1-based generator indices.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    base: usize,
    generators: Vec<Cell>,
    letters: Vec<i32>,
    offsets: Vec<usize>,
    /// Per vertex, the tree letter reaching it from its parent.
    parent: Vec<Option<(u32, Letter)>>,
    /// Longest relator before contraction, counted in 1-cells.
    max_boundary: usize,
}

impl SubgroupPresentation {
    /// Presentation on `generators` abstract generators with the given
    /// signed 1-based relators, not attached to any graph.
    pub fn from_relators(generators: usize, relators: &[Vec<i32>]) -> Result<Self> {
        let mut letters = Vec::new();
        let mut offsets = vec![0];
        for r in relators {
            for &s in r {
                if s == 0 || s.unsigned_abs() as usize > generators {
                    return Err(Error::GeneratorOutOfRange {
                        index: s.unsigned_abs() as usize,
                        len: generators,
                    });
                }
            }
            letters.extend_from_slice(r);
            offsets.push(letters.len());
        }
        Ok(SubgroupPresentation {
            base: 0,
            generators: (0..generators)
                .map(|j| Cell::Edge {
                    source: 0,
                    generator: j as u32,
                })
                .collect(),
            letters,
            offsets,
            parent: vec![None],
            max_boundary: relators.iter().map(Vec::len).max().unwrap_or(0),
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn relator_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn relator(&self, i: usize) -> &[i32] {
        &self.letters[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn relators(&self) -> impl Iterator<Item = &[i32]> + '_ {
        (0..self.relator_count()).map(|i| self.relator(i))
    }

    /// Longest relator after contraction.
    pub fn max_relator_len(&self) -> usize {
        (0..self.relator_count())
            .map(|i| self.offsets[i + 1] - self.offsets[i])
            .max()
            .unwrap_or(0)
    }

    /// Longest disc boundary before contraction.
    pub fn max_boundary_len(&self) -> usize {
        self.max_boundary
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn generator_cell(&self, j: usize) -> Cell {
        self.generators[j]
    }

    /// Tree path from the base vertex to `x`.
    pub fn transversal(&self, mut x: usize) -> Word {
        let mut w = Vec::new();
        while let Some((p, l)) = self.parent[x] {
            w.push(l);
            x = p as usize;
        }
        w.reverse();
        w
    }

    /// Word over the original generators representing generator `j`, as a
    /// loop at the base vertex.
    pub fn lift_generator(
        &self,
        graph: &LabeledSchreierGraph,
        correction: Option<&CorrectionSet>,
        j: usize,
    ) -> Word {
        let (start, label, end): (usize, Word, usize) = match self.generators[j] {
            Cell::Edge { source, generator } => {
                let x = source as usize;
                (
                    x,
                    vec![Letter::new(generator as usize, false)],
                    graph.target(x, generator as usize),
                )
            }
            Cell::Loop { vertex, entry } => {
                let c = correction.expect("loop generators need the correction set");
                let v = vertex as usize;
                (v, c.entries[entry as usize].witness.clone(), v)
            }
        };
        let mut w = self.transversal(start);
        w.extend(label);
        w.extend(crate::group::inverse_word(&self.transversal(end)));
        w
    }

    /// Lift of a relator to the original alphabet.
    pub fn lift_relator(
        &self,
        graph: &LabeledSchreierGraph,
        correction: Option<&CorrectionSet>,
        i: usize,
    ) -> Word {
        self.relator(i)
            .iter()
            .flat_map(|&s| {
                let w = self.lift_generator(graph, correction, s.unsigned_abs() as usize - 1);
                if s > 0 {
                    w
                } else {
                    crate::group::inverse_word(&w)
                }
            })
            .collect()
    }
}

/// Breadth-first spanning tree over the edges accepted by `keep`, visiting
/// signed generators in the order `+1, -1, +2, -2, ...`. Returns parents and
/// the tree flag per edge id `x * k + i`.
fn spanning_tree(
    graph: &LabeledSchreierGraph,
    base: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> (Vec<Option<(u32, Letter)>>, Vec<bool>, usize) {
    let n = graph.vertex_count();
    let k = graph.generator_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = vec![false; n * k];
    let mut queue = vec![base];
    seen[base] = true;
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for o in 0..2 * k {
            let l = Letter::from_ordinal(o);
            let y = graph.step(x, l);
            let edge = if l.inverse {
                y * k + l.generator
            } else {
                x * k + l.generator
            };
            let source = edge / k;
            if seen[y] || !keep(source, l.generator) {
                continue;
            }
            seen[y] = true;
            tree[edge] = true;
            parent[y] = Some((x as u32, l));
            queue.push(y);
        }
    }
    (parent, tree, queue.len())
}

/// Assembles relators in parallel, one per `(vertex, relator)` pair in
/// vertex-major order.
fn assemble<F>(n: usize, relators: &[Word], rewrite: F) -> (Vec<i32>, Vec<usize>, usize)
where
    F: Fn(usize, &[Letter], &mut Vec<i32>) -> usize + Sync,
{
    let chunks: Vec<(Vec<i32>, Vec<usize>, usize)> = (0..n)
        .into_par_iter()
        .chunks(4096)
        .map(|vs| {
            let mut letters = Vec::new();
            let mut lens = Vec::new();
            let mut longest = 0;
            for v in vs {
                for r in relators {
                    let before = letters.len();
                    longest = longest.max(rewrite(v, r, &mut letters));
                    lens.push(letters.len() - before);
                }
            }
            (letters, lens, longest)
        })
        .collect();
    let mut letters = Vec::new();
    let mut offsets = vec![0];
    let mut longest = 0;
    for (l, lens, m) in chunks {
        letters.extend(l);
        for len in lens {
            offsets.push(offsets.last().unwrap() + len);
        }
        longest = longest.max(m);
    }
    (letters, offsets, longest)
}

/// Reidemeister–Schreier presentation of the stabilizer of `base`.
pub fn schreier_presentation(
    graph: &LabeledSchreierGraph,
    group: &GroupInstance,
    base: usize,
) -> Result<SubgroupPresentation> {
    let n = graph.vertex_count();
    let k = graph.generator_count();
    if base >= n {
        return Err(Error::InvalidParams {
            family: "presentation",
            reason: format!("base vertex {base} out of range for {n} vertices"),
        });
    }
    if group.rank() != k {
        return Err(Error::LabelingMismatch(
            "group and graph disagree on the generator count".into(),
        ));
    }
    let (parent, tree, reached) = spanning_tree(graph, base, |_, _| true);
    if reached != n {
        return Err(Error::NotTransitive { reached, total: n });
    }
    let mut gen_of_edge = vec![0i32; n * k];
    let mut generators = Vec::new();
    for e in 0..n * k {
        if !tree[e] {
            generators.push(Cell::Edge {
                source: (e / k) as u32,
                generator: (e % k) as u32,
            });
            gen_of_edge[e] = generators.len() as i32;
        }
    }
    let (letters, offsets, max_boundary) = assemble(n, group.relators(), |v, r, out| {
        let mut x = v;
        for &l in r {
            let y = graph.step(x, l);
            let (e, sign) = if l.inverse {
                (y * k + l.generator, -1)
            } else {
                (x * k + l.generator, 1)
            };
            if gen_of_edge[e] != 0 {
                out.push(sign * gen_of_edge[e]);
            }
            x = y;
        }
        r.len()
    });
    Ok(SubgroupPresentation {
        base,
        generators,
        letters,
        offsets,
        parent,
        max_boundary,
    })
}

/// Presentation read off the rewired complex: 1-cells are the kept edges
/// plus one loop per correction entry, every omitted edge is replaced by its
/// loop (if any) followed by its walk, and each omitted edge contributes the
/// disc identifying its replacement path with the loop-and-walk path.
pub fn rewired_complex(
    graph: &LabeledSchreierGraph,
    group: &GroupInstance,
    kept: &EdgeSet,
    labeling: &LabeledRewiring,
    correction: &CorrectionSet,
) -> Result<SubgroupPresentation> {
    let n = graph.vertex_count();
    let k = graph.generator_count();
    if kept.vertex_count() != n || kept.generator_count() != k || labeling.vertex_count() != n {
        return Err(Error::LabelingMismatch(
            "rewiring does not match the graph".into(),
        ));
    }
    if correction.entry_of_walk.len() != labeling.walks().len() {
        return Err(Error::LabelingMismatch(
            "correction set does not match the labeling".into(),
        ));
    }
    for w in labeling.walks() {
        if kept.contains(w.vertex, w.generator) {
            return Err(Error::LabelingMismatch(format!(
                "edge ({}, {}) is both kept and rewired",
                w.vertex,
                w.generator + 1
            )));
        }
    }
    let omitted = n * k - kept.len();
    if omitted != labeling.walks().len() {
        return Err(Error::LabelingMismatch(
            "some omitted edge has no walk".into(),
        ));
    }
    let (parent, tree, reached) = spanning_tree(graph, 0, |x, i| kept.contains(x, i));
    if reached != n {
        return Err(Error::Disconnected);
    }
    let mut gen_of_edge = vec![0i32; n * k];
    let mut generators = Vec::new();
    for e in 0..n * k {
        if kept.contains(e / k, e % k) && !tree[e] {
            generators.push(Cell::Edge {
                source: (e / k) as u32,
                generator: (e % k) as u32,
            });
            gen_of_edge[e] = generators.len() as i32;
        }
    }
    let loop_base = generators.len() as i32;
    for (j, entry) in correction.entries.iter().enumerate() {
        generators.push(Cell::Loop {
            vertex: entry.vertex as u32,
            entry: j as u32,
        });
    }

    // Image of the forward traversal of edge (x, i); returns its length in
    // 1-cells before contraction.
    let image = |x: usize, i: usize, out: &mut Vec<i32>| -> usize {
        let Some(w) = labeling.walk_index(x, i) else {
            let g = gen_of_edge[x * k + i];
            if g != 0 {
                out.push(g);
            }
            return 1;
        };
        let walk = &labeling.walks()[w];
        let mut len = walk.steps.len();
        if let Some(c) = correction.entry_of_walk[w] {
            out.push(loop_base + c as i32 + 1);
            len += 1;
        }
        for s in &walk.steps {
            let g = gen_of_edge[s.source as usize * k + s.generator as usize];
            if g != 0 {
                out.push(if s.forward { g } else { -g });
            }
        }
        len
    };
    let inverse_image = |x: usize, i: usize, out: &mut Vec<i32>| -> usize {
        let start = out.len();
        let len = image(x, i, out);
        out[start..].reverse();
        out[start..].iter_mut().for_each(|s| *s = -*s);
        len
    };

    let (mut letters, mut offsets, mut max_boundary) =
        assemble(n, group.relators(), |v, r, out| {
            let mut x = v;
            let mut len = 0;
            for &l in r {
                let y = graph.step(x, l);
                len += if l.inverse {
                    inverse_image(y, l.generator, out)
                } else {
                    image(x, l.generator, out)
                };
                x = y;
            }
            len
        });

    // Omitted-edge discs: the replacement path of e against the loop and
    // walk stored for e. Both sides use the same walk, so the boundary
    // cancels freely.
    for (w, walk) in labeling.walks().iter().enumerate() {
        let mut disc = Vec::new();
        let len = image(walk.vertex, walk.generator, &mut disc);
        let mut back = Vec::new();
        if let Some(c) = correction.entry_of_walk[w] {
            back.push(loop_base + c as i32 + 1);
        }
        for s in &walk.steps {
            let g = gen_of_edge[s.source as usize * k + s.generator as usize];
            if g != 0 {
                back.push(if s.forward { g } else { -g });
            }
        }
        disc.extend(back.iter().rev().map(|s| -s));
        max_boundary = max_boundary.max(2 * len);
        letters.extend(disc);
        offsets.push(letters.len());
    }

    Ok(SubgroupPresentation {
        base: 0,
        generators,
        letters,
        offsets,
        parent,
        max_boundary,
    })
}
