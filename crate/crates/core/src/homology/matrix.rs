use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology::SubgroupPresentation;

/// Integer matrix in compressed-row form with sorted, nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntegerMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<i64>,
}

impl SparseIntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntegerMatrix {
            rows,
            cols,
            offsets: vec![0; rows + 1],
            columns: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_triples(
        rows: usize,
        cols: usize,
        mut triples: Vec<(usize, usize, i64)>,
    ) -> Result<Self> {
        triples.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut m = SparseIntegerMatrix::zero(rows, cols);
        for (i, &(r, c, v)) in triples.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::Invariant(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            if v == 0 {
                return Err(Error::Invariant(format!("explicit zero at ({r}, {c})")));
            }
            if i > 0 && triples[i - 1].0 == r && triples[i - 1].1 == c {
                return Err(Error::Invariant(format!("duplicate entry ({r}, {c})")));
            }
            m.columns.push(c as u32);
            m.values.push(v);
            m.offsets[r + 1] += 1;
        }
        for r in 0..rows {
            m.offsets[r + 1] += m.offsets[r];
        }
        Ok(m)
    }

    pub fn from_dense(cols: usize, dense: &[Vec<i64>]) -> Self {
        let triples = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                assert_eq!(row.len(), cols);
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(move |(c, &v)| (r, c, v))
            })
            .collect();
        Self::from_triples(dense.len(), cols, triples).expect("dense rows are well formed")
    }

    pub(crate) fn from_rows(cols: usize, rows: Vec<Vec<(u32, i64)>>) -> Self {
        let mut m = SparseIntegerMatrix::zero(0, cols);
        m.rows = rows.len();
        for row in rows {
            for (c, v) in row {
                m.columns.push(c);
                m.values.push(v);
            }
            m.offsets.push(m.columns.len());
        }
        m
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let span = self.offsets[r]..self.offsets[r + 1];
        self.columns[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            d[r][c] = v;
        }
        d
    }

    /// Largest row sum of absolute values, at least 1.
    pub fn max_row_abs_sum(&self) -> u64 {
        (0..self.rows)
            .map(|r| self.row(r).map(|(_, v)| v.unsigned_abs()).sum::<u64>())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// Text dump: `rows cols nnz`, then one `r c value` line per entry in
    /// row-major order.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }
}

/// Relation matrix of the abelianization: one row per relator, one column
/// per generator, entries are signed letter counts.
pub fn abelianized_matrix(p: &SubgroupPresentation) -> SparseIntegerMatrix {
    let rows: Vec<Vec<(u32, i64)>> = (0..p.relator_count())
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<(u32, i64)> = p
                .relator(i)
                .iter()
                .map(|&s| (s.unsigned_abs() - 1, s.signum() as i64))
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            let mut out: Vec<(u32, i64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match out.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => out.push((c, v)),
                }
            }
            out.retain(|e| e.1 != 0);
            out
        })
        .collect();
    SparseIntegerMatrix::from_rows(p.generator_count(), rows)
}
