use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::homology::SparseIntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub rows: usize,
    pub cols: usize,
    /// Number of invariant factors equal to 1.
    pub unit_count: usize,
    torsion: Vec<BigInt>,
    pub betti: usize,
    pub trs: BigInt,
}

impl SnfResult {
    fn new(rows: usize, cols: usize, diagonal: Vec<BigInt>) -> Self {
        let chain = divisibility_chain(diagonal);
        let unit_count = chain.iter().take_while(|d| d.is_one()).count();
        let torsion: Vec<BigInt> = chain[unit_count..].to_vec();
        let trs = torsion.iter().product::<BigInt>();
        SnfResult {
            rows,
            cols,
            unit_count,
            betti: cols - chain.len(),
            torsion,
            trs: if unit_count == chain.len() {
                BigInt::one()
            } else {
                trs
            },
        }
    }

    /// All nonzero invariant factors, `d_1 | d_2 | ...`.
    pub fn factors(&self) -> Vec<BigInt> {
        let mut f = vec![BigInt::one(); self.unit_count];
        f.extend(self.torsion.iter().cloned());
        f
    }

    /// Invariant factors greater than 1.
    pub fn torsion_factors(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.unit_count + self.torsion.len()
    }

    /// Same abelian group presented: equal betti numbers and torsion factors.
    pub fn same_group(&self, other: &SnfResult) -> bool {
        self.betti == other.betti && self.torsion == other.torsion
    }

    /// `Z^betti + Z/d_1 + ...`, e.g. `Z^2 + Z/2`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.betti > 0 {
            parts.push(if self.betti == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.betti)
            });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Rewrites a list of nonzero diagonal entries into the equivalent
/// divisibility chain by pairwise gcd/lcm exchange.
fn divisibility_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.sort();
    let nontrivial = d.iter().position(|x| !x.is_one()).unwrap_or(d.len());
    let tail = &mut d[nontrivial..];
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            if !(&tail[j] % &tail[i]).is_zero() {
                let g = tail[i].gcd(&tail[j]);
                let l = tail[i].lcm(&tail[j]);
                tail[i] = g;
                tail[j] = l;
            }
        }
    }
    d
}

trait Scalar: Clone + Sized {
    fn from_i64(v: i64) -> Self;
    fn is_unit(&self) -> bool;
    fn vanishes(&self) -> bool;
    /// `a * b`.
    fn times(&self, b: &Self) -> Option<Self>;
    /// `a - f * b`.
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self>;
    fn into_big(self) -> BigInt;
}

impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn times(&self, b: &Self) -> Option<Self> {
        self.checked_mul(*b)
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(f.checked_mul(*b)?)
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn times(&self, b: &Self) -> Option<Self> {
        Some(self * b)
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self> {
        Some(self - f * b)
    }
    fn into_big(self) -> BigInt {
        self
    }
}

struct Overflow;

/// Outcome of unit-pivot elimination: number of unit pivots and the rows
/// left without any unit entry.
struct Reduced {
    units: usize,
    residual: Vec<Vec<(u32, BigInt)>>,
}

/// `r - f * p` for sorted sparse rows; reports columns new to `r`.
fn combine<T: Scalar>(
    r: &[(u32, T)],
    p: &[(u32, T)],
    f: &T,
    fresh: &mut Vec<u32>,
) -> Result<Vec<(u32, T)>, Overflow> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j == p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i == r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push(r[i].clone());
            i += 1;
        } else if take_p {
            let v = T::from_i64(0).sub_mul(f, &p[j].1).ok_or(Overflow)?;
            fresh.push(p[j].0);
            out.push((p[j].0, v));
            j += 1;
        } else {
            let v = r[i].1.sub_mul(f, &p[j].1).ok_or(Overflow)?;
            if !v.vanishes() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// Eliminates unit pivots, shortest rows first; among the unit entries of
/// a row the column with the fewest known occurrences is used.
fn eliminate_units<T: Scalar>(m: &SparseIntegerMatrix) -> Result<Reduced, Overflow> {
    let mut rows: Vec<Vec<(u32, T)>> = (0..m.row_count())
        .map(|r| m.row(r).map(|(c, v)| (c as u32, T::from_i64(v))).collect())
        .collect();
    let mut active = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.col_count()];
    let mut heap = BinaryHeap::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].push(r as u32);
        }
        heap.push(Reverse((row.len(), r as u32)));
    }
    let mut units = 0;
    let mut fresh = Vec::new();
    while let Some(Reverse((len, r))) = heap.pop() {
        let r = r as usize;
        if !active[r] || rows[r].len() != len {
            continue;
        }
        if len == 0 {
            active[r] = false;
            continue;
        }
        let Some(&(c, ref u)) = rows[r]
            .iter()
            .filter(|e| e.1.is_unit())
            .min_by_key(|e| (col_rows[e.0 as usize].len(), e.0))
        else {
            continue;
        };
        let u = u.clone();
        let pivot = std::mem::take(&mut rows[r]);
        active[r] = false;
        units += 1;
        for t in std::mem::take(&mut col_rows[c as usize]) {
            let t = t as usize;
            if !active[t] {
                continue;
            }
            let Ok(idx) = rows[t].binary_search_by_key(&c, |e| e.0) else {
                continue;
            };
            let f = rows[t][idx].1.times(&u).ok_or(Overflow)?;
            fresh.clear();
            let next = combine(&rows[t], &pivot, &f, &mut fresh)?;
            for &nc in &fresh {
                col_rows[nc as usize].push(t as u32);
            }
            rows[t] = next;
            heap.push(Reverse((rows[t].len(), t as u32)));
        }
    }
    let residual = rows
        .into_iter()
        .zip(active)
        .filter(|(row, a)| *a && !row.is_empty())
        .map(|(row, _)| row.into_iter().map(|(c, v)| (c, v.into_big())).collect())
        .collect();
    Ok(Reduced { units, residual })
}

/// Diagonalizes a dense matrix using smallest-magnitude pivots; returns the
/// nonzero diagonal.
fn dense_diagonal(mut a: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
    let rows = a.len();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.magnitude() < a[bi][bj].magnitude())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        swap_columns(&mut a, t, bj);
        loop {
            // clear the pivot column with row operations
            loop {
                let next = (t + 1..rows)
                    .filter(|&i| !a[i][t].is_zero())
                    .min_by(|&i, &j| a[i][t].magnitude().cmp(a[j][t].magnitude()));
                let Some(i) = next else { break };
                if a[i][t].magnitude() < a[t][t].magnitude() {
                    a.swap(t, i);
                }
                let (head, tail) = a.split_at_mut(t + 1);
                let pivot = &head[t];
                for row in tail.iter_mut() {
                    if row[t].is_zero() {
                        continue;
                    }
                    let q = row[t].div_floor(&pivot[t]);
                    for (x, p) in row.iter_mut().zip(pivot).skip(t) {
                        if !p.is_zero() {
                            *x -= &q * p;
                        }
                    }
                }
            }
            // the pivot column is clear below, so column operations only
            // touch the pivot row
            let (pivot, rest) = a[t].split_at_mut(t + 1);
            let p = &pivot[t];
            for x in rest.iter_mut() {
                if !x.is_zero() {
                    let q = x.div_floor(p);
                    *x -= q * p;
                }
            }
            let next = (t + 1..cols)
                .filter(|&j| !a[t][j].is_zero())
                .min_by(|&i, &j| a[t][i].magnitude().cmp(a[t][j].magnitude()));
            match next {
                Some(j) => swap_columns(&mut a, t, j),
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn swap_columns(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

pub fn smith_normal_form(m: &SparseIntegerMatrix) -> SnfResult {
    let reduced = match eliminate_units::<i64>(m) {
        Ok(r) => r,
        Err(Overflow) => match eliminate_units::<BigInt>(m) {
            Ok(r) => r,
            Err(Overflow) => unreachable!("big integers do not overflow"),
        },
    };
    let mut used: Vec<u32> = reduced
        .residual
        .iter()
        .flat_map(|r| r.iter().map(|e| e.0))
        .collect();
    used.sort_unstable();
    used.dedup();
    let mut diagonal = vec![BigInt::one(); reduced.units];
    if !used.is_empty() {
        let width = used.len();
        let dense: Vec<Vec<BigInt>> = reduced
            .residual
            .into_iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); width];
                for (c, v) in row {
                    d[used.binary_search(&c).unwrap()] = v;
                }
                d
            })
            .collect();
        diagonal.extend(dense_diagonal(dense, width));
    }
    SnfResult::new(m.row_count(), m.col_count(), diagonal)
}

/// `b^m` with `b` the largest row abs-sum and `m` the column count.
pub fn hadamard_bound(m: &SparseIntegerMatrix) -> BigInt {
    BigInt::from(m.max_row_abs_sum()).pow(m.col_count() as u32)
}

/// Whether `trs <= b^m`, avoiding the power when bit lengths decide it.
pub fn within_hadamard(m: &SparseIntegerMatrix, trs: &BigInt) -> bool {
    let b = m.max_row_abs_sum();
    let floor_log2 = 63 - b.leading_zeros() as u64;
    if trs.bits() <= floor_log2 * m.col_count() as u64 {
        return true;
    }
    *trs <= hadamard_bound(m)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "logarithm of a non-positive integer");
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("shifted to 64 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(trs) / index`.
pub fn torsion_growth_stat(trs: &BigInt, index: u64) -> f64 {
    ln_big(trs) / index as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn snf(cols: usize, rows: &[Vec<i64>]) -> SnfResult {
        smith_normal_form(&SparseIntegerMatrix::from_dense(cols, rows))
    }

    /// Determinant by fraction-free elimination.
    fn det(mut a: Vec<Vec<BigInt>>) -> BigInt {
        let n = a.len();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n)
            .flat_map(|last| {
                subsets(last, k - 1).into_iter().map(move |mut s| {
                    s.push(last);
                    s
                })
            })
            .collect()
    }

    /// Invariant factors as ratios of successive gcds of all k x k minors.
    fn minors_oracle(a: &[Vec<i64>], cols: usize) -> Vec<BigInt> {
        let mut out = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=a.len().min(cols) {
            let mut g = BigInt::zero();
            for rs in subsets(a.len(), k) {
                for cs in subsets(cols, k) {
                    let sub = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| BigInt::from(a[r][c])).collect())
                        .collect();
                    g = g.gcd(&det(sub));
                }
            }
            if g.is_zero() {
                break;
            }
            out.push(&g / &prev);
            prev = g;
        }
        out
    }

    #[test]
    fn documented_examples() {
        let r = snf(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(r.factors(), big(&[1, 6]));
        assert_eq!((r.trs.clone(), r.betti), (BigInt::from(6), 0));

        let r = snf(2, &[vec![2, 4], vec![6, 8]]);
        assert_eq!(r.factors(), big(&[2, 4]));
        assert_eq!(r.trs, BigInt::from(8));

        let r = snf(3, &[vec![0; 3], vec![0; 3], vec![0; 3]]);
        assert!(r.factors().is_empty());
        assert_eq!((r.betti, r.trs.clone()), (3, BigInt::one()));

        let r = smith_normal_form(&SparseIntegerMatrix::zero(0, 4));
        assert_eq!((r.betti, r.trs.clone()), (4, BigInt::one()));
    }

    #[test]
    fn hadamard_examples() {
        let m = SparseIntegerMatrix::from_dense(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(hadamard_bound(&m), BigInt::from(9));
        assert!(within_hadamard(&m, &BigInt::from(6)));
        assert!(!within_hadamard(&m, &BigInt::from(10)));
        assert_eq!(
            hadamard_bound(&SparseIntegerMatrix::zero(3, 3)),
            BigInt::one()
        );
    }

    #[test]
    fn logarithms() {
        assert_eq!(torsion_growth_stat(&BigInt::one(), 7), 0.0);
        let x = BigInt::one() << 1000u32;
        let expect = 100.0 * std::f64::consts::LN_2;
        assert!((torsion_growth_stat(&x, 10) - expect).abs() <= 1e-9 * expect);
        let y = BigInt::from(3).pow(500u32) * 7;
        let expect = 500.0 * 3f64.ln() + 7f64.ln();
        assert!((ln_big(&y) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        // a chain of doublings through unit pivots
        let n = 70;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut r = vec![0i64; n + 1];
            r[i] = 1;
            r[i + 1] = -2;
            rows.push(r);
        }
        let mut last = vec![0i64; n + 1];
        last[0] = 3;
        rows.push(last);
        let r = snf(n + 1, &rows);
        // the cokernel is Z/(3 * 2^70) generated by the last column
        assert_eq!(r.betti, 0);
        assert_eq!(r.trs, BigInt::from(3) * (BigInt::one() << 70u32));
        assert_eq!(r.torsion_factors().len(), 1);
    }

    #[test]
    fn chain_normalization() {
        assert_eq!(
            divisibility_chain(big(&[4, 6, 1, -10])),
            big(&[1, 2, 2, 60])
        );
    }

    fn matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            (
                Just(c),
                proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn matches_minor_gcds((cols, rows) in matrix()) {
            let r = snf(cols, &rows);
            let oracle = minors_oracle(&rows, cols);
            prop_assert_eq!(r.factors(), oracle.clone());
            prop_assert_eq!(r.betti, cols - oracle.len());
            let m = SparseIntegerMatrix::from_dense(cols, &rows);
            prop_assert!(r.trs <= hadamard_bound(&m));
        }

        #[test]
        fn transpose_has_same_factors((cols, rows) in matrix()) {
            let t: Vec<Vec<i64>> = (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
            prop_assert_eq!(snf(cols, &rows).factors(), snf(rows.len(), &t).factors());
        }
    }
}
