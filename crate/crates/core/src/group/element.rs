use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact 3x3 integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat3(pub [BigInt; 9]);

impl Mat3 {
    pub fn identity() -> Self {
        let mut m: [BigInt; 9] = Default::default();
        for i in 0..3 {
            m[4 * i] = BigInt::one();
        }
        Mat3(m)
    }

    /// Elementary matrix `E_{ij}(t)` with 1-based `(i, j)`.
    pub fn elementary(i: usize, j: usize, t: i64) -> Self {
        let mut m = Self::identity();
        m.0[3 * (i - 1) + (j - 1)] = BigInt::from(t);
        m
    }

    pub fn from_rows(rows: [[i64; 3]; 3]) -> Self {
        let mut m: [BigInt; 9] = Default::default();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[3 * i + j] = BigInt::from(v);
            }
        }
        Mat3(m)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.0[3 * i + j]
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        let mut out: [BigInt; 9] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = BigInt::zero();
                for l in 0..3 {
                    let a = &self.0[3 * i + l];
                    let b = &rhs.0[3 * l + j];
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                out[3 * i + j] = acc;
            }
        }
        Mat3(out)
    }

    pub fn sub(&self, rhs: &Mat3) -> Mat3 {
        let mut out: [BigInt; 9] = Default::default();
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(rhs.0.iter())) {
            *o = a - b;
        }
        Mat3(out)
    }

    pub fn det(&self) -> BigInt {
        let m = |i: usize, j: usize| &self.0[3 * i + j];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }

    /// Adjugate; equals the inverse when the determinant is 1.
    pub fn adjugate(&self) -> Mat3 {
        let m = |i: usize, j: usize| &self.0[3 * i + j];
        let mut out: [BigInt; 9] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                // cofactor of (j, i)
                let (r0, r1) = others(j);
                let (c0, c1) = others(i);
                let minor = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
                out[3 * i + j] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        Mat3(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(idx, v)| {
            if idx % 4 == 0 {
                v.is_one()
            } else {
                v.is_zero()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn reduce_mod(&self, p: u64) -> [u8; 9] {
        let p = BigInt::from(p);
        let mut out = [0u8; 9];
        for (o, v) in out.iter_mut().zip(self.0.iter()) {
            let mut r = v % &p;
            if r.is_negative() {
                r += &p;
            }
            *o = u8::try_from(&r).expect("residue fits in u8");
        }
        out
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// An exact element of one of the built-in groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// Integer vector in Z^k.
    Torus(Vec<i64>),
    /// `(a, b, c)` standing for the unitriangular matrix with `a` at (1,2),
    /// `b` at (2,3) and `c` at (1,3).
    Heisenberg([i64; 3]),
    /// Determinant-one integer matrix.
    Matrix(Box<Mat3>),
}

impl GroupElement {
    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        match (self, rhs) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => {
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Heisenberg([a, b, c]), GroupElement::Heisenberg([a2, b2, c2])) => {
                GroupElement::Heisenberg([a + a2, b + b2, c + c2 + a * b2])
            }
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => {
                GroupElement::Matrix(Box::new(a.mul(b)))
            }
            _ => panic!("multiplying elements of different families"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Torus(a) => GroupElement::Torus(a.iter().map(|x| -x).collect()),
            GroupElement::Heisenberg([a, b, c]) => GroupElement::Heisenberg([-a, -b, a * b - c]),
            GroupElement::Matrix(m) => GroupElement::Matrix(Box::new(m.adjugate())),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Torus(a) => a.iter().all(|&x| x == 0),
            GroupElement::Heisenberg(t) => *t == [0, 0, 0],
            GroupElement::Matrix(m) => m.is_identity(),
        }
    }

    /// Canonical byte encoding: little-endian `i64` tuples for the vector
    /// families, row-major length-prefixed signed magnitudes for matrices.
    pub fn encode(&self) -> Vec<u8> {
        match self {
            GroupElement::Torus(a) => {
                let mut out = Vec::with_capacity(1 + 8 * a.len());
                out.push(0);
                for x in a {
                    out.extend_from_slice(&x.to_le_bytes());
                }
                out
            }
            GroupElement::Heisenberg(t) => {
                let mut out = Vec::with_capacity(25);
                out.push(1);
                for x in t {
                    out.extend_from_slice(&x.to_le_bytes());
                }
                out
            }
            GroupElement::Matrix(m) => {
                let mut out = vec![2];
                for v in &m.0 {
                    let bytes = v.to_signed_bytes_le();
                    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
                    out.extend_from_slice(&bytes);
                }
                out
            }
        }
    }

    pub fn as_matrix(&self) -> Option<&Mat3> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Torus(a) => write!(f, "{a:?}"),
            GroupElement::Heisenberg(t) => write!(f, "{t:?}"),
            GroupElement::Matrix(m) => {
                let rows: Vec<String> = (0..3)
                    .map(|i| {
                        let r: Vec<String> = (0..3).map(|j| m.get(i, j).to_string()).collect();
                        format!("[{}]", r.join(","))
                    })
                    .collect();
                write!(f, "[{}]", rows.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_inverse() {
        let g = GroupElement::Heisenberg([2, -3, 5]);
        assert!(g.mul(&g.inverse()).is_identity());
        assert!(g.inverse().mul(&g).is_identity());
    }

    #[test]
    fn matrix_inverse_and_det() {
        let m = Mat3::from_rows([[2, 1, 0], [1, 1, 0], [3, 4, 1]]);
        assert_eq!(m.det(), BigInt::one());
        let g = GroupElement::Matrix(Box::new(m));
        assert!(g.mul(&g.inverse()).is_identity());
    }

    #[test]
    fn reduce_mod_negative() {
        let m = Mat3::from_rows([[1, -1, 0], [0, 1, -7], [0, 0, 1]]);
        assert_eq!(m.reduce_mod(5), [1, 4, 0, 0, 1, 3, 0, 0, 1]);
    }

    #[test]
    fn encodings_distinguish_families() {
        let a = GroupElement::Torus(vec![0, 0, 0]);
        let b = GroupElement::Heisenberg([0, 0, 0]);
        assert_ne!(a.encode(), b.encode());
    }
}
