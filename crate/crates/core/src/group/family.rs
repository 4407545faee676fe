use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::group::action::PermutationAction;
use crate::group::element::{GroupElement, Mat3};
use crate::group::word::{commutator, word, Letter, Word};

/// Largest quotient we are willing to materialise as explicit permutations.
pub const MAX_QUOTIENT_SIZE: u128 = 6_000_000;

pub const SUPPORTED_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Chain order of the elementary generators of SL(3, Z). Consecutive entries
/// commute.
pub const SL3_CHAIN: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    Torus,
    Heisenberg,
    Sl3zPrincipal,
    Sl3zProjective,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [
        FamilyTag::Torus,
        FamilyTag::Heisenberg,
        FamilyTag::Sl3zPrincipal,
        FamilyTag::Sl3zProjective,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Torus => "torus",
            FamilyTag::Heisenberg => "heisenberg",
            FamilyTag::Sl3zPrincipal => "sl3z-principal",
            FamilyTag::Sl3zProjective => "sl3z-projective",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyTag::Torus => "Z^k with (nZ)^k, parameter `rank` = k >= 2, sizes = n >= 2",
            FamilyTag::Heisenberg => {
                "integer Heisenberg group, chain x, z, y, kernel of reduction mod n >= 2"
            }
            FamilyTag::Sl3zPrincipal => {
                "SL(3,Z), elementary chain, principal congruence subgroup of prime level p"
            }
            FamilyTag::Sl3zProjective => {
                "SL(3,Z), elementary chain, stabiliser of [1:0:0] in P^2(F_p)"
            }
        }
    }

    /// Whether every quotient of this family is by a normal subgroup.
    pub fn is_normal(self) -> bool {
        !matches!(self, FamilyTag::Sl3zProjective)
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(FamilyTag::Torus),
            "heisenberg" => Ok(FamilyTag::Heisenberg),
            "sl3z-principal" => Ok(FamilyTag::Sl3zPrincipal),
            "sl3z-projective" => Ok(FamilyTag::Sl3zProjective),
            "sl3-poly" => Err(Error::InvalidParams {
                family: "sl3-poly",
                reason: "the optional polynomial family is not built into this binary".into(),
            }),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Ordered generator labels of a right-angled chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorChain {
    labels: Vec<String>,
}

impl GeneratorChain {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParams {
                family: "chain",
                reason: "a chain needs at least one generator".into(),
            });
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidParams {
                family: "chain",
                reason: "generator labels must be distinct".into(),
            });
        }
        Ok(GeneratorChain { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteOrderEvidence {
    /// Coordinate translation of a torsion-free nilpotent group.
    Translation,
    /// Non-identity matrix `M` with `(M - I)^3 = 0`.
    Unipotent,
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateFailure {
    /// 1-based positions of the consecutive pair that fails to commute.
    NonCommuting {
        first: usize,
        second: usize,
    },
    NotInfiniteOrder {
        generator: usize,
    },
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateFailure::NonCommuting { first, second } => {
                write!(f, "generators {first} and {second} do not commute")
            }
            CertificateFailure::NotInfiniteOrder { generator } => {
                write!(
                    f,
                    "generator {generator} is not certified of infinite order"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightAngledCertificate {
    /// `commuting[i]` is the check for chain positions `i + 1` and `i + 2`.
    pub commuting: Vec<bool>,
    pub infinite_order: Vec<InfiniteOrderEvidence>,
}

impl RightAngledCertificate {
    pub fn first_failure(&self) -> Option<CertificateFailure> {
        if let Some(i) = self.commuting.iter().position(|ok| !ok) {
            return Some(CertificateFailure::NonCommuting {
                first: i + 1,
                second: i + 2,
            });
        }
        self.infinite_order
            .iter()
            .position(|e| *e == InfiniteOrderEvidence::NotCertified)
            .map(|i| CertificateFailure::NotInfiniteOrder { generator: i + 1 })
    }

    pub fn is_valid(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn require(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(f) => Err(Error::NotRightAngled(f.to_string())),
        }
    }
}

/// A finitely presented right-angled group with exact arithmetic.
#[derive(Clone, Debug)]
pub struct GroupInstance {
    tag: FamilyTag,
    rank: usize,
    chain: GeneratorChain,
    generators: Vec<GroupElement>,
    inverses: Vec<GroupElement>,
    relators: Vec<Word>,
}

impl GroupInstance {
    pub fn torus(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidParams {
                family: "torus",
                reason: format!("rank must be at least 2, got {rank}"),
            });
        }
        let generators: Vec<GroupElement> = (0..rank)
            .map(|i| {
                let mut v = vec![0; rank];
                v[i] = 1;
                GroupElement::Torus(v)
            })
            .collect();
        let mut relators = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                relators.push(commutator(
                    &[Letter::new(i, false)],
                    &[Letter::new(j, false)],
                ));
            }
        }
        let labels = (1..=rank).map(|i| format!("a{i}")).collect();
        Self::assemble(FamilyTag::Torus, rank, labels, generators, relators)
    }

    /// Heisenberg group with chain order `x, z, y`.
    pub fn heisenberg() -> Self {
        let generators = vec![
            GroupElement::Heisenberg([1, 0, 0]),
            GroupElement::Heisenberg([0, 0, 1]),
            GroupElement::Heisenberg([0, 1, 0]),
        ];
        // [x,z], [y,z], [x,y] z^-1 over the chain indices x=1, z=2, y=3
        let relators = vec![
            word(&[1, 2, -1, -2]),
            word(&[3, 2, -3, -2]),
            word(&[1, 3, -1, -3, -2]),
        ];
        let labels = ["x", "z", "y"].iter().map(|s| s.to_string()).collect();
        Self::assemble(FamilyTag::Heisenberg, 3, labels, generators, relators)
            .expect("static Heisenberg presentation")
    }

    /// SL(3, Z) with the elementary generators in the given order. The
    /// relators are the Steinberg relations plus `(E12 E21^-1 E12)^4`.
    pub fn sl3z(tag: FamilyTag, order: &[(usize, usize)]) -> Result<Self> {
        if !matches!(tag, FamilyTag::Sl3zPrincipal | FamilyTag::Sl3zProjective) {
            return Err(Error::InvalidParams {
                family: "sl3z",
                reason: format!("{tag} is not an SL(3,Z) family"),
            });
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        let mut expected = SL3_CHAIN.to_vec();
        expected.sort_unstable();
        if sorted != expected {
            return Err(Error::InvalidParams {
                family: "sl3z",
                reason: "chain must list each off-diagonal position exactly once".into(),
            });
        }
        let pos = |ij: (usize, usize)| order.iter().position(|&o| o == ij).unwrap();
        let gen = |ij: (usize, usize)| Letter::new(pos(ij), false);
        let generators = order
            .iter()
            .map(|&(i, j)| GroupElement::Matrix(Box::new(Mat3::elementary(i, j, 1))))
            .collect();

        let mut relators = Vec::new();
        for (a, &(i, j)) in order.iter().enumerate() {
            for &(k, l) in &order[a + 1..] {
                if j != k && i != l {
                    relators.push(commutator(&[gen((i, j))], &[gen((k, l))]));
                }
            }
        }
        for &(i, j) in &SL3_CHAIN {
            for k in 1..=3 {
                if k != i && k != j {
                    let mut w = commutator(&[gen((i, j))], &[gen((j, k))]);
                    w.push(gen((i, k)).inv());
                    relators.push(w);
                }
            }
        }
        let w12 = [gen((1, 2)), gen((2, 1)).inv(), gen((1, 2))];
        relators.push(w12.iter().cycle().take(12).copied().collect());

        let labels = order.iter().map(|(i, j)| format!("E{i}{j}")).collect();
        Self::assemble(tag, 6, labels, generators, relators)
    }

    pub fn from_tag(tag: FamilyTag, rank: Option<usize>) -> Result<Self> {
        match tag {
            FamilyTag::Torus => Self::torus(rank.unwrap_or(2)),
            FamilyTag::Heisenberg => Ok(Self::heisenberg()),
            FamilyTag::Sl3zPrincipal | FamilyTag::Sl3zProjective => Self::sl3z(tag, &SL3_CHAIN),
        }
    }

    fn assemble(
        tag: FamilyTag,
        rank: usize,
        labels: Vec<String>,
        generators: Vec<GroupElement>,
        relators: Vec<Word>,
    ) -> Result<Self> {
        let inverses = generators.iter().map(GroupElement::inverse).collect();
        Ok(GroupInstance {
            tag,
            rank,
            chain: GeneratorChain::new(labels)?,
            generators,
            inverses,
            relators,
        })
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    /// Number of chain generators `k` (the `d` of the presentation).
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn chain(&self) -> &GeneratorChain {
        &self.chain
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Maximal relator length `b`.
    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Vec::len).max().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        match self.tag {
            FamilyTag::Torus => GroupElement::Torus(vec![0; self.rank]),
            FamilyTag::Heisenberg => GroupElement::Heisenberg([0, 0, 0]),
            _ => GroupElement::Matrix(Box::new(Mat3::identity())),
        }
    }

    pub fn letter_element(&self, l: Letter) -> &GroupElement {
        if l.inverse {
            &self.inverses[l.generator]
        } else {
            &self.generators[l.generator]
        }
    }

    pub fn generator(&self, i: usize) -> &GroupElement {
        &self.generators[i]
    }

    pub fn evaluate_word(&self, w: &[Letter]) -> Result<GroupElement> {
        let mut acc = self.identity();
        for &l in w {
            if l.generator >= self.rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l.generator + 1,
                    len: self.rank,
                });
            }
            acc = acc.mul(self.letter_element(l));
        }
        Ok(acc)
    }

    pub fn verify_right_angled(&self) -> RightAngledCertificate {
        let commuting = (0..self.rank.saturating_sub(1))
            .map(|i| {
                let a = &self.generators[i];
                let b = &self.generators[i + 1];
                a.mul(b) == b.mul(a)
            })
            .collect();
        let infinite_order = self
            .generators
            .iter()
            .map(|g| match g {
                GroupElement::Torus(v) if v.iter().any(|&c| c != 0) => {
                    InfiniteOrderEvidence::Translation
                }
                GroupElement::Heisenberg([a, b, c]) if (*a, *b, *c) != (0, 0, 0) => {
                    InfiniteOrderEvidence::Translation
                }
                GroupElement::Matrix(m) => {
                    let n = m.sub(&Mat3::identity());
                    if !n.is_zero() && n.mul(&n).mul(&n).is_zero() {
                        InfiniteOrderEvidence::Unipotent
                    } else {
                        InfiniteOrderEvidence::NotCertified
                    }
                }
                _ => InfiniteOrderEvidence::NotCertified,
            })
            .collect();
        RightAngledCertificate {
            commuting,
            infinite_order,
        }
    }

    /// Validates a size parameter without building the quotient.
    pub fn check_size(&self, size: u64) -> Result<()> {
        CosetSpace::new(self.tag, self.rank, size).map(|_| ())
    }

    /// Finite quotient `Gamma / Gamma_size` with its coset action.
    pub fn quotient(&self, size: u64) -> Result<Quotient> {
        let mut space = CosetSpace::new(self.tag, self.rank, size)?;
        let action = space.build_action(self)?;
        Ok(Quotient {
            size,
            space,
            action,
        })
    }
}

/// Right-coset space of a finite-index subgroup; vertex 0 is the base coset.
#[derive(Clone, Debug)]
enum CosetSpace {
    Torus {
        n: u64,
        rank: usize,
    },
    Heisenberg {
        n: u64,
    },
    Principal {
        p: u64,
        index: HashMap<[u8; 9], u32>,
        points: Vec<[u8; 9]>,
    },
    Projective {
        p: u64,
    },
}

fn sl3_order(p: u128) -> u128 {
    p.pow(3) * (p.pow(3) - 1) * (p.pow(2) - 1)
}

fn check_limit(requested: u128) -> Result<()> {
    if requested > MAX_QUOTIENT_SIZE {
        return Err(Error::IndexTooLarge {
            requested,
            limit: MAX_QUOTIENT_SIZE,
        });
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::UnsupportedPrime(p))
    }
}

fn mat_mod_mul(a: &[u8; 9], b: &[u8; 9], p: u64) -> [u8; 9] {
    let mut out = [0u8; 9];
    for i in 0..3 {
        for j in 0..3 {
            let s: u64 = (0..3)
                .map(|l| a[3 * i + l] as u64 * b[3 * l + j] as u64)
                .sum();
            out[3 * i + j] = (s % p) as u8;
        }
    }
    out
}

fn normalize_point(v: [u64; 3], p: u64) -> [u64; 3] {
    let lead = v
        .iter()
        .copied()
        .find(|&c| c != 0)
        .expect("non-zero vector");
    // inverse of the leading coordinate by Fermat
    let mut inv = 1u64;
    let mut base = lead;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    [v[0] * inv % p, v[1] * inv % p, v[2] * inv % p]
}

fn projective_index(v: [u64; 3], p: u64) -> usize {
    let [a, b, c] = normalize_point(v, p);
    if a == 1 {
        (b * p + c) as usize
    } else if b == 1 {
        (p * p + c) as usize
    } else {
        (p * p + p) as usize
    }
}

impl CosetSpace {
    fn new(tag: FamilyTag, rank: usize, size: u64) -> Result<Self> {
        match tag {
            FamilyTag::Torus => {
                if size < 2 {
                    return Err(Error::InvalidParams {
                        family: "torus",
                        reason: format!("side length must be at least 2, got {size}"),
                    });
                }
                check_limit((size as u128).saturating_pow(rank as u32))?;
                Ok(CosetSpace::Torus { n: size, rank })
            }
            FamilyTag::Heisenberg => {
                if size < 2 {
                    return Err(Error::InvalidParams {
                        family: "heisenberg",
                        reason: format!("modulus must be at least 2, got {size}"),
                    });
                }
                check_limit((size as u128).saturating_pow(3))?;
                Ok(CosetSpace::Heisenberg { n: size })
            }
            FamilyTag::Sl3zPrincipal => {
                check_prime(size)?;
                check_limit(sl3_order(size as u128))?;
                Ok(CosetSpace::Principal {
                    p: size,
                    index: HashMap::new(),
                    points: Vec::new(),
                })
            }
            FamilyTag::Sl3zProjective => {
                check_prime(size)?;
                Ok(CosetSpace::Projective { p: size })
            }
        }
    }

    fn build_action(&mut self, group: &GroupInstance) -> Result<PermutationAction> {
        let k = group.rank();
        match self {
            CosetSpace::Torus { n, rank } => {
                let n = *n as usize;
                let total = n.pow(*rank as u32);
                let perms = (0..*rank)
                    .map(|g| {
                        let stride = n.pow(g as u32);
                        (0..total)
                            .map(|x| {
                                let coord = (x / stride) % n;
                                let y = if coord + 1 == n {
                                    x - coord * stride
                                } else {
                                    x + stride
                                };
                                y as u32
                            })
                            .collect()
                    })
                    .collect();
                PermutationAction::new(total, perms)
            }
            CosetSpace::Heisenberg { n } => {
                let n = *n as i64;
                let total = (n * n * n) as usize;
                let perms = (0..k)
                    .map(|g| {
                        let s = group.generator(g);
                        (0..total)
                            .map(|x| {
                                let x = x as i64;
                                let v = GroupElement::Heisenberg([x % n, (x / n) % n, x / (n * n)]);
                                heisenberg_index(&v.mul(s), n) as u32
                            })
                            .collect()
                    })
                    .collect();
                PermutationAction::new(total, perms)
            }
            CosetSpace::Principal { p, index, points } => {
                let p = *p;
                let gens: Vec<[u8; 9]> = (0..k)
                    .map(|g| group.generator(g).as_matrix().unwrap().reduce_mod(p))
                    .collect();
                let id = Mat3::identity().reduce_mod(p);
                index.insert(id, 0);
                points.push(id);
                let mut head = 0;
                let mut images: Vec<Vec<u32>> = vec![Vec::new(); k];
                while head < points.len() {
                    let x = points[head];
                    for (g, s) in gens.iter().enumerate() {
                        let y = mat_mod_mul(&x, s, p);
                        let next = index.len() as u32;
                        let idx = *index.entry(y).or_insert_with(|| {
                            points.push(y);
                            next
                        });
                        images[g].push(idx);
                    }
                    head += 1;
                }
                PermutationAction::new(points.len(), images)
            }
            CosetSpace::Projective { p } => {
                let p = *p;
                let total = (p * p + p + 1) as usize;
                let mut reps = vec![[0u64; 3]; total];
                for a in 0..p {
                    for b in 0..p {
                        reps[projective_index([1, a, b], p)] = [1, a, b];
                    }
                }
                for c in 0..p {
                    reps[projective_index([0, 1, c], p)] = [0, 1, c];
                }
                reps[projective_index([0, 0, 1], p)] = [0, 0, 1];
                let perms = (0..k)
                    .map(|g| {
                        let m = group.generator(g).as_matrix().unwrap().reduce_mod(p);
                        reps.iter()
                            .map(|v| {
                                let w: [u64; 3] = std::array::from_fn(|j| {
                                    (0..3).map(|i| v[i] * m[3 * i + j] as u64).sum::<u64>() % p
                                });
                                projective_index(w, p) as u32
                            })
                            .collect()
                    })
                    .collect();
                PermutationAction::new(total, perms)
            }
        }
    }

    fn project(&self, g: &GroupElement) -> usize {
        match (self, g) {
            (CosetSpace::Torus { n, .. }, GroupElement::Torus(v)) => {
                let n = *n as i64;
                v.iter()
                    .rev()
                    .fold(0i64, |acc, &c| acc * n + c.rem_euclid(n)) as usize
            }
            (CosetSpace::Heisenberg { n }, GroupElement::Heisenberg(_)) => {
                heisenberg_index(g, *n as i64)
            }
            (CosetSpace::Principal { p, index, .. }, GroupElement::Matrix(m)) => {
                index[&m.reduce_mod(*p)] as usize
            }
            (CosetSpace::Projective { p }, GroupElement::Matrix(m)) => {
                let r = m.reduce_mod(*p);
                projective_index([r[0] as u64, r[1] as u64, r[2] as u64], *p)
            }
            _ => panic!("element does not belong to this coset space"),
        }
    }
}

fn heisenberg_index(g: &GroupElement, n: i64) -> usize {
    match g {
        GroupElement::Heisenberg([a, b, c]) => {
            (a.rem_euclid(n) + n * b.rem_euclid(n) + n * n * c.rem_euclid(n)) as usize
        }
        _ => unreachable!(),
    }
}

/// A finite quotient: the coset action plus the projection from exact
/// elements to cosets.
#[derive(Clone, Debug)]
pub struct Quotient {
    size: u64,
    space: CosetSpace,
    action: PermutationAction,
}

impl Quotient {
    /// The family's size parameter (side length, modulus or prime).
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn index(&self) -> usize {
        self.action.vertex_count()
    }

    pub fn action(&self) -> &PermutationAction {
        &self.action
    }

    pub fn into_action(self) -> PermutationAction {
        self.action
    }

    /// Coset of the base vertex moved by `g`, i.e. `0 . g`.
    pub fn project(&self, g: &GroupElement) -> usize {
        self.space.project(g)
    }
}

/// Builds a built-in family together with the quotient for each size.
pub fn make_family(
    tag: FamilyTag,
    rank: Option<usize>,
    sizes: &[u64],
) -> Result<(GroupInstance, Vec<Quotient>)> {
    let group = GroupInstance::from_tag(tag, rank)?;
    let quotients = sizes
        .iter()
        .map(|&s| group.quotient(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((group, quotients))
}
