//! Matroids given by their bases, the lattice of flats, and characteristic
//! polynomials.

use std::collections::{BTreeSet, HashSet};
use std::ops::Deref;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{GradedSubposet, MobiusTable, PosetError};
use crate::rational::Q;
use crate::subset::{Subset, MAX_GROUND};
use crate::unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("ground set must have between 1 and {MAX_GROUND} elements, got {0}")]
    BadGroundSize(usize),
    #[error("labels must be {expected} pairwise distinct strings")]
    BadLabels { expected: usize },
    #[error("a matroid needs at least one basis")]
    EmptyBases,
    #[error("basis {0} is not a subset of the ground set")]
    BasisOutsideGround(Subset),
    #[error("bases {0} and {1} have different sizes")]
    UnequalBasisSizes(Subset, Subset),
    #[error("basis exchange fails for {b1} and {b2} at element {element}")]
    ExchangeAxiomViolation { b1: Subset, b2: Subset, element: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("matroid has loops {0}; its characteristic polynomial is zero")]
    HasLoops(Subset),
    #[error("element {0} is a loop")]
    LoopElement(usize),
    #[error("element {0} is not in the ground set")]
    UnknownElement(usize),
    #[error("reduced characteristic polynomial is undefined for rank 0")]
    RankZero,
    #[error("internal: characteristic polynomial not divisible by t - 1")]
    DivisibilityFailure,
    #[error("internal: reduced characteristic polynomial depends on the chosen element ({0} vs {1})")]
    ElementDependence(usize, usize),
    #[error("internal: lattice of flats fails {0}")]
    InternalAxiomFailure(&'static str),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self, MatroidError> {
        if n == 0 || n > MAX_GROUND {
            return Err(MatroidError::BadGroundSize(n));
        }
        Ok(GroundSet { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, MatroidError> {
        let n = labels.len();
        let mut g = GroundSet::new(n)?;
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(MatroidError::BadLabels { expected: n });
        }
        g.labels = Some(labels);
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n)
    }
}

/// A matroid on `{0, .., n-1}` stored by its bases.
#[derive(Clone, Debug)]
pub struct Matroid {
    ground: GroundSet,
    bases: Vec<Subset>,
    rank: usize,
}

impl Matroid {
    /// Validates sizes and the basis exchange axiom exhaustively.
    pub fn from_bases(ground: GroundSet, bases: impl IntoIterator<Item = Subset>) -> Result<Self, MatroidError> {
        let set: BTreeSet<u64> = bases.into_iter().map(|b| b.0).collect();
        let mut bases: Vec<Subset> = set.into_iter().map(Subset).collect();
        if bases.is_empty() {
            return Err(MatroidError::EmptyBases);
        }
        let full = ground.full();
        if let Some(&b) = bases.iter().find(|b| !b.is_subset(full)) {
            return Err(MatroidError::BasisOutsideGround(b));
        }
        let rank = bases[0].len();
        if let Some(&b) = bases.iter().find(|b| b.len() != rank) {
            return Err(MatroidError::UnequalBasisSizes(bases[0], b));
        }
        bases.sort_by(|a, b| a.canonical_cmp(*b));
        let lookup: HashSet<Subset> = bases.iter().copied().collect();
        for &b1 in &bases {
            for &b2 in &bases {
                for x in b1.difference(b2).iter() {
                    let ok = b2
                        .difference(b1)
                        .iter()
                        .any(|y| lookup.contains(&b1.without(x).with(y)));
                    if !ok {
                        return Err(MatroidError::ExchangeAxiomViolation { b1, b2, element: x });
                    }
                }
            }
        }
        Ok(Matroid { ground, bases, rank })
    }

    /// `U_{r,n}`: every `r`-subset is a basis.
    pub fn uniform(r: usize, n: usize) -> Result<Self, MatroidError> {
        if r > n {
            return Err(MatroidError::InvalidParams(format!("uniform matroid needs r <= n, got r={r}, n={n}")));
        }
        let ground = GroundSet::new(n)?;
        Self::from_bases(ground, k_subsets(n, r))
    }

    /// Cycle matroid of a multigraph; ground set = edge indices.
    pub fn graphic(edges: &[(usize, usize)]) -> Result<Self, MatroidError> {
        if edges.is_empty() {
            return Err(MatroidError::InvalidParams("graph has no edges".into()));
        }
        let ground = GroundSet::new(edges.len())?;
        let vertices = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
        let rank = {
            let mut uf = UnionFind::new(vertices);
            edges.iter().filter(|&&(u, v)| uf.union(u, v)).count()
        };
        let bases: Vec<Subset> = k_subsets(edges.len(), rank)
            .filter(|s| {
                let mut uf = UnionFind::new(vertices);
                s.iter().all(|e| uf.union(edges[e].0, edges[e].1))
            })
            .collect();
        Self::from_bases(ground, bases)
    }

    /// The Fano plane on `{0, .., 6}`.
    pub fn fano() -> Self {
        let lines: Vec<Subset> = FANO_LINES.iter().map(|l| Subset::from_elems(l.iter().copied())).collect();
        let bases = k_subsets(7, 3).filter(|s| !lines.contains(s));
        Self::from_bases(GroundSet::new(7).unwrap(), bases).expect("Fano bases satisfy exchange")
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn ground_size(&self) -> usize {
        self.ground.n
    }

    pub fn bases(&self) -> &[Subset] {
        &self.bases
    }

    /// Rank of the whole matroid.
    pub fn full_rank(&self) -> usize {
        self.rank
    }

    pub fn rank(&self, s: Subset) -> usize {
        self.bases.iter().map(|b| b.intersection(s).len()).max().unwrap_or(0)
    }

    pub fn closure(&self, s: Subset) -> Subset {
        let r = self.rank(s);
        (0..self.ground.n)
            .filter(|&e| !s.contains(e))
            .fold(s, |acc, e| if self.rank(s.with(e)) == r { acc.with(e) } else { acc })
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank(Subset::singleton(e)) == 0
    }

    pub fn loops(&self) -> Subset {
        self.closure(Subset::EMPTY)
    }

    /// All flats, generated upward from `cl(∅)` by single-element closures.
    pub fn flats(&self) -> Vec<Subset> {
        let bottom = self.closure(Subset::EMPTY);
        let mut seen: HashSet<Subset> = HashSet::from([bottom]);
        let mut frontier = vec![bottom];
        while let Some(f) = frontier.pop() {
            for e in self.ground.full().difference(f).iter() {
                let g = self.closure(f.with(e));
                if seen.insert(g) {
                    frontier.push(g);
                }
            }
        }
        let mut flats: Vec<Subset> = seen.into_iter().collect();
        flats.sort_by(|a, b| a.canonical_cmp(*b));
        flats
    }

    pub fn flats_lattice(&self) -> Result<FlatLattice, MatroidError> {
        FlatLattice::new(self)
    }

    /// `χ(t) = Σ_F μ(cl ∅, F) t^{r(F,E)}`.
    pub fn characteristic_polynomial(&self) -> Result<UniPoly, MatroidError> {
        let loops = self.loops();
        if !loops.is_empty() {
            return Err(MatroidError::HasLoops(loops));
        }
        let lat = self.flats_lattice()?;
        Ok(lat.characteristic_polynomial())
    }

    /// `χ̄(t) = Σ_{F ∌ i} μ(∅,F) t^{d(F,E)}`, checked against `χ/(t-1)` and
    /// against every other non-loop choice of `i`.
    pub fn reduced_characteristic_polynomial(&self, i: usize) -> Result<UniPoly, MatroidError> {
        if i >= self.ground.n {
            return Err(MatroidError::UnknownElement(i));
        }
        if self.is_loop(i) {
            return Err(MatroidError::LoopElement(i));
        }
        let loops = self.loops();
        if !loops.is_empty() {
            return Err(MatroidError::HasLoops(loops));
        }
        if self.rank == 0 {
            return Err(MatroidError::RankZero);
        }
        let lat = self.flats_lattice()?;
        let reduced = lat.reduced_characteristic_polynomial(i);
        let chi = lat.characteristic_polynomial();
        if &reduced * &UniPoly::t_minus_one() != chi {
            return Err(MatroidError::DivisibilityFailure);
        }
        for j in 0..self.ground.n {
            if j != i && lat.reduced_characteristic_polynomial(j) != reduced {
                return Err(MatroidError::ElementDependence(i, j));
            }
        }
        Ok(reduced)
    }
}

const FANO_LINES: [[usize; 3]; 7] = [
    [0, 1, 2],
    [0, 3, 4],
    [0, 5, 6],
    [1, 3, 5],
    [1, 4, 6],
    [2, 3, 6],
    [2, 4, 5],
];

/// All `k`-subsets of `{0, .., n-1}` in increasing bit order (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Subset> {
    let limit: u128 = 1u128 << n;
    let mut cur: Option<u128> = if k > n { None } else { Some((1u128 << k) - 1) };
    std::iter::from_fn(move || {
        let x = cur?;
        if x >= limit {
            cur = None;
            return None;
        }
        cur = if x == 0 {
            None
        } else {
            let c = x & x.wrapping_neg();
            let r = x + c;
            Some((((r ^ x) >> 2) / c) | r)
        };
        Some(Subset(x as u64))
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    /// False if `u` and `v` were already connected.
    fn union(&mut self, u: usize, v: usize) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

/// The lattice of flats with its Möbius table.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    poset: GradedSubposet,
    mobius: MobiusTable,
    bottom: usize,
    top: usize,
}

impl FlatLattice {
    fn new(m: &Matroid) -> Result<Self, MatroidError> {
        let poset = GradedSubposet::from_sets(m.ground_size(), m.flats())?;
        let bottom = poset.bottom().ok_or(MatroidError::InternalAxiomFailure("unique bottom"))?;
        let top = poset.top().ok_or(MatroidError::InternalAxiomFailure("unique top"))?;
        if poset.element(top) != m.ground.full() {
            return Err(MatroidError::InternalAxiomFailure("(F1)"));
        }
        if !poset.satisfies_flat_axioms(bottom, top) {
            return Err(MatroidError::InternalAxiomFailure("(F2)/(F3)"));
        }
        if !poset.is_semimodular() {
            return Err(MatroidError::InternalAxiomFailure("semimodularity"));
        }
        if poset.rank(bottom, top) != Some(m.rank as u32) {
            return Err(MatroidError::InternalAxiomFailure("rank"));
        }
        let mobius = poset.mobius();
        Ok(FlatLattice {
            poset,
            mobius,
            bottom,
            top,
        })
    }

    pub fn poset(&self) -> &GradedSubposet {
        &self.poset
    }

    pub fn mobius(&self) -> &MobiusTable {
        &self.mobius
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn characteristic_polynomial(&self) -> UniPoly {
        self.mobius_sum(|_| true, 0)
    }

    pub(crate) fn reduced_characteristic_polynomial(&self, i: usize) -> UniPoly {
        self.mobius_sum(|f| !f.contains(i), 1)
    }

    // Σ μ(bottom, F) t^{r(F,top) - shift} over flats F passing `keep`.
    fn mobius_sum(&self, keep: impl Fn(Subset) -> bool, shift: u32) -> UniPoly {
        let r = self.poset.rank(self.bottom, self.top).unwrap() as usize;
        let mut coeffs = vec![Q::zero(); r + 1];
        for f in 0..self.poset.len() {
            if !keep(self.poset.element(f)) {
                continue;
            }
            let Some(exp) = self.poset.rank(f, self.top).and_then(|e| e.checked_sub(shift)) else {
                continue;
            };
            coeffs[exp as usize] += Q::from_integer(self.mobius.get(self.bottom, f).into());
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Deref for FlatLattice {
    type Target = GradedSubposet;

    fn deref(&self) -> &GradedSubposet {
        &self.poset
    }
}

/// Matroid input file, with 0-based elements.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum MatroidSpec {
    Constructor(Constructor),
    Bases {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        bases: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Constructor {
    Uniform { r: usize, n: usize },
    Graphic { edges: Vec<(usize, usize)> },
    Fano,
}

impl MatroidSpec {
    pub fn build(&self) -> Result<Matroid, MatroidError> {
        match self {
            MatroidSpec::Constructor(Constructor::Uniform { r, n }) => Matroid::uniform(*r, *n),
            MatroidSpec::Constructor(Constructor::Graphic { edges }) => Matroid::graphic(edges),
            MatroidSpec::Constructor(Constructor::Fano) => Ok(Matroid::fano()),
            MatroidSpec::Bases { n, labels, bases } => {
                let ground = match labels {
                    Some(l) => {
                        if l.len() != *n {
                            return Err(MatroidError::BadLabels { expected: *n });
                        }
                        GroundSet::with_labels(l.clone())?
                    }
                    None => GroundSet::new(*n)?,
                };
                let mut sets = Vec::with_capacity(bases.len());
                for b in bases {
                    if let Some(&e) = b.iter().find(|&&e| e >= *n) {
                        return Err(MatroidError::UnknownElement(e));
                    }
                    sets.push(Subset::from_elems(b.iter().copied()));
                }
                Matroid::from_bases(ground, sets)
            }
        }
    }
}
