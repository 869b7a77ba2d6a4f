//! Graded sub-posets of a Boolean lattice, ordered by inclusion.
//!
//! Elements are kept in canonical order (cardinality, then lexicographic),
//! which is a linear extension of inclusion; every table below is indexed by
//! positions in that order.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::subset::{Subset, MAX_GROUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has no elements")]
    Empty,
    #[error("ground set size {0} is outside 1..={MAX_GROUND}")]
    GroundSize(usize),
    #[error("element {0} is not a subset of the ground set")]
    OutsideGround(Subset),
    #[error("element {0} listed twice")]
    Duplicate(Subset),
    #[error("interval [{lo}, {hi}] is not graded: maximal chains of lengths {shortest} and {longest}")]
    NotGraded {
        lo: Subset,
        hi: Subset,
        shortest: u32,
        longest: u32,
    },
    #[error("{0} is not an element of the poset")]
    NotAnElement(Subset),
    #[error("{lo} < {hi} does not hold in the poset")]
    NotAnInterval { lo: Subset, hi: Subset },
    #[error("Weisner hypothesis violated: need x ≺ a < y")]
    HypothesisViolation,
}

/// A sub-poset of the Boolean lattice on `{0, .., n-1}` in which every
/// closed interval is graded.
#[derive(Clone, Debug)]
pub struct GradedSubposet {
    ground: usize,
    elements: Vec<Subset>,
    index: HashMap<Subset, usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    // rank[a][b] = length of every maximal chain from a to b, u32::MAX if a ≰ b.
    rank: Vec<Vec<u32>>,
}

const INCOMPARABLE: u32 = u32::MAX;

impl GradedSubposet {
    pub fn from_sets(ground: usize, sets: impl IntoIterator<Item = Subset>) -> Result<Self, PosetError> {
        if ground == 0 || ground > MAX_GROUND {
            return Err(PosetError::GroundSize(ground));
        }
        let full = Subset::full(ground);
        let mut elements: Vec<Subset> = sets.into_iter().collect();
        if elements.is_empty() {
            return Err(PosetError::Empty);
        }
        if let Some(&s) = elements.iter().find(|s| !s.is_subset(full)) {
            return Err(PosetError::OutsideGround(s));
        }
        elements.sort_by(|a, b| a.canonical_cmp(*b));
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(PosetError::Duplicate(w[0]));
        }
        let n = elements.len();
        let index: HashMap<Subset, usize> = elements.iter().enumerate().map(|(i, &s)| (s, i)).collect();

        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for a in 0..n {
            let above: Vec<usize> = (a + 1..n)
                .filter(|&b| elements[a].is_proper_subset(elements[b]))
                .collect();
            for &b in &above {
                let covered = !above
                    .iter()
                    .any(|&c| c != b && elements[c].is_proper_subset(elements[b]));
                if covered {
                    up[a].push(b);
                    down[b].push(a);
                }
            }
        }

        let mut rank = vec![vec![INCOMPARABLE; n]; n];
        for a in 0..n {
            let mut shortest = vec![INCOMPARABLE; n];
            let mut longest = vec![0u32; n];
            shortest[a] = 0;
            for b in a..n {
                if shortest[b] == INCOMPARABLE {
                    continue;
                }
                for &c in &up[b] {
                    shortest[c] = shortest[c].min(shortest[b] + 1);
                    longest[c] = longest[c].max(longest[b] + 1);
                }
            }
            for b in a..n {
                if shortest[b] == INCOMPARABLE {
                    continue;
                }
                if shortest[b] != longest[b] {
                    return Err(PosetError::NotGraded {
                        lo: elements[a],
                        hi: elements[b],
                        shortest: shortest[b],
                        longest: longest[b],
                    });
                }
                rank[a][b] = shortest[b];
            }
        }

        Ok(GradedSubposet {
            ground,
            elements,
            index,
            up,
            down,
            rank,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Subset] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> Subset {
        self.elements[i]
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn require(&self, s: Subset) -> Result<usize, PosetError> {
        self.index_of(s).ok_or(PosetError::NotAnElement(s))
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[a].is_subset(self.elements[b])
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// `a ≺ b`.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(&b)
    }

    /// Elements covering `a`.
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    /// Elements covered by `b`.
    pub fn lower_covers(&self, b: usize) -> &[usize] {
        &self.down[b]
    }

    /// Rank `r(a,b)` of `[a,b]`, if `a ≤ b`.
    pub fn rank(&self, a: usize, b: usize) -> Option<u32> {
        let r = self.rank[a][b];
        (r != INCOMPARABLE).then_some(r)
    }

    /// `d(a,b) = r(a,b) - 1`, for `a < b`.
    pub fn d(&self, a: usize, b: usize) -> Option<usize> {
        match self.rank(a, b) {
            Some(r) if r >= 1 => Some(r as usize - 1),
            _ => None,
        }
    }

    /// Checks `lo < hi` and returns their indices.
    pub fn interval(&self, lo: Subset, hi: Subset) -> Result<(usize, usize), PosetError> {
        let a = self.require(lo)?;
        let b = self.require(hi)?;
        if !self.lt(a, b) {
            return Err(PosetError::NotAnInterval { lo, hi });
        }
        Ok((a, b))
    }

    /// `(a,b)_P` in canonical order.
    pub fn open_interval(&self, a: usize, b: usize) -> Vec<usize> {
        (a + 1..b).filter(|&c| self.lt(a, c) && self.lt(c, b)).collect()
    }

    /// `[a,b]_P` in canonical order.
    pub fn closed_interval(&self, a: usize, b: usize) -> Vec<usize> {
        (a..=b).filter(|&c| self.leq(a, c) && self.leq(c, b)).collect()
    }

    /// All pairs `a < b`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| (a + 1..self.len()).filter(move |&b| self.lt(a, b)).map(move |b| (a, b)))
    }

    /// `[lo,hi]_P` as a poset in its own right.
    pub fn restrict(&self, a: usize, b: usize) -> GradedSubposet {
        GradedSubposet::from_sets(self.ground, self.closed_interval(a, b).into_iter().map(|c| self.elements[c]))
            .expect("closed intervals of a graded poset are graded")
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq(a, b)))
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).rev().find(|&b| (0..self.len()).all(|a| self.leq(a, b)))
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len()).filter(|&c| self.leq(c, a) && self.leq(c, b)).collect();
        lower.iter().copied().find(|&m| lower.iter().all(|&c| self.leq(c, m)))
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len()).filter(|&c| self.leq(a, c) && self.leq(b, c)).collect();
        upper.iter().copied().find(|&j| upper.iter().all(|&c| self.leq(j, c)))
    }

    pub fn is_lattice(&self) -> bool {
        (0..self.len()).all(|a| (a..self.len()).all(|b| self.meet(a, b).is_some() && self.join(a, b).is_some()))
    }

    /// If `a` and `b` both cover `a ∧ b`, then `a ∨ b` covers both.
    /// Returns false for posets that are not lattices.
    pub fn is_semimodular(&self) -> bool {
        if !self.is_lattice() {
            return false;
        }
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let m = self.meet(a, b).unwrap();
                if self.covers(m, a) && self.covers(m, b) {
                    let j = self.join(a, b).unwrap();
                    if !(self.covers(a, j) && self.covers(b, j)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every `d(K,L) = 1` interval has each element of `L ∖ K` in equally
    /// many middle elements.
    pub fn is_balanced(&self) -> bool {
        self.strict_pairs().filter(|&(k, l)| self.d(k, l) == Some(1)).all(|(k, l)| {
            let gap = self.elements[l].difference(self.elements[k]);
            let mids = self.open_interval(k, l);
            let mut counts = gap.iter().map(|e| mids.iter().filter(|&&f| self.elements[f].contains(e)).count());
            let first = counts.next();
            counts.all(|c| Some(c) == first)
        })
    }

    /// Every `d(K,L) = 1` interval has `{A ∖ K}_{K ≺ A ≤ L}` partitioning `L ∖ K`.
    pub fn is_one_balanced(&self) -> bool {
        self.strict_pairs()
            .filter(|&(k, l)| self.d(k, l) == Some(1))
            .all(|(k, l)| {
                let blocks = self.up[k]
                    .iter()
                    .filter(|&&a| self.leq(a, l))
                    .map(|&a| self.elements[a].difference(self.elements[k]));
                partitions(blocks, self.elements[l].difference(self.elements[k]))
            })
    }

    /// First interval with `d ≥ 2` whose open part has a disconnected
    /// comparability graph.
    pub fn interval_connectivity_witness(&self) -> Option<(usize, usize)> {
        self.strict_pairs()
            .filter(|&(k, l)| self.d(k, l).is_some_and(|d| d >= 2))
            .find(|&(k, l)| !self.comparability_connected(&self.open_interval(k, l)))
    }

    pub fn is_interval_connected(&self) -> bool {
        self.interval_connectivity_witness().is_none()
    }

    pub(crate) fn comparability_connected(&self, nodes: &[usize]) -> bool {
        if nodes.is_empty() {
            return true;
        }
        let adjacency: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&x| {
                (0..nodes.len())
                    .filter(|&j| nodes[j] != x && (self.leq(x, nodes[j]) || self.leq(nodes[j], x)))
                    .collect()
            })
            .collect();
        let mut seen = vec![false; nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// (F1)–(F3) for `[a,b]_P`, with `b` playing the role of the ground set.
    pub fn satisfies_flat_axioms(&self, a: usize, b: usize) -> bool {
        let members = self.closed_interval(a, b);
        if !members.contains(&b) {
            return false;
        }
        let top = self.elements[b];
        // (F2)
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                let meet = self.elements[x].intersection(self.elements[y]);
                if !members.iter().any(|&m| self.elements[m] == meet) {
                    return false;
                }
            }
        }
        // (F3)
        members.iter().all(|&k| {
            let blocks = self.up[k]
                .iter()
                .filter(|&&c| self.leq(c, b))
                .map(|&c| self.elements[c].difference(self.elements[k]));
            partitions(blocks, top.difference(self.elements[k]))
        })
    }

    pub fn mobius(&self) -> MobiusTable {
        MobiusTable::new(self)
    }
}

fn partitions(blocks: impl Iterator<Item = Subset>, whole: Subset) -> bool {
    let mut covered = Subset::EMPTY;
    for block in blocks {
        if block.is_empty() || !block.intersection(covered).is_empty() {
            return false;
        }
        covered = covered.union(block);
    }
    covered == whole
}

/// `μ(a,b)` for all `a ≤ b`.
#[derive(Clone, Debug)]
pub struct MobiusTable {
    mu: Vec<Vec<i64>>,
}

impl MobiusTable {
    fn new(p: &GradedSubposet) -> Self {
        let n = p.len();
        let mut mu = vec![vec![0i64; n]; n];
        for a in 0..n {
            mu[a][a] = 1;
            for b in a + 1..n {
                if !p.lt(a, b) {
                    continue;
                }
                let s: i64 = (a..b).filter(|&c| p.leq(a, c) && p.lt(c, b)).map(|c| mu[a][c]).sum();
                mu[a][b] = -s;
            }
        }
        MobiusTable { mu }
    }

    /// `μ(a,b)`; zero when `a ≰ b`.
    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.mu[a][b]
    }
}

/// Weisner's identity at `x ≺ a < y`:
/// `μ(x,y) = −Σ μ(x,b)` over `x < b ≺ y` with `a ≰ b`.
pub fn weisner_check(p: &GradedSubposet, mu: &MobiusTable, x: usize, a: usize, y: usize) -> Result<bool, PosetError> {
    if !p.covers(x, a) || !p.lt(a, y) {
        return Err(PosetError::HypothesisViolation);
    }
    let rhs: i64 = p.down[y]
        .iter()
        .filter(|&&b| p.lt(x, b) && !p.leq(a, b))
        .map(|&b| mu.get(x, b))
        .sum();
    Ok(mu.get(x, y) == -rhs)
}
