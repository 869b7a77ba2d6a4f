//! Coordinates `y = (y_S)_{K ⊂ S ⊂ L}` on a Boolean interval, the modular
//! subspace, the strictly submodular cone and the projections between
//! nested intervals.
//!
//! Throughout, the endpoint coordinates are fixed at `y_K = y_L = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_q, parse_q, Q};
use crate::subset::Subset;

/// Largest supported `|L ∖ K|`.
pub const MAX_GAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("{lo} ⊂ {hi} is not a proper inclusion")]
    BadInterval { lo: Subset, hi: Subset },
    #[error("|L ∖ K| = {0} exceeds the limit of {MAX_GAP}")]
    TooLarge(usize),
    #[error("modular subspace is zero-dimensional when |L ∖ K| < 2")]
    TrivialInterval,
    #[error("vector is not strictly submodular: ({0}, {1}) violates the strict inequality")]
    NotInCone(Subset, Subset),
    #[error("internal: no positive modular shift found")]
    FeasibilityFailure,
    #[error("projection needs K ⊆ F ⊂ G ⊆ L, got F = {f}, G = {g}")]
    BadNesting { f: Subset, g: Subset },
    #[error("element {0} is not in L ∖ K")]
    ElementOutsideInterval(usize),
    #[error("vectors live on different intervals")]
    CoordsMismatch,
    #[error("no coordinate for {0}")]
    MissingCoordinate(Subset),
    #[error("bad interval vector: {0}")]
    Parse(String),
}

/// Indexing of the strict intermediate subsets of `[K, L]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalCoords {
    lo: Subset,
    hi: Subset,
    free: Vec<usize>,
    subsets: Vec<Subset>,
    // position by compressed mask of S ∖ K; usize::MAX at K and L
    position: Vec<usize>,
}

impl IntervalCoords {
    pub fn new(lo: Subset, hi: Subset) -> Result<Arc<Self>, ConeError> {
        if !lo.is_proper_subset(hi) {
            return Err(ConeError::BadInterval { lo, hi });
        }
        let free = hi.difference(lo).to_vec();
        if free.len() > MAX_GAP {
            return Err(ConeError::TooLarge(free.len()));
        }
        let gap = hi.difference(lo);
        let mut subsets: Vec<Subset> = gap
            .subsets()
            .filter(|s| !s.is_empty() && *s != gap)
            .map(|s| s.union(lo))
            .collect();
        subsets.sort_by(|a, b| a.canonical_cmp(*b));
        let mut position = vec![usize::MAX; 1 << free.len()];
        let mut coords = IntervalCoords {
            lo,
            hi,
            free,
            subsets: Vec::new(),
            position: Vec::new(),
        };
        for (i, &s) in subsets.iter().enumerate() {
            position[coords.compress(s)] = i;
        }
        coords.subsets = subsets;
        coords.position = position;
        Ok(Arc::new(coords))
    }

    pub fn lo(&self) -> Subset {
        self.lo
    }

    pub fn hi(&self) -> Subset {
        self.hi
    }

    /// Elements of `L ∖ K`, increasing.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// `m = 2^{|L∖K|} − 2`.
    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    fn compress(&self, s: Subset) -> usize {
        self.free
            .iter()
            .enumerate()
            .filter(|&(_, &e)| s.contains(e))
            .fold(0, |acc, (k, _)| acc | (1 << k))
    }

    /// Whether `K ⊆ s ⊆ L`.
    pub fn spans(&self, s: Subset) -> bool {
        self.lo.is_subset(s) && s.is_subset(self.hi)
    }

    /// Position of a strict intermediate subset.
    pub fn index_of(&self, s: Subset) -> Option<usize> {
        if !self.spans(s) {
            return None;
        }
        let p = self.position[self.compress(s)];
        (p != usize::MAX).then_some(p)
    }
}

/// A rational vector on `E_K^L`.
#[derive(Clone, PartialEq, Eq)]
pub struct IntervalVector {
    coords: Arc<IntervalCoords>,
    values: Vec<Q>,
}

impl fmt::Debug for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, v) in self.coords.subsets.iter().zip(&self.values) {
            m.entry(s, &format_q(v));
        }
        m.finish()
    }
}

impl IntervalVector {
    pub fn zero(coords: &Arc<IntervalCoords>) -> Self {
        IntervalVector {
            coords: coords.clone(),
            values: vec![Q::zero(); coords.dim()],
        }
    }

    pub fn from_fn(coords: &Arc<IntervalCoords>, f: impl Fn(Subset) -> Q) -> Self {
        IntervalVector {
            coords: coords.clone(),
            values: coords.subsets.iter().map(|&s| f(s)).collect(),
        }
    }

    pub fn coords(&self) -> &Arc<IntervalCoords> {
        &self.coords
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Value at `s`; zero at the endpoints. `None` outside `[K, L]`.
    pub fn get(&self, s: Subset) -> Option<Q> {
        if s == self.coords.lo || s == self.coords.hi {
            return Some(Q::zero());
        }
        self.coords.index_of(s).map(|i| self.values[i].clone())
    }

    pub(crate) fn at(&self, s: Subset) -> Q {
        self.get(s).expect("subset inside the interval")
    }

    pub fn set(&mut self, s: Subset, value: Q) -> Result<(), ConeError> {
        let i = self.coords.index_of(s).ok_or(ConeError::MissingCoordinate(s))?;
        self.values[i] = value;
        Ok(())
    }

    /// Values at a list of intermediate subsets (typically poset elements).
    pub fn restrict_to(&self, keys: &[Subset]) -> Result<Vec<Q>, ConeError> {
        keys.iter()
            .map(|&s| {
                self.coords
                    .index_of(s)
                    .map(|i| self.values[i].clone())
                    .ok_or(ConeError::MissingCoordinate(s))
            })
            .collect()
    }

    pub fn scale(&self, c: &Q) -> Self {
        IntervalVector {
            coords: self.coords.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(Signed::is_positive)
    }

    fn check_same(&self, other: &Self) -> Result<(), ConeError> {
        if self.coords == other.coords {
            Ok(())
        } else {
            Err(ConeError::CoordsMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ConeError> {
        self.check_same(other)?;
        Ok(IntervalVector {
            coords: self.coords.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ConeError> {
        self.check_same(other)?;
        Ok(IntervalVector {
            coords: self.coords.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }
}

impl Add for &IntervalVector {
    type Output = IntervalVector;

    /// Panics on mismatched intervals; see [`IntervalVector::try_add`].
    fn add(self, rhs: &IntervalVector) -> IntervalVector {
        self.try_add(rhs).expect("same interval")
    }
}

impl Sub for &IntervalVector {
    type Output = IntervalVector;

    fn sub(self, rhs: &IntervalVector) -> IntervalVector {
        self.try_sub(rhs).expect("same interval")
    }
}

/// Modular vector `y_S = Σ_{e ∈ S∖K} weight_e`; the weights are indexed
/// like [`IntervalCoords::free`] and should sum to zero.
pub fn modular_from_weights(coords: &Arc<IntervalCoords>, weights: &[Q]) -> IntervalVector {
    assert_eq!(weights.len(), coords.free.len());
    IntervalVector::from_fn(coords, |s| {
        coords
            .free
            .iter()
            .zip(weights)
            .filter(|(e, _)| s.contains(**e))
            .map(|(_, w)| w.clone())
            .sum()
    })
}

/// Basis of the modular subspace `M_K^L`.
#[derive(Clone, Debug)]
pub struct ModularBasis {
    pub vectors: Vec<IntervalVector>,
}

impl ModularBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `Σ c_k b_k`.
    pub fn combine(&self, coeffs: &[Q]) -> IntervalVector {
        assert_eq!(coeffs.len(), self.vectors.len());
        let coords = self.vectors[0].coords.clone();
        self.vectors
            .iter()
            .zip(coeffs)
            .fold(IntervalVector::zero(&coords), |acc, (v, c)| &acc + &v.scale(c))
    }
}

/// One vector per `k ≥ 2`: weight `+1` on the first free element, `−1` on
/// the `k`-th.
pub fn modular_basis(coords: &Arc<IntervalCoords>) -> Result<ModularBasis, ConeError> {
    let m = coords.free.len();
    if m < 2 {
        return Err(ConeError::TrivialInterval);
    }
    let vectors = (1..m)
        .map(|k| {
            let mut w = vec![Q::zero(); m];
            w[0] = Q::one();
            w[k] = -Q::one();
            modular_from_weights(coords, &w)
        })
        .collect();
    Ok(ModularBasis { vectors })
}

/// Every incomparable-pair gap `y_S + y_T − y_{S∩T} − y_{S∪T}` is a sum of
/// diamond gaps `y_{A+i} + y_{A+j} − y_A − y_{A+i+j}` (with `i, j ∉ A`), so
/// sign conditions on all pairs reduce to the diamonds, and the least gap
/// is attained on one.
fn diamond_gaps(y: &IntervalVector, mut visit: impl FnMut(Q, Subset, Subset) -> bool) {
    let c = &y.coords;
    let m = c.free.len();
    let full = (1usize << m) - 1;
    let zero = Q::zero();
    let value = |mask: usize| -> &Q {
        if mask == 0 || mask == full {
            &zero
        } else {
            &y.values[c.position[mask]]
        }
    };
    let expand = |mask: usize| {
        Subset::from_elems((0..m).filter(|k| mask & (1 << k) != 0).map(|k| c.free[k])).union(c.lo)
    };
    for a in 0..=full {
        for i in 0..m {
            if a & (1 << i) != 0 {
                continue;
            }
            for j in i + 1..m {
                if a & (1 << j) != 0 {
                    continue;
                }
                let (ai, aj) = (a | (1 << i), a | (1 << j));
                let gap = value(ai) + value(aj) - value(a) - value(ai | aj);
                if !visit(gap, expand(ai), expand(aj)) {
                    return;
                }
            }
        }
    }
}

fn first_pair_failing(y: &IntervalVector, accept: impl Fn(&Q) -> bool) -> Option<(Subset, Subset)> {
    let mut found = None;
    diamond_gaps(y, |gap, s, t| {
        if accept(&gap) {
            true
        } else {
            found = Some((s, t));
            false
        }
    });
    found
}

/// Smallest gap over incomparable pairs, with a pair attaining it; `None`
/// when every pair is comparable.
pub fn min_submodular_gap(y: &IntervalVector) -> Option<(Q, Subset, Subset)> {
    let mut best: Option<(Q, Subset, Subset)> = None;
    diamond_gaps(y, |gap, s, t| {
        if best.as_ref().is_none_or(|(b, _, _)| gap < *b) {
            best = Some((gap, s, t));
        }
        true
    });
    best
}

/// Strict submodularity on every incomparable pair.
pub fn is_strictly_submodular(y: &IntervalVector) -> bool {
    strict_submodularity_witness(y).is_none()
}

pub fn strict_submodularity_witness(y: &IntervalVector) -> Option<(Subset, Subset)> {
    first_pair_failing(y, Signed::is_positive)
}

pub fn is_submodular(y: &IntervalVector) -> bool {
    first_pair_failing(y, |g| !g.is_negative()).is_none()
}

/// Equality `y_S + y_T = y_{S∩T} + y_{S∪T}` on all pairs.
pub fn is_modular(y: &IntervalVector) -> bool {
    // Comparable pairs satisfy the identity trivially.
    first_pair_failing(y, Zero::is_zero).is_none()
}

/// `v_S = |S∖K| · |L∖S|`, a strictly submodular point with positive entries.
pub fn interior_point(coords: &Arc<IntervalCoords>) -> IntervalVector {
    let (lo, hi) = (coords.lo, coords.hi);
    IntervalVector::from_fn(coords, |s| {
        Q::from_integer((s.difference(lo).len() * hi.difference(s).len()).into())
    })
}

/// Output of [`effective_decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Modular vector with `y + w` positive.
    pub shift: IntervalVector,
    /// Multiple of the interior point removed before the greedy step; zero
    /// when `y` was already positive.
    pub epsilon: Q,
}

/// Writes a cone point as positive point plus modular vector.
///
/// `z = y − εv` stays submodular for `ε = 2^{-k}` small enough. A vertex
/// `x` of the base polyhedron of `z` (Edmonds' greedy order) satisfies
/// `x(S) ≤ z(S)` with `x(L∖K) = 0`, so `w_S = −x(S∖K)` is modular with
/// `z + w ≥ 0`, and then `y + w = z + w + εv > 0`.
pub fn effective_decompose(y: &IntervalVector) -> Result<Decomposition, ConeError> {
    if let Some((s, t)) = strict_submodularity_witness(y) {
        return Err(ConeError::NotInCone(s, t));
    }
    let coords = y.coords.clone();
    if y.is_positive() {
        return Ok(Decomposition {
            shift: IntervalVector::zero(&coords),
            epsilon: Q::zero(),
        });
    }
    let v = interior_point(&coords);
    let half = Q::new(1.into(), 2.into());
    let mut epsilon = Q::one();
    let mut z = y - &v;
    let mut halvings = 0;
    while !is_submodular(&z) {
        halvings += 1;
        if halvings > 256 {
            return Err(ConeError::FeasibilityFailure);
        }
        epsilon *= &half;
        z = y - &v.scale(&epsilon);
    }

    let (lo, hi) = (coords.lo, coords.hi);
    let mut prefix = lo;
    let mut previous = Q::zero();
    let mut weights = Vec::with_capacity(coords.free.len());
    for &e in &coords.free {
        prefix = prefix.with(e);
        let current = if prefix == hi { Q::zero() } else { z.at(prefix) };
        weights.push(-(&current - &previous));
        previous = current;
    }
    let shift = modular_from_weights(&coords, &weights);
    if !(y + &shift).is_positive() {
        return Err(ConeError::FeasibilityFailure);
    }
    Ok(Decomposition { shift, epsilon })
}

/// `π_F^G(t)_S = t_S − t_G |S∖F|/|G∖F| − t_F |G∖S|/|G∖F|`.
pub fn project(t: &IntervalVector, f: Subset, g: Subset) -> Result<IntervalVector, ConeError> {
    let c = &t.coords;
    if !(c.lo.is_subset(f) && f.is_proper_subset(g) && g.is_subset(c.hi)) {
        return Err(ConeError::BadNesting { f, g });
    }
    let target = IntervalCoords::new(f, g)?;
    let width = Q::from_integer(g.difference(f).len().into());
    let (tf, tg) = (t.at(f), t.at(g));
    Ok(IntervalVector::from_fn(&target, |s| {
        let above = Q::from_integer(s.difference(f).len().into()) / &width;
        let below = Q::from_integer(g.difference(s).len().into()) / &width;
        t.at(s) - &tg * above - &tf * below
    }))
}

/// `α_S = |S∖K| / |L∖K|`.
pub fn alpha(coords: &Arc<IntervalCoords>) -> IntervalVector {
    let width = Q::from_integer(coords.free.len().into());
    IntervalVector::from_fn(coords, |s| Q::from_integer(s.difference(coords.lo).len().into()) / &width)
}

/// `β_S = |L∖S| / |L∖K|`.
pub fn beta(coords: &Arc<IntervalCoords>) -> IntervalVector {
    let width = Q::from_integer(coords.free.len().into());
    IntervalVector::from_fn(coords, |s| Q::from_integer(coords.hi.difference(s).len().into()) / &width)
}

/// Indicator of `i ∈ S`.
pub fn alpha_i(coords: &Arc<IntervalCoords>, i: usize) -> Result<IntervalVector, ConeError> {
    indicator(coords, i, true)
}

/// Indicator of `i ∉ S`.
pub fn beta_i(coords: &Arc<IntervalCoords>, i: usize) -> Result<IntervalVector, ConeError> {
    indicator(coords, i, false)
}

fn indicator(coords: &Arc<IntervalCoords>, i: usize, inside: bool) -> Result<IntervalVector, ConeError> {
    if !coords.free.contains(&i) {
        return Err(ConeError::ElementOutsideInterval(i));
    }
    Ok(IntervalVector::from_fn(coords, |s| {
        if s.contains(i) == inside {
            Q::one()
        } else {
            Q::zero()
        }
    }))
}

/// File form: `{"K":[..],"L":[..],"values":{"[0,2]":"1/3",..}}`; omitted
/// subsets are zero.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IntervalVectorJson {
    #[serde(rename = "K")]
    pub lo: Subset,
    #[serde(rename = "L")]
    pub hi: Subset,
    pub values: BTreeMap<String, String>,
}

impl From<&IntervalVector> for IntervalVectorJson {
    fn from(v: &IntervalVector) -> Self {
        let values = v
            .coords
            .subsets
            .iter()
            .zip(&v.values)
            .filter(|(_, x)| !x.is_zero())
            .map(|(s, x)| (serde_json::to_string(s).unwrap(), format_q(x)))
            .collect();
        IntervalVectorJson {
            lo: v.coords.lo,
            hi: v.coords.hi,
            values,
        }
    }
}

impl IntervalVectorJson {
    pub fn to_vector(&self) -> Result<IntervalVector, ConeError> {
        let coords = IntervalCoords::new(self.lo, self.hi)?;
        let mut v = IntervalVector::zero(&coords);
        for (key, value) in &self.values {
            let s: Subset = serde_json::from_str(key).map_err(|e| ConeError::Parse(format!("key {key:?}: {e}")))?;
            let x = parse_q(value).ok_or_else(|| ConeError::Parse(format!("value {value:?}")))?;
            v.set(s, x)?;
        }
        Ok(v)
    }
}
