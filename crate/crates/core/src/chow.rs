//! The graded ring `A_K^L`: generators `x_F` for the open flats of an
//! interval, with `x_F x_G = 0` for incomparable `F, G` and the linear forms
//! `Σ_{F∋i} x_F − Σ_{F∋j} x_F`. Each graded piece is computed by exact row
//! reduction in the basis of chain monomials (all other monomials vanish).

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pol::{PolCache, PolError};
use crate::poly::{set_vars, Monomial, MultiPoly, Vars};
use crate::poset::GradedSubposet;
use crate::rational::{factorial, format_q, Q};
use crate::sampling::rng_from_seed;
use crate::subset::Subset;

pub const MAX_OPEN_FLATS: usize = 16;
pub const MAX_CHOW_DEGREE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChowError {
    #[error(transparent)]
    Pol(#[from] PolError),
    #[error("indices {0} < {1} do not form an interval of the poset")]
    NotAnInterval(usize, usize),
    #[error("interval has {open} open elements and d = {d}; limits are {MAX_OPEN_FLATS} and {MAX_CHOW_DEGREE}")]
    SizeLimitExceeded { open: usize, d: usize },
    #[error("top graded piece has dimension {0}, expected 1")]
    TopDegreeNotOneDimensional(usize),
    #[error("flags {0} and {1} have different degrees")]
    FlagInconsistency(String, String),
    #[error("monomial has degree {got}, expected {expected}")]
    WrongDegree { expected: usize, got: usize },
}

/// One graded piece.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    /// Chain monomials of this degree, as exponent vectors.
    pub monomials: Vec<Vec<u16>>,
    /// Reduced row echelon form of the relation span.
    pub relations: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.monomials.len() - self.pivots.len()
    }

    /// Monomial indices forming a basis of the quotient.
    pub fn basis(&self) -> Vec<usize> {
        (0..self.monomials.len()).filter(|c| !self.pivots.contains(c)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ChowRing {
    lo: Subset,
    hi: Subset,
    d: usize,
    vars: Vars,
    // comparable[i][j] over open elements
    comparable: Vec<Vec<bool>>,
    pieces: Vec<GradedPiece>,
    index: HashMap<Vec<u16>, usize>,
    // degree of each top-degree chain monomial
    top_degrees: Vec<Q>,
}

fn check_size(open: usize, d: usize) -> Result<(), ChowError> {
    if open > MAX_OPEN_FLATS || d > MAX_CHOW_DEGREE {
        return Err(ChowError::SizeLimitExceeded { open, d });
    }
    Ok(())
}

pub fn build_chow(p: &GradedSubposet, a: usize, b: usize) -> Result<ChowRing, ChowError> {
    let d = p.d(a, b).ok_or(ChowError::NotAnInterval(a, b))?;
    let open = p.open_interval(a, b);
    check_size(open.len(), d)?;
    let (lo, hi) = (p.element(a), p.element(b));
    let n = open.len();
    let comparable: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| p.leq(open[i], open[j]) || p.leq(open[j], open[i])).collect())
        .collect();
    // Σ_{F∋i} x_F − Σ_{F∋j} x_F for a fixed i and every other j.
    let gap = hi.difference(lo).to_vec();
    let linear: Vec<Vec<Q>> = gap[1..]
        .iter()
        .map(|&j| {
            open.iter()
                .map(|&f| {
                    let s = p.element(f);
                    match (s.contains(gap[0]), s.contains(j)) {
                        (true, false) => Q::one(),
                        (false, true) => -Q::one(),
                        _ => Q::zero(),
                    }
                })
                .collect()
        })
        .collect();

    let mut pieces: Vec<GradedPiece> = Vec::with_capacity(d + 1);
    let mut all_index = HashMap::new();
    for k in 0..=d {
        let monomials = chain_monomials(&comparable, k);
        let index: HashMap<Vec<u16>, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        if k >= 1 {
            for m in &pieces[k - 1].monomials {
                for form in &linear {
                    let mut row = vec![Q::zero(); monomials.len()];
                    let mut any = false;
                    for (v, c) in form.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut e = m.clone();
                        e[v] += 1;
                        if let Some(&col) = index.get(&e) {
                            row[col] += c;
                            any = true;
                        }
                    }
                    if any {
                        rows.push(row);
                    }
                }
            }
        }
        let (relations, pivots) = row_reduce(rows, monomials.len());
        if k == d {
            for (m, i) in &index {
                all_index.insert(m.clone(), *i);
            }
        }
        pieces.push(GradedPiece {
            monomials,
            relations,
            pivots,
        });
    }

    let top = &pieces[d];
    if top.dim() != 1 {
        return Err(ChowError::TopDegreeNotOneDimensional(top.dim()));
    }
    // The degree functional vanishes on the relation rows: the kernel of
    // the reduced matrix, spanned by its single free column.
    let free = top.basis()[0];
    let mut functional = vec![Q::zero(); top.monomials.len()];
    functional[free] = Q::one();
    for (row, &piv) in top.relations.iter().zip(&top.pivots) {
        functional[piv] = -row[free].clone();
    }
    let flags = flag_monomials(p, &open, a, b);
    let first = &flags[0];
    let scale = functional[all_index[first]].clone();
    if scale.is_zero() {
        return Err(ChowError::TopDegreeNotOneDimensional(0));
    }
    let top_degrees: Vec<Q> = functional.iter().map(|x| x / &scale).collect();
    for f in &flags[1..] {
        if !top_degrees[all_index[f]].is_one() {
            return Err(ChowError::FlagInconsistency(
                describe(&open, p, first),
                describe(&open, p, f),
            ));
        }
    }
    Ok(ChowRing {
        lo,
        hi,
        d,
        vars: set_vars(open.iter().map(|&f| p.element(f))),
        comparable,
        pieces,
        index: all_index,
        top_degrees,
    })
}

fn describe(open: &[usize], p: &GradedSubposet, m: &[u16]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let s = p.element(open[i]);
            if e == 1 {
                format!("x_{s}")
            } else {
                format!("x_{s}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Monomials of degree `k` whose support is pairwise comparable.
fn chain_monomials(comparable: &[Vec<bool>], k: usize) -> Vec<Vec<u16>> {
    fn go(comparable: &[Vec<bool>], v: usize, left: usize, cur: &mut Vec<u16>, support: &mut Vec<usize>, out: &mut Vec<Vec<u16>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if v == cur.len() {
            return;
        }
        go(comparable, v + 1, left, cur, support, out);
        if support.iter().all(|&u| comparable[u][v]) {
            support.push(v);
            for e in 1..=left {
                cur[v] = e as u16;
                go(comparable, v + 1, left - e, cur, support, out);
            }
            cur[v] = 0;
            support.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u16; comparable.len()];
    go(comparable, 0, k, &mut cur, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Products `x_{F_1} ⋯ x_{F_d}` over maximal chains `a ≺ F_1 ≺ ⋯ ≺ F_d ≺ b`.
fn flag_monomials(p: &GradedSubposet, open: &[usize], a: usize, b: usize) -> Vec<Vec<u16>> {
    let pos: HashMap<usize, usize> = open.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut out = Vec::new();
    let mut stack = vec![(a, vec![0u16; open.len()])];
    while let Some((x, m)) = stack.pop() {
        if p.covers(x, b) {
            out.push(m);
            continue;
        }
        for &y in p.upper_covers(x) {
            if let Some(&i) = pos.get(&y) {
                if p.lt(y, b) {
                    let mut next = m.clone();
                    next[i] += 1;
                    stack.push((y, next));
                }
            }
        }
    }
    if out.is_empty() {
        out.push(vec![0u16; open.len()]);
    }
    out.sort();
    out
}

/// Reduced row echelon form with pivot columns.
fn row_reduce(mut rows: Vec<Vec<Q>>, ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

impl ChowRing {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        self.pieces.iter().map(GradedPiece::dim).collect()
    }

    pub fn piece(&self, k: usize) -> &GradedPiece {
        &self.pieces[k]
    }

    pub fn is_chain(&self, exps: &[u16]) -> bool {
        let support: Vec<usize> = (0..exps.len()).filter(|&i| exps[i] > 0).collect();
        support
            .iter()
            .enumerate()
            .all(|(k, &u)| support[k + 1..].iter().all(|&v| self.comparable[u][v]))
    }

    /// Class of a degree-`k` monomial in the quotient basis of that piece.
    pub fn reduce(&self, exps: &[u16]) -> Vec<(usize, Q)> {
        let k: usize = exps.iter().map(|&e| e as usize).sum();
        let piece = &self.pieces[k];
        let Some(col) = piece.monomials.iter().position(|m| m == exps) else {
            return Vec::new();
        };
        match piece.pivots.iter().position(|&c| c == col) {
            None => vec![(col, Q::one())],
            Some(r) => piece
                .basis()
                .into_iter()
                .filter(|&j| !piece.relations[r][j].is_zero())
                .map(|j| (j, -piece.relations[r][j].clone()))
                .collect(),
        }
    }

    /// `deg(x^a)` for `|a| = d`.
    pub fn degree(&self, exps: &[u16]) -> Result<Q, ChowError> {
        let k: usize = exps.iter().map(|&e| e as usize).sum();
        if k != self.d {
            return Err(ChowError::WrongDegree {
                expected: self.d,
                got: k,
            });
        }
        Ok(self.index.get(exps).map_or_else(Q::zero, |&i| self.top_degrees[i].clone()))
    }

    /// `(1/d!) deg((Σ x_F t_F)^d) = Σ_a deg(x^a) t^a / a!`.
    pub fn volume_polynomial(&self) -> MultiPoly {
        let mut vol = MultiPoly::zero(&self.vars);
        for (m, &i) in &self.index {
            let deg = &self.top_degrees[i];
            if deg.is_zero() {
                continue;
            }
            let denom: num_bigint::BigInt = m.iter().map(|&e| factorial(e as usize)).product();
            vol.add_term(Monomial(m.clone().into_boxed_slice()), deg / Q::from_integer(denom));
        }
        vol
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "K")]
    pub lo: Subset,
    #[serde(rename = "L")]
    pub hi: Subset,
    pub d: usize,
    pub graded_dims: Vec<usize>,
    pub equal: bool,
    pub witness: Option<String>,
}

/// `vol_a^b = pol_a^b` as polynomials, with the first differing term.
pub fn verify_vol_eq_pol(cache: &mut PolCache, a: usize, b: usize) -> Result<VerificationReport, ChowError> {
    let ring = build_chow(cache.poset(), a, b)?;
    let vol = ring.volume_polynomial();
    let pol = cache.pol(a, b)?;
    let diff = &vol - &pol;
    let witness = diff.canonical_terms().next().map(|(m, _)| {
        let single = MultiPoly::from_terms(vol.vars(), [(m.exps().to_vec(), Q::one())]);
        format!(
            "{single}: vol has {}, pol has {}",
            format_q(&vol.coeff(m.exps())),
            format_q(&pol.coeff(m.exps()))
        )
    });
    Ok(VerificationReport {
        lo: ring.lo,
        hi: ring.hi,
        d: ring.d,
        graded_dims: ring.graded_dims(),
        equal: witness.is_none(),
        witness,
    })
}

/// Size of the largest guarded quantity, for callers that want to skip
/// rather than fail.
pub fn within_limits(p: &GradedSubposet, a: usize, b: usize) -> bool {
    p.d(a, b)
        .is_some_and(|d| check_size(p.open_interval(a, b).len(), d).is_ok())
}

/// `deg_{K,L}(ξ x_F η) = deg_{K,F}(ξ) · deg_{F,L}(η)` for the flag pair and
/// `samples` random monomial pairs.
pub fn tensor_degree_check(
    p: &GradedSubposet,
    k: usize,
    f: usize,
    l: usize,
    samples: usize,
    seed: u64,
) -> Result<bool, ChowError> {
    if !(p.lt(k, f) && p.lt(f, l)) {
        return Err(ChowError::NotAnInterval(k, l));
    }
    let whole = build_chow(p, k, l)?;
    let below = build_chow(p, k, f)?;
    let above = build_chow(p, f, l)?;
    let open = p.open_interval(k, l);
    let lower = p.open_interval(k, f);
    let upper = p.open_interval(f, l);
    let pos = |x: usize| open.iter().position(|&y| y == x).expect("inside interval");
    let fpos = pos(f);

    let combine = |xi: &[u16], eta: &[u16]| {
        let mut m = vec![0u16; open.len()];
        for (i, &e) in xi.iter().enumerate() {
            m[pos(lower[i])] += e;
        }
        for (i, &e) in eta.iter().enumerate() {
            m[pos(upper[i])] += e;
        }
        m[fpos] += 1;
        m
    };

    let mut pairs = vec![(
        flag_monomials(p, &lower, k, f).swap_remove(0),
        flag_monomials(p, &upper, f, l).swap_remove(0),
    )];
    let mut rng = rng_from_seed(seed);
    let (dk, dl) = (below.d, above.d);
    for _ in 0..samples {
        pairs.push((random_monomial(&mut rng, lower.len(), dk), random_monomial(&mut rng, upper.len(), dl)));
    }
    for (xi, eta) in &pairs {
        let lhs = whole.degree(&combine(xi, eta))?;
        let rhs = below.degree(xi)? * above.degree(eta)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_monomial<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<u16> {
    let mut m = vec![0u16; n];
    if n == 0 {
        return m;
    }
    let vars: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        m[*vars.choose(rng).expect("nonempty")] += 1;
    }
    m
}
