//! Exact inertia, sampled C-Lorentzian certificates, orthant-Lorentzian
//! checks and the hypothesis ladder that drives the induction.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{min_submodular_gap, IntervalVector, IntervalVectorJson};
use crate::exec::Execution;
use crate::matrix::SymMatrix;
use crate::pol::{PolCache, PolError};
use crate::poly::{MultiPoly, PolyError, Var};
use crate::rational::{format_q, sign, Q};
use crate::sampling::direction_tuples;
use crate::subset::Subset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LorentzError {
    #[error(transparent)]
    Pol(#[from] PolError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("sample {sample}, direction {direction}: not strictly submodular at ({s}, {t})")]
    DirectionNotInCone {
        sample: usize,
        direction: usize,
        s: Subset,
        t: Subset,
    },
    #[error("sample {sample}, direction {direction}: lives on [{lo}, {hi}], expected [{want_lo}, {want_hi}]")]
    WrongInterval {
        sample: usize,
        direction: usize,
        lo: Subset,
        hi: Subset,
        want_lo: Subset,
        want_hi: Subset,
    },
    #[error("sample {sample} has {got} directions, expected {expected}")]
    TupleSize { sample: usize, expected: usize, got: usize },
    #[error("variable {0} is not a poset element")]
    NamedVariable(String),
    #[error("certification failed at sample {0}")]
    CertificationFailure(usize),
    #[error("g(x) = {0} is not positive")]
    NonpositiveValue(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaTriple {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

/// Eigenvalue sign counts from the exact characteristic polynomial.
pub fn inertia(a: &SymMatrix) -> InertiaTriple {
    let p = a.characteristic_polynomial();
    let n = a.dim();
    let n_zero = p.iter().rev().take_while(|c| c.is_zero()).count();
    let signs: Vec<i8> = p.iter().map(sign).filter(|&s| s != 0).collect();
    let n_plus = signs.windows(2).filter(|w| w[0] != w[1]).count();
    InertiaTriple {
        n_plus,
        n_zero,
        n_minus: n - n_plus - n_zero,
    }
}

/// Components of the graph on indices joined by positive off-diagonal
/// entries, each sorted, ordered by least member.
pub fn positive_offdiag_components(a: &SymMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = vec![];
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && j != i && a.get(i, j).is_positive() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn first_negative_offdiag(a: &SymMatrix) -> Option<(usize, usize)> {
    let n = a.dim();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| a.get(i, j).is_negative())
}

pub fn is_irreducible_nonneg_offdiag(a: &SymMatrix) -> bool {
    first_negative_offdiag(a).is_none() && positive_offdiag_components(a).len() <= 1
}

/// Coordinates of `v` at the variables of `f`, which must all be sets.
pub fn direction_on_vars(f: &MultiPoly, v: &IntervalVector) -> Result<Vec<Q>, LorentzError> {
    f.vars()
        .iter()
        .map(|var| match var {
            Var::Set(s) => Ok(v.get(*s).unwrap_or_else(Q::zero)),
            Var::Named(n) => Err(LorentzError::NamedVariable(n.clone())),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    /// Least strict-submodularity gap; `null` when no pair is incomparable.
    pub min_gap: Option<String>,
    pub pair: Option<(Subset, Subset)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleResult {
    pub index: usize,
    pub directions: Vec<IntervalVectorJson>,
    pub membership: Vec<Membership>,
    /// `D_{v_1} ⋯ D_{v_d} f`.
    pub contraction: String,
    pub contraction_positive: bool,
    /// Inertia of the Hessian of `D_{v_3} ⋯ D_{v_d} f`, when `d ≥ 2`.
    pub inertia: Option<InertiaTriple>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LorentzianCertificate {
    #[serde(rename = "K")]
    pub lo: Subset,
    #[serde(rename = "L")]
    pub hi: Subset,
    pub d: usize,
    pub seed: Option<u64>,
    pub samples: Vec<SampleResult>,
    pub verdict: bool,
}

impl LorentzianCertificate {
    pub fn first_failure(&self) -> Option<usize> {
        self.samples.iter().find(|s| !s.passed).map(|s| s.index)
    }

    pub fn require_verdict(self) -> Result<Self, LorentzError> {
        match self.first_failure() {
            Some(i) => Err(LorentzError::CertificationFailure(i)),
            None => Ok(self),
        }
    }
}

fn membership(v: &IntervalVector) -> Membership {
    match min_submodular_gap(v) {
        Some((gap, s, t)) => Membership {
            min_gap: Some(format_q(&gap)),
            pair: Some((s, t)),
        },
        None => Membership {
            min_gap: None,
            pair: None,
        },
    }
}

fn check_tuples(tuples: &[Vec<IntervalVector>], lo: Subset, hi: Subset, size: usize) -> Result<(), LorentzError> {
    for (sample, tuple) in tuples.iter().enumerate() {
        if tuple.len() < size {
            return Err(LorentzError::TupleSize {
                sample,
                expected: size,
                got: tuple.len(),
            });
        }
        for (direction, v) in tuple.iter().enumerate() {
            let c = v.coords();
            if c.lo() != lo || c.hi() != hi {
                return Err(LorentzError::WrongInterval {
                    sample,
                    direction,
                    lo: c.lo(),
                    hi: c.hi(),
                    want_lo: lo,
                    want_hi: hi,
                });
            }
            if let Some((_, s, t)) = min_submodular_gap(v).filter(|(g, _, _)| !g.is_positive()) {
                return Err(LorentzError::DirectionNotInCone { sample, direction, s, t });
            }
        }
    }
    Ok(())
}

/// Conditions (P) and (H) for a homogeneous `f` at each tuple, using its
/// first `deg f` directions. The zero polynomial passes.
pub fn certify_polynomial(
    f: &MultiPoly,
    tuples: &[Vec<IntervalVector>],
    exec: Execution,
) -> Result<Vec<SampleResult>, LorentzError> {
    if !f.is_homogeneous() {
        return Err(PolyError::Inhomogeneous.into());
    }
    let d = f.degree().unwrap_or(0);
    let mut dirs = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        let row = tuple[..d.min(tuple.len())]
            .iter()
            .map(|v| direction_on_vars(f, v))
            .collect::<Result<Vec<_>, _>>()?;
        dirs.push(row);
    }
    let zero = f.is_zero();
    let outcomes = exec.map(&dirs, |row: &Vec<Vec<Q>>| -> Result<(Q, Option<InertiaTriple>), PolyError> {
        let p = f.dir_derivatives(row)?.constant_term();
        let h = if d >= 2 {
            Some(inertia(&f.dir_derivatives(&row[2..])?.hessian_of_quadratic()?))
        } else {
            None
        };
        Ok((p, h))
    });
    let mut out = Vec::with_capacity(tuples.len());
    for (index, (tuple, outcome)) in tuples.iter().zip(outcomes).enumerate() {
        let (p, h) = outcome?;
        let positive = p.is_positive();
        let passed = zero || (positive && h.is_none_or(|t| t.n_plus == 1));
        out.push(SampleResult {
            index,
            directions: tuple.iter().map(IntervalVectorJson::from).collect(),
            membership: tuple.iter().map(membership).collect(),
            contraction: format_q(&p),
            contraction_positive: positive,
            inertia: h,
            passed,
        });
    }
    Ok(out)
}

/// Certificate for `pol_a^b` at the given tuples of cone points.
#[allow(non_snake_case)]
pub fn certify_C_lorentzian(
    cache: &mut PolCache,
    a: usize,
    b: usize,
    tuples: &[Vec<IntervalVector>],
    seed: Option<u64>,
    exec: Execution,
) -> Result<LorentzianCertificate, LorentzError> {
    let p = cache.poset();
    let d = p.d(a, b).ok_or(PolError::NotAnInterval(a, b))?;
    let (lo, hi) = (p.element(a), p.element(b));
    check_tuples(tuples, lo, hi, d)?;
    let pol = cache.pol(a, b)?;
    let samples = certify_polynomial(&pol, tuples, exec)?;
    let verdict = samples.iter().all(|s| s.passed);
    Ok(LorentzianCertificate {
        lo,
        hi,
        d,
        seed,
        samples,
        verdict,
    })
}

/// `count` seeded tuples (the first is the interior point) then
/// [`certify_C_lorentzian`].
pub fn certify_sampled(
    cache: &mut PolCache,
    a: usize,
    b: usize,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<LorentzianCertificate, LorentzError> {
    let d = cache.poset().d(a, b).ok_or(PolError::NotAnInterval(a, b))?;
    let tuples = sample_tuples(cache, a, b, d, count, seed)?;
    certify_C_lorentzian(cache, a, b, &tuples, Some(seed), exec)
}

pub fn sample_tuples(
    cache: &PolCache,
    a: usize,
    b: usize,
    size: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<IntervalVector>>, LorentzError> {
    let coords = cache.coords(a, b)?;
    Ok(direction_tuples(&coords, size, count, seed))
}

/// `fg` passes (P) and (H) at every tuple.
pub fn product_check(
    f: &MultiPoly,
    g: &MultiPoly,
    tuples: &[Vec<IntervalVector>],
    exec: Execution,
) -> Result<bool, LorentzError> {
    let fg = f * g;
    if fg.is_zero() {
        return Ok(true);
    }
    let d = fg.degree().unwrap_or(0);
    if let Some((sample, t)) = tuples.iter().enumerate().find(|(_, t)| t.len() < d) {
        return Err(LorentzError::TupleSize {
            sample,
            expected: d,
            got: t.len(),
        });
    }
    Ok(certify_polynomial(&fg, tuples, exec)?.iter().all(|s| s.passed))
}

/// Lorentzian on the positive orthant: nonnegative coefficients, M-convex
/// support, and at most one positive Hessian eigenvalue for every
/// `∂^γ f` with `|γ| = d − 2`.
pub fn is_lorentzian_orthant(f: &MultiPoly) -> Result<bool, LorentzError> {
    if !f.is_homogeneous() {
        return Err(PolyError::Inhomogeneous.into());
    }
    if f.is_zero() {
        return Ok(true);
    }
    if f.terms().any(|(_, c)| c.is_negative()) {
        return Ok(false);
    }
    let support: BTreeSet<Vec<u16>> = f.terms().map(|(m, _)| m.exps().to_vec()).collect();
    if !is_m_convex(&support) {
        return Ok(false);
    }
    let d = f.degree().unwrap_or(0);
    if d < 2 {
        return Ok(true);
    }
    for gamma in compositions(f.nvars(), d - 2) {
        let mut g = f.clone();
        for (i, &k) in gamma.iter().enumerate() {
            for _ in 0..k {
                g = g.partial(i);
            }
        }
        if inertia(&g.hessian_of_quadratic()?).n_plus > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exchange property: for `α, β` in the set and `α_i > β_i` there is `j`
/// with `α_j < β_j` and `α − e_i + e_j` in the set.
pub fn is_m_convex(support: &BTreeSet<Vec<u16>>) -> bool {
    for a in support {
        for b in support {
            for i in 0..a.len() {
                if a[i] <= b[i] {
                    continue;
                }
                let ok = (0..a.len()).filter(|&j| a[j] < b[j]).any(|j| {
                    let mut c = a.clone();
                    c[i] -= 1;
                    c[j] += 1;
                    support.contains(&c)
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// All exponent vectors of length `n` summing to `k`.
fn compositions(n: usize, k: usize) -> Vec<Vec<u16>> {
    fn go(n: usize, k: usize, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if prefix.len() + 1 == n {
            prefix.push(k as u16);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=k {
            prefix.push(e as u16);
            go(n, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(vec![]);
        }
        return out;
    }
    go(n, k, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Both sides of the equivalence between "Hessian at `x` has exactly one
/// positive eigenvalue" and "`d g ∇²g − (d−1) ∇g ∇gᵀ` is negative
/// semidefinite at `x`", for `g(x) > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub hessian: InertiaTriple,
    pub corrected: InertiaTriple,
    pub one_positive: bool,
    pub negative_semidefinite: bool,
}

impl EquivalenceCheck {
    pub fn holds(&self) -> bool {
        self.one_positive == self.negative_semidefinite
    }
}

pub fn hessian_equivalence(g: &MultiPoly, x: &[Q]) -> Result<EquivalenceCheck, LorentzError> {
    if !g.is_homogeneous() {
        return Err(PolyError::Inhomogeneous.into());
    }
    let value = g.eval(x)?;
    if !value.is_positive() {
        return Err(LorentzError::NonpositiveValue(format_q(&value)));
    }
    let d = Q::from_integer(g.degree().unwrap_or(0).into());
    let h = g.hessian_at(x)?;
    let grad = g.gradient_at(x)?;
    let corrected = h.scale(&(&d * &value)).minus_rank_one(&(&d - Q::from_integer(1.into())), &grad);
    let hessian = inertia(&h);
    let corrected = inertia(&corrected);
    Ok(EquivalenceCheck {
        hessian,
        corrected,
        one_positive: hessian.n_plus == 1,
        negative_semidefinite: corrected.n_plus == 0,
    })
}

pub fn bh233_equivalence_check(g: &MultiPoly, x: &[Q]) -> Result<bool, LorentzError> {
    Ok(hessian_equivalence(g, x)?.holds())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub id: u8,
    pub name: String,
    pub applicable: bool,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineReport {
    #[serde(rename = "K")]
    pub lo: Subset,
    #[serde(rename = "L")]
    pub hi: Subset,
    pub d: usize,
    pub hypotheses: Vec<HypothesisResult>,
}

impl EngineReport {
    pub fn all_applicable_pass(&self) -> bool {
        self.hypotheses.iter().filter(|h| h.applicable).all(|h| h.passed)
    }

    pub fn get(&self, id: u8) -> Option<&HypothesisResult> {
        self.hypotheses.iter().find(|h| h.id == id)
    }
}

fn hypothesis(id: u8, name: &str, applicable: bool, witness: Option<String>) -> HypothesisResult {
    HypothesisResult {
        id,
        name: name.to_string(),
        applicable,
        passed: !applicable || witness.is_none(),
        witness,
    }
}

/// Checks the four hypotheses of the induction engine for `pol_a^b` at the
/// given tuples: (1) lineality invariance, (2) positive full contractions,
/// (3) irreducible contracted Hessians with nonnegative off-diagonal,
/// (4) every `∂_F pol` certifies. (3) and (4) apply when `d ≥ 2`.
pub fn engine_hypotheses_report(
    cache: &mut PolCache,
    a: usize,
    b: usize,
    tuples: &[Vec<IntervalVector>],
    seed: u64,
    exec: Execution,
) -> Result<EngineReport, LorentzError> {
    let p = cache.poset();
    let d = p.d(a, b).ok_or(PolError::NotAnInterval(a, b))?;
    let (lo, hi) = (p.element(a), p.element(b));
    check_tuples(tuples, lo, hi, d)?;
    let pol = cache.pol(a, b)?;
    let open = p.open_interval(a, b);
    let name = |k: usize| p.element(open[k]).to_string();
    let mut hypotheses = Vec::with_capacity(4);

    let lineality = if d == 0 {
        None
    } else {
        match cache.check_lineality_invariance(a, b, 8, seed, exec) {
            Ok(true) => None,
            Ok(false) => Some("pol(x + w) ≠ pol(x) for a sampled modular w".to_string()),
            Err(PolError::PrerequisiteNotBalanced) => Some("poset is not balanced".to_string()),
            Err(e) => return Err(e.into()),
        }
    };
    hypotheses.push(hypothesis(1, "lineality invariance", d >= 1, lineality));

    let samples = certify_polynomial(&pol, tuples, exec)?;
    let positivity = samples
        .iter()
        .find(|s| !s.contraction_positive)
        .map(|s| format!("sample {}: contraction {}", s.index, s.contraction));
    hypotheses.push(hypothesis(2, "positive full contractions", true, positivity));

    let mut hessian_witness = None;
    if d >= 2 {
        for (index, tuple) in tuples.iter().enumerate() {
            let dirs = tuple[2..d]
                .iter()
                .map(|v| direction_on_vars(&pol, v))
                .collect::<Result<Vec<_>, _>>()?;
            let h = pol.dir_derivatives(&dirs)?.hessian_of_quadratic()?;
            if let Some((i, j)) = first_negative_offdiag(&h) {
                hessian_witness = Some(format!(
                    "sample {index}: negative entry {} at ({}, {})",
                    format_q(h.get(i, j)),
                    name(i),
                    name(j)
                ));
                break;
            }
            let comps = positive_offdiag_components(&h);
            if comps.len() > 1 {
                let parts: Vec<String> = comps
                    .iter()
                    .map(|c| format!("{{{}}}", c.iter().map(|&k| name(k)).collect::<Vec<_>>().join(", ")))
                    .collect();
                hessian_witness = Some(format!("sample {index}: disconnected components {}", parts.join(" | ")));
                break;
            }
        }
    }
    hypotheses.push(hypothesis(3, "irreducible Hessians with nonnegative off-diagonal", d >= 2, hessian_witness));

    let mut partial_witness = None;
    if d >= 2 {
        for (k, _) in open.iter().enumerate() {
            let df = pol.partial(k);
            let results = certify_polynomial(&df, tuples, exec)?;
            if let Some(s) = results.iter().find(|s| !s.passed) {
                partial_witness = Some(format!("∂ at {}: sample {} fails", name(k), s.index));
                break;
            }
        }
    }
    hypotheses.push(hypothesis(4, "every partial derivative certifies", d >= 2, partial_witness));

    Ok(EngineReport { lo, hi, d, hypotheses })
}
