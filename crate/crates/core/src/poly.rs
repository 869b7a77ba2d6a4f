//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Monomials are dense exponent vectors over a shared variable list; terms
//! live in a `BTreeMap`, so iteration and printing order is canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::SymMatrix;
use crate::rational::{format_q, Q};
use crate::subset::Subset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected degree {expected}, polynomial has degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
}

/// Variable key: a poset element `t_F`, or a named auxiliary variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Set(Subset),
    Named(String),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Set(s) => {
                f.write_str("t_{")?;
                for (k, e) in s.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            Var::Named(n) => f.write_str(n),
        }
    }
}

pub type Vars = Arc<[Var]>;

pub fn set_vars(sets: impl IntoIterator<Item = Subset>) -> Vars {
    sets.into_iter().map(Var::Set).collect()
}

pub fn named_vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|n| Var::Named(n.as_ref().to_string())).collect()
}

/// Exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Box<[u16]>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n].into_boxed_slice())
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Q>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Q::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::var(vars.len(), i), Q::one());
        p
    }

    /// `Σ c_i x_i`.
    pub fn linear(vars: &Vars, coeffs: &[Q]) -> Self {
        assert_eq!(coeffs.len(), vars.len());
        let mut p = Self::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(vars.len(), i), c.clone());
        }
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u16>, Q)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            p.add_term(Monomial(e.into_boxed_slice()), c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u16]) -> Q {
        self.terms
            .get(&Monomial(exps.to_vec().into_boxed_slice()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    /// Constant term.
    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars()])
    }

    fn same_vars(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variables"
        );
    }

    pub fn scale(&self, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> MultiPoly {
        (0..k).fold(MultiPoly::one(&self.vars), |acc, _| &acc * self)
    }

    /// `∂f/∂x_i`.
    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * Q::from_integer(e.into()));
        }
        out
    }

    pub fn partial_var(&self, v: &Var) -> Result<MultiPoly, PolyError> {
        let i = self.var_index(v).ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
        Ok(self.partial(i))
    }

    /// `D_u f = Σ u_i ∂_i f`.
    pub fn dir_derivative(&self, u: &[Q]) -> Result<MultiPoly, PolyError> {
        self.check_len(u.len())?;
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            for (i, ui) in u.iter().enumerate() {
                let e = m.0[i];
                if e == 0 || ui.is_zero() {
                    continue;
                }
                let mut exps = m.0.clone();
                exps[i] -= 1;
                out.add_term(Monomial(exps), c * ui * Q::from_integer(e.into()));
            }
        }
        Ok(out)
    }

    /// `D_{u_1} ⋯ D_{u_k} f`.
    pub fn dir_derivatives(&self, us: &[Vec<Q>]) -> Result<MultiPoly, PolyError> {
        us.iter().try_fold(self.clone(), |f, u| f.dir_derivative(u))
    }

    fn check_len(&self, got: usize) -> Result<(), PolyError> {
        if got == self.nvars() {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                got,
            })
        }
    }

    pub fn eval(&self, x: &[Q]) -> Result<Q, PolyError> {
        self.check_len(x.len())?;
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(m.0.iter()) {
                for _ in 0..e {
                    term *= xi;
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn gradient_at(&self, x: &[Q]) -> Result<Vec<Q>, PolyError> {
        (0..self.nvars()).map(|i| self.partial(i).eval(x)).collect()
    }

    pub fn hessian_at(&self, x: &[Q]) -> Result<SymMatrix, PolyError> {
        self.check_len(x.len())?;
        let n = self.nvars();
        let firsts: Vec<MultiPoly> = (0..n).map(|i| self.partial(i)).collect();
        let mut entries = vec![Q::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = firsts[i].partial(j).eval(x)?;
                entries[i * n + j] = v.clone();
                entries[j * n + i] = v;
            }
        }
        Ok(SymMatrix::from_symmetric_entries(n, entries))
    }

    /// Constant Hessian of a quadratic form.
    pub fn hessian_of_quadratic(&self) -> Result<SymMatrix, PolyError> {
        match self.degree() {
            Some(2) | None => {}
            Some(d) => return Err(PolyError::WrongDegree { expected: 2, got: d }),
        }
        if !self.is_homogeneous() {
            return Err(PolyError::Inhomogeneous);
        }
        let n = self.nvars();
        let mut entries = vec![Q::zero(); n * n];
        for (m, c) in &self.terms {
            let support: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
            match support[..] {
                [i] => entries[i * n + i] = c * Q::from_integer(2.into()),
                [i, j] => {
                    entries[i * n + j] = c.clone();
                    entries[j * n + i] = c.clone();
                }
                _ => unreachable!("degree-2 monomial"),
            }
        }
        Ok(SymMatrix::from_symmetric_entries(n, entries))
    }

    /// `f(M y)`: old variable `i` becomes `Σ_j map[i][j] y_j`.
    pub fn substitute_linear(&self, map: &[Vec<Q>], new_vars: &Vars) -> Result<MultiPoly, PolyError> {
        self.check_len(map.len())?;
        if let Some(row) = map.iter().find(|r| r.len() != new_vars.len()) {
            return Err(PolyError::DimensionMismatch {
                expected: new_vars.len(),
                got: row.len(),
            });
        }
        let forms: Vec<MultiPoly> = map.iter().map(|row| MultiPoly::linear(new_vars, row)).collect();
        // powers[i][e] = forms[i]^e, filled lazily
        let mut powers: Vec<Vec<MultiPoly>> = forms.iter().map(|_| vec![MultiPoly::one(new_vars)]).collect();
        let mut out = MultiPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(new_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &forms[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `(y_1, .., y_m) ↦ f(y_1 v_1 + ⋯ + y_m v_m)`.
    pub fn restrict_to_directions(&self, directions: &[Vec<Q>]) -> Result<MultiPoly, PolyError> {
        let names: Vec<String> = (1..=directions.len()).map(|k| format!("y{k}")).collect();
        self.restrict_to_named_directions(directions, &named_vars(&names))
    }

    pub fn restrict_to_named_directions(&self, directions: &[Vec<Q>], new_vars: &Vars) -> Result<MultiPoly, PolyError> {
        assert_eq!(directions.len(), new_vars.len());
        for d in directions {
            self.check_len(d.len())?;
        }
        let map: Vec<Vec<Q>> = (0..self.nvars())
            .map(|i| directions.iter().map(|d| d[i].clone()).collect())
            .collect();
        self.substitute_linear(&map, new_vars)
    }

    /// Same polynomial over a larger variable list containing all current
    /// variables.
    pub fn embed(&self, new_vars: &Vars) -> Result<MultiPoly, PolyError> {
        let positions: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                new_vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mut out = MultiPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; new_vars.len()];
            for (k, &e) in m.0.iter().enumerate() {
                exps[positions[k]] = e;
            }
            out.add_term(Monomial(exps.into_boxed_slice()), c.clone());
        }
        Ok(out)
    }

    /// Terms in canonical order: exponent vectors descending lexicographically.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter().rev()
    }

    /// Canonical text, with set variables spelled through `labels` when given.
    pub fn to_text(&self, labels: Option<&[String]>) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let names: Vec<String> = self
            .vars
            .iter()
            .map(|v| match (v, labels) {
                (Var::Set(s), Some(l)) => {
                    let inner: Vec<&str> = s.iter().map(|e| l[e].as_str()).collect();
                    format!("t_{{{}}}", inner.join(","))
                }
                _ => v.to_string(),
            })
            .collect();
        let mut out = String::new();
        for (k, (m, c)) in self.canonical_terms().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
                .collect();
            if factors.is_empty() {
                out.push_str(&format_q(&mag));
            } else {
                if !mag.is_one() {
                    out.push_str(&format_q(&mag));
                    out.push_str(" * ");
                }
                out.push_str(&factors.join(" * "));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(None))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        out
    }
}
