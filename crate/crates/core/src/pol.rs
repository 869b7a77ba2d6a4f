//! The basis polynomials `pol_K^L` of a graded sub-poset, built by the
//! recursion
//!
//! ```text
//! d(K,L) · pol_K^L(t) = Σ_{K<F<L} t_F · pol_K^F(π_K^F t) · pol_F^L(π_F^L t)
//! ```
//!
//! with `pol_K^L = 1` when `d(K,L) = 0`. Variables of `pol_K^L` are the
//! poset elements strictly between `K` and `L`; the projections `π` act on
//! vectors supported on those elements (extended by zero elsewhere).

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cone::{self, modular_basis, ConeError, IntervalCoords, IntervalVector};
use crate::exec::Execution;
use crate::matroid::{Matroid, MatroidError};
use crate::poly::{named_vars, set_vars, MultiPoly, PolyError, Vars};
use crate::poset::{GradedSubposet, PosetError};
use crate::rational::{binomial, factorial, Q};
use crate::sampling::{random_modular, random_vector, rng_from_seed};
use crate::subset::Subset;
use crate::unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("indices {0} < {1} do not form an interval of the poset")]
    NotAnInterval(usize, usize),
    #[error("the poset is not balanced")]
    PrerequisiteNotBalanced,
    #[error("element {0} is not in L ∖ K")]
    ElementOutsideInterval(usize),
    #[error("internal: bivariate restriction {got} differs from Möbius expansion {expected}")]
    BridgeMismatch { expected: String, got: String },
    #[error("internal: reduced characteristic polynomial via pol is {via_pol}, direct computation gives {direct}")]
    MismatchWithDirectComputation { via_pol: String, direct: String },
}

/// Memoized `pol_K^L` over one poset, keyed by element indices.
pub struct PolCache<'p> {
    poset: &'p GradedSubposet,
    vars: HashMap<(usize, usize), Vars>,
    memo: HashMap<(usize, usize), Arc<MultiPoly>>,
}

impl<'p> PolCache<'p> {
    pub fn new(poset: &'p GradedSubposet) -> Self {
        PolCache {
            poset,
            vars: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn poset(&self) -> &'p GradedSubposet {
        self.poset
    }

    fn check_interval(&self, a: usize, b: usize) -> Result<usize, PolError> {
        self.poset.d(a, b).ok_or(PolError::NotAnInterval(a, b))
    }

    /// Variables of `pol_a^b`: the open interval in canonical order.
    pub fn vars(&mut self, a: usize, b: usize) -> Vars {
        let poset = self.poset;
        self.vars
            .entry((a, b))
            .or_insert_with(|| set_vars(poset.open_interval(a, b).into_iter().map(|c| poset.element(c))))
            .clone()
    }

    pub fn pol(&mut self, a: usize, b: usize) -> Result<Arc<MultiPoly>, PolError> {
        if let Some(p) = self.memo.get(&(a, b)) {
            return Ok(p.clone());
        }
        let d = self.check_interval(a, b)?;
        let vars = self.vars(a, b);
        let pol = if d == 0 {
            MultiPoly::one(&vars)
        } else {
            let mut sum = MultiPoly::zero(&vars);
            for (k, f) in self.poset.open_interval(a, b).into_iter().enumerate() {
                let product = self.split_product(a, f, b)?;
                sum = &sum + &(&MultiPoly::var(&vars, k) * &product);
            }
            sum.scale(&Q::new(BigInt::one(), BigInt::from(d)))
        };
        let pol = Arc::new(pol);
        self.memo.insert((a, b), pol.clone());
        Ok(pol)
    }

    /// `pol_a^f(π_a^f t) · pol_f^b(π_f^b t)` over the variables of `(a, b)`.
    pub fn split_product(&mut self, a: usize, f: usize, b: usize) -> Result<MultiPoly, PolError> {
        if !(self.poset.lt(a, f) && self.poset.lt(f, b)) {
            return Err(PolError::NotAnInterval(a, b));
        }
        let below = self.pol_through_projection(a, b, a, f)?;
        let above = self.pol_through_projection(a, b, f, b)?;
        Ok(&below * &above)
    }

    /// `pol_f^g ∘ π_f^g`, as a polynomial in the variables of `(a, b)`.
    pub fn pol_through_projection(&mut self, a: usize, b: usize, f: usize, g: usize) -> Result<MultiPoly, PolError> {
        let inner = self.pol(f, g)?;
        let outer_vars = self.vars(a, b);
        let map = self.projection_map(a, b, f, g);
        Ok(inner.substitute_linear(&map, &outer_vars)?)
    }

    /// Matrix of `π_f^g` from the open elements of `(a,b)` to those of `(f,g)`:
    /// row `S` reads `t_S − t_g |S∖f|/|g∖f| − t_f |g∖S|/|g∖f|`, where `t_f`,
    /// `t_g` vanish when they are the outer endpoints.
    pub fn projection_map(&self, a: usize, b: usize, f: usize, g: usize) -> Vec<Vec<Q>> {
        let p = self.poset;
        let outer = p.open_interval(a, b);
        let inner = p.open_interval(f, g);
        let (fs, gs) = (p.element(f), p.element(g));
        let width = Q::from_integer(gs.difference(fs).len().into());
        inner
            .iter()
            .map(|&s| {
                let ss = p.element(s);
                outer
                    .iter()
                    .map(|&t| {
                        if t == s {
                            Q::one()
                        } else if t == g {
                            -Q::from_integer(ss.difference(fs).len().into()) / &width
                        } else if t == f {
                            -Q::from_integer(gs.difference(ss).len().into()) / &width
                        } else {
                            Q::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `pol_a^b` at a vector on `E_K^L`; only poset coordinates are read.
    pub fn eval_at(&mut self, a: usize, b: usize, point: &IntervalVector) -> Result<Q, PolError> {
        let pol = self.pol(a, b)?;
        let x = self.restrict(a, b, point)?;
        Ok(pol.eval(&x)?)
    }

    /// Coordinates of `point` at the variables of `pol_a^b`.
    pub fn restrict(&self, a: usize, b: usize, point: &IntervalVector) -> Result<Vec<Q>, PolError> {
        let keys: Vec<Subset> = self
            .poset
            .open_interval(a, b)
            .into_iter()
            .map(|c| self.poset.element(c))
            .collect();
        Ok(point.restrict_to(&keys)?)
    }

    pub fn coords(&self, a: usize, b: usize) -> Result<Arc<IntervalCoords>, PolError> {
        Ok(IntervalCoords::new(self.poset.element(a), self.poset.element(b))?)
    }

    /// `∂_{t_F} pol_a^b = pol_a^F(π t) · pol_F^b(π t)` for every `F`; returns
    /// the first failing `F`.
    pub fn derivative_identity_witness(&mut self, a: usize, b: usize) -> Result<Option<Subset>, PolError> {
        let pol = self.pol(a, b)?;
        for (k, f) in self.poset.open_interval(a, b).into_iter().enumerate() {
            if pol.partial(k) != self.split_product(a, f, b)? {
                return Ok(Some(self.poset.element(f)));
            }
        }
        Ok(None)
    }

    pub fn check_derivative_identity(&mut self, a: usize, b: usize) -> Result<bool, PolError> {
        Ok(self.derivative_identity_witness(a, b)?.is_none())
    }

    /// `pol(x + w) = pol(x)` for random rational `x` and random modular `w`.
    pub fn check_lineality_invariance(
        &mut self,
        a: usize,
        b: usize,
        trials: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<bool, PolError> {
        if !self.poset.is_balanced() {
            return Err(PolError::PrerequisiteNotBalanced);
        }
        let pol = self.pol(a, b)?;
        let coords = self.coords(a, b)?;
        let mut rng = rng_from_seed(seed);
        let mut pairs = Vec::with_capacity(trials);
        for _ in 0..trials {
            let x = random_vector(&mut rng, &coords, 5, 7);
            let w = random_modular(&mut rng, &coords, 6);
            pairs.push((self.restrict(a, b, &x)?, self.restrict(a, b, &(&x + &w))?));
        }
        let results = exec.map(&pairs, |(x, xw)| pol.eval(x).ok() == pol.eval(xw).ok());
        Ok(results.into_iter().all(|ok| ok))
    }

    /// `d(K,L)! · pol_K^L(s α + t β)` in variables `(s, t)`, checked against
    /// `Σ_{K ≤ F < L, i ∉ F} C(d, r(K,F)) |μ(K,F)| t^{r(K,F)} s^{d(F,L)}`.
    pub fn alpha_beta_bivariate(&mut self, a: usize, b: usize, i: usize) -> Result<MultiPoly, PolError> {
        let d = self.check_interval(a, b)?;
        let p = self.poset;
        let (lo, hi) = (p.element(a), p.element(b));
        if !hi.difference(lo).contains(i) {
            return Err(PolError::ElementOutsideInterval(i));
        }
        let st = named_vars(&["s", "t"]);
        let got = if d == 0 {
            MultiPoly::one(&st)
        } else {
            let coords = self.coords(a, b)?;
            let dirs = [
                self.restrict(a, b, &cone::alpha(&coords))?,
                self.restrict(a, b, &cone::beta(&coords))?,
            ];
            self.pol(a, b)?
                .restrict_to_named_directions(&dirs, &st)?
                .scale(&Q::from_integer(factorial(d)))
        };

        let mu = p.mobius();
        let mut expected = MultiPoly::zero(&st);
        for f in p.closed_interval(a, b) {
            if f == b || p.element(f).contains(i) {
                continue;
            }
            let r_kf = p.rank(a, f).unwrap() as usize;
            let d_fl = p.d(f, b).unwrap();
            let c = binomial(d, r_kf) * BigInt::from(mu.get(a, f).abs());
            expected.add_term(
                crate::poly::Monomial(vec![d_fl as u16, r_kf as u16].into_boxed_slice()),
                Q::from_integer(c),
            );
        }
        if got != expected {
            return Err(PolError::BridgeMismatch {
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
        Ok(got)
    }

    /// `2·pol = (Σ_F t_F)² − Σ_G (t_G − Σ_{F<G} t_F)²` over atoms `F` and
    /// coatoms `G` of a rank-3 interval.
    pub fn check_rank_two_squares(&mut self, a: usize, b: usize) -> Result<bool, PolError> {
        if self.check_interval(a, b)? != 2 {
            return Ok(false);
        }
        let vars = self.vars(a, b);
        let p = self.poset;
        let open = p.open_interval(a, b);
        let atoms: Vec<usize> = (0..open.len()).filter(|&k| p.covers(a, open[k])).collect();
        let coatoms: Vec<usize> = (0..open.len()).filter(|&k| p.covers(open[k], b)).collect();
        let sum_atoms = atoms
            .iter()
            .fold(MultiPoly::zero(&vars), |acc, &k| &acc + &MultiPoly::var(&vars, k));
        let mut rhs = sum_atoms.pow(2);
        for &g in &coatoms {
            let mut form = MultiPoly::var(&vars, g);
            for &f in atoms.iter().filter(|&&f| p.lt(open[f], open[g])) {
                form = &form - &MultiPoly::var(&vars, f);
            }
            rhs = &rhs - &form.pow(2);
        }
        Ok(self.pol(a, b)?.scale(&Q::from_integer(2.into())) == rhs)
    }

    /// `∂_F ∂_G pol = 0` for every incomparable pair `F, G`.
    pub fn incomparable_mixed_partials_vanish(&mut self, a: usize, b: usize) -> Result<bool, PolError> {
        let pol = self.pol(a, b)?;
        let open = self.poset.open_interval(a, b);
        for i in 0..open.len() {
            let di = pol.partial(i);
            for j in i + 1..open.len() {
                if !self.poset.leq(open[i], open[j]) && !self.poset.leq(open[j], open[i]) && !di.partial(j).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `pol(w) = 0` for every modular basis vector `w` (needs `d ≥ 1`).
    pub fn vanishes_on_modular_basis(&mut self, a: usize, b: usize) -> Result<bool, PolError> {
        let coords = self.coords(a, b)?;
        let basis = match modular_basis(&coords) {
            Ok(b) => b,
            Err(ConeError::TrivialInterval) => return Ok(true),
            Err(e) => return Err(e.into()),
        };
        for w in &basis.vectors {
            if !self.eval_at(a, b, w)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Reduced characteristic polynomial read off `(r−1)! · pol_∅^E(sα + tβ)`,
/// reconciled with the Möbius-function computation.
pub fn reduced_charpoly_via_pol(m: &Matroid) -> Result<UniPoly, PolError> {
    let loops = m.loops();
    if !loops.is_empty() {
        return Err(MatroidError::HasLoops(loops).into());
    }
    if m.full_rank() == 0 {
        return Err(MatroidError::RankZero.into());
    }
    let lattice = m.flats_lattice()?;
    let mut cache = PolCache::new(lattice.poset());
    let i = 0;
    let bivariate = cache.alpha_beta_bivariate(lattice.bottom(), lattice.top(), i)?;
    let d = m.full_rank() - 1;
    let mut coeffs = vec![Q::zero(); d + 1];
    for k in 0..=d {
        let b_k = bivariate.coeff(&[(d - k) as u16, k as u16]) / Q::from_integer(binomial(d, k));
        coeffs[d - k] = if k % 2 == 0 { b_k } else { -b_k };
    }
    let via_pol = UniPoly::from_coeffs(coeffs);
    let direct = m.reduced_characteristic_polynomial(i)?;
    if via_pol != direct {
        return Err(PolError::MismatchWithDirectComputation {
            via_pol: via_pol.to_string(),
            direct: direct.to_string(),
        });
    }
    Ok(via_pol)
}

/// Coefficients `a_k` of `f(s,t) = Σ C(d,k) a_k s^{d−k} t^k`.
pub fn normalized_bivariate_coeffs(f: &MultiPoly, d: usize) -> Vec<Q> {
    (0..=d)
        .map(|k| f.coeff(&[(d - k) as u16, k as u16]) / Q::from_integer(binomial(d, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{alpha, beta, alpha_i, interior_point};
    use crate::rational::{q, qi};

    fn k4() -> Matroid {
        Matroid::graphic(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn set(l: &[usize]) -> Subset {
        Subset::from_elems(l.iter().copied())
    }

    #[test]
    fn rank_one_interval_is_sum_of_atoms() {
        let lat = Matroid::uniform(2, 3).unwrap().flats_lattice().unwrap();
        let mut cache = PolCache::new(lat.poset());
        let pol = cache.pol(lat.bottom(), lat.top()).unwrap();
        assert_eq!(pol.to_string(), "t_{0} + t_{1} + t_{2}");
        let atom = lat.index_of(set(&[1])).unwrap();
        assert_eq!(*cache.pol(lat.bottom(), atom).unwrap(), MultiPoly::one(&cache.vars(lat.bottom(), atom)));
        assert!(matches!(cache.pol(atom, lat.bottom()), Err(PolError::NotAnInterval(..))));
    }

    #[test]
    fn rank_two_matches_closed_formula() {
        // 2·pol = Σ_{F≺G} (2 t_F t_G − t_F² |L∖G|/|L∖F| − t_G² |F∖K|/|G∖K|)
        for m in [Matroid::uniform(3, 3).unwrap(), Matroid::uniform(3, 4).unwrap(), k4(), Matroid::fano()] {
            let lat = m.flats_lattice().unwrap();
            let (k, l) = (lat.bottom(), lat.top());
            let mut cache = PolCache::new(lat.poset());
            let vars = cache.vars(k, l);
            let open = lat.open_interval(k, l);
            let (ks, ls) = (lat.element(k), lat.element(l));
            let mut expected = MultiPoly::zero(&vars);
            for (i, &f) in open.iter().enumerate() {
                for (j, &g) in open.iter().enumerate() {
                    if !(lat.covers(k, f) && lat.covers(f, g) && lat.covers(g, l)) {
                        continue;
                    }
                    let (fs, gs) = (lat.element(f), lat.element(g));
                    let tf = MultiPoly::var(&vars, i);
                    let tg = MultiPoly::var(&vars, j);
                    let c1 = q(ls.difference(gs).len() as i64, ls.difference(fs).len() as i64);
                    let c2 = q(fs.difference(ks).len() as i64, gs.difference(ks).len() as i64);
                    let term = &(&(&tf * &tg).scale(&qi(2)) - &(&tf * &tf).scale(&c1)) - &(&tg * &tg).scale(&c2);
                    expected = &expected + &term;
                }
            }
            let pol = cache.pol(k, l).unwrap();
            assert_eq!(pol.scale(&qi(2)), expected);
        }
    }

    #[test]
    fn derivative_identity_on_catalog() {
        for m in [Matroid::uniform(2, 3).unwrap(), Matroid::uniform(3, 3).unwrap(), k4()] {
            let lat = m.flats_lattice().unwrap();
            let mut cache = PolCache::new(lat.poset());
            for (a, b) in lat.strict_pairs() {
                assert_eq!(cache.derivative_identity_witness(a, b).unwrap(), None);
            }
        }
    }

    #[test]
    fn special_values() {
        let lat = k4().flats_lattice().unwrap();
        let mu = lat.mobius().clone();
        let mut cache = PolCache::new(lat.poset());
        for (a, b) in lat.strict_pairs() {
            let d = lat.d(a, b).unwrap();
            let coords = cache.coords(a, b).unwrap();
            let fact = Q::from_integer(factorial(d));
            assert_eq!(cache.eval_at(a, b, &alpha(&coords)).unwrap(), Q::one() / &fact);
            assert_eq!(cache.eval_at(a, b, &beta(&coords)).unwrap(), qi(mu.get(a, b).abs()) / &fact);
            if d >= 1 {
                assert!(cache.vanishes_on_modular_basis(a, b).unwrap());
            }
        }
    }

    #[test]
    fn lineality() {
        let lat = k4().flats_lattice().unwrap();
        let (k, l) = (lat.bottom(), lat.top());
        let mut cache = PolCache::new(lat.poset());
        assert!(cache.check_lineality_invariance(k, l, 10, 3, Execution::Sequential).unwrap());
        let coords = cache.coords(k, l).unwrap();
        let x = interior_point(&coords);
        let shifted = &(&x + &alpha(&coords)) - &alpha_i(&coords, 2).unwrap();
        assert_eq!(cache.eval_at(k, l, &shifted).unwrap(), cache.eval_at(k, l, &x).unwrap());

        let chain = GradedSubposet::from_sets(2, [Subset::EMPTY, set(&[0]), set(&[0, 1])]).unwrap();
        let mut c2 = PolCache::new(&chain);
        assert_eq!(
            c2.check_lineality_invariance(0, 2, 1, 0, Execution::Sequential),
            Err(PolError::PrerequisiteNotBalanced)
        );
    }

    #[test]
    fn bivariate_bridge() {
        let lat = Matroid::uniform(2, 3).unwrap().flats_lattice().unwrap();
        let mut cache = PolCache::new(lat.poset());
        let f = cache.alpha_beta_bivariate(lat.bottom(), lat.top(), 0).unwrap();
        assert_eq!(f.to_string(), "s + 2 * t");
        assert_eq!(
            cache.alpha_beta_bivariate(lat.bottom(), lat.bottom() + 1, 2),
            Err(PolError::ElementOutsideInterval(2))
        );
        let b3 = Matroid::uniform(3, 3).unwrap().flats_lattice().unwrap();
        let mut c3 = PolCache::new(b3.poset());
        let g = c3.alpha_beta_bivariate(b3.bottom(), b3.top(), 1).unwrap();
        assert_eq!(g.to_string(), "s^2 + 4 * s * t + t^2");
        assert_eq!(normalized_bivariate_coeffs(&g, 2), vec![qi(1), qi(2), qi(1)]);
    }

    #[test]
    fn reduced_charpoly_from_pol() {
        let abs = |m: &Matroid| reduced_charpoly_via_pol(m).unwrap().abs_coeffs_from_top();
        assert_eq!(abs(&Matroid::uniform(2, 3).unwrap()), vec![qi(1), qi(2)]);
        assert_eq!(abs(&k4()), vec![qi(1), qi(5), qi(6)]);
        assert_eq!(abs(&Matroid::uniform(3, 4).unwrap()), vec![qi(1), qi(3), qi(3)]);
        assert_eq!(abs(&Matroid::uniform(1, 2).unwrap()), vec![qi(1)]);
    }

    #[test]
    fn squares_and_incomparable_partials() {
        for m in [Matroid::uniform(3, 3).unwrap(), Matroid::uniform(3, 4).unwrap(), k4(), Matroid::fano()] {
            let lat = m.flats_lattice().unwrap();
            let mut cache = PolCache::new(lat.poset());
            assert!(cache.check_rank_two_squares(lat.bottom(), lat.top()).unwrap());
            assert!(cache.incomparable_mixed_partials_vanish(lat.bottom(), lat.top()).unwrap());
        }
        let u45 = Matroid::uniform(4, 5).unwrap().flats_lattice().unwrap();
        let mut cache = PolCache::new(u45.poset());
        assert!(cache.incomparable_mixed_partials_vanish(u45.bottom(), u45.top()).unwrap());
        assert!(!cache.check_rank_two_squares(u45.bottom(), u45.top()).unwrap());
    }
}
