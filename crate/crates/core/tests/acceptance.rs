//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use flatpol::chow::{build_chow, verify_vol_eq_pol};
use flatpol::cone::{alpha, beta, interior_point, IntervalVector};
use flatpol::exec::Execution;
use flatpol::lorentz::{certify_sampled, direction_on_vars, inertia, is_lorentzian_orthant, sample_tuples};
use flatpol::matrix::SymMatrix;
use flatpol::matroid::Matroid;
use flatpol::pol::{normalized_bivariate_coeffs, PolCache};
use flatpol::poly::named_vars;
use flatpol::poset::weisner_check;
use flatpol::rational::{binomial, factorial, Q};
use flatpol::sampling::rng_from_seed;
use flatpol::subset::Subset;
use flatpol::unipoly::is_log_concave;

fn catalog() -> Vec<(&'static str, Matroid)> {
    vec![
        ("U(2,3)", Matroid::uniform(2, 3).unwrap()),
        ("U(3,3)", Matroid::uniform(3, 3).unwrap()),
        ("U(3,4)", Matroid::uniform(3, 4).unwrap()),
        ("M(K4)", Matroid::graphic(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()),
        ("F7", Matroid::fano()),
    ]
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

// Brute force from the bases alone: rank by maximal basis intersection,
// flats as rank-closed subsets, Möbius by the defining recursion.
struct Oracle {
    rank: usize,
    flats: Vec<(Subset, usize)>,
    mu_from_bottom: Vec<i64>,
}

impl Oracle {
    fn new(m: &Matroid) -> Self {
        let n = m.ground_size();
        let rank_of = |s: Subset| m.bases().iter().map(|b| b.intersection(s).len()).max().unwrap();
        let mut flats: Vec<(Subset, usize)> = Subset::full(n)
            .subsets()
            .filter(|&s| {
                let r = rank_of(s);
                (0..n).filter(|&e| !s.contains(e)).all(|e| rank_of(s.with(e)) > r)
            })
            .map(|s| (s, rank_of(s)))
            .collect();
        flats.sort_by_key(|&(s, r)| (r, s.0));
        let mut mu = vec![0i64; flats.len()];
        for j in 0..flats.len() {
            if j == 0 {
                mu[0] = 1;
                continue;
            }
            let below: i64 = (0..j)
                .filter(|&i| flats[i].0.is_proper_subset(flats[j].0))
                .map(|i| mu[i])
                .sum();
            mu[j] = -below;
        }
        Oracle {
            rank: rank_of(Subset::full(n)),
            flats,
            mu_from_bottom: mu,
        }
    }

    /// Coefficients low to high of `Σ_F μ(∅,F) t^{r − r(F)}`.
    fn chi(&self) -> Vec<i64> {
        let mut c = vec![0i64; self.rank + 1];
        for (k, &(_, r)) in self.flats.iter().enumerate() {
            c[self.rank - r] += self.mu_from_bottom[k];
        }
        c
    }

    /// `χ / (t − 1)` by synthetic division; panics on a remainder.
    fn reduced(&self) -> Vec<i64> {
        let chi = self.chi();
        let n = chi.len() - 1;
        let mut q = vec![0i64; n];
        let mut carry = 0;
        for k in (1..=n).rev() {
            carry += chi[k];
            q[k - 1] = carry;
        }
        assert_eq!(carry + chi[0], 0, "remainder");
        q
    }
}

fn to_ints(coeffs: &[Q]) -> Vec<i64> {
    coeffs.iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn abs_from_top(reduced: &[i64]) -> Vec<Q> {
    reduced.iter().rev().map(|c| qi(c.abs())).collect()
}

fn criterion_1() -> Result<String, String> {
    for (name, m) in catalog() {
        let oracle = Oracle::new(&m);
        let chi = m.characteristic_polynomial().map_err(|e| e.to_string())?;
        let reduced = m.reduced_characteristic_polynomial(0).map_err(|e| e.to_string())?;
        if trim(to_ints(chi.coeffs())) != trim(oracle.chi()) {
            return Err(format!("{name}: χ = {chi}, oracle {:?}", oracle.chi()));
        }
        if trim(to_ints(reduced.coeffs())) != trim(oracle.reduced()) {
            return Err(format!("{name}: χ̄ = {reduced}, oracle {:?}", oracle.reduced()));
        }
        let product = &flatpol::unipoly::UniPoly::t_minus_one() * &reduced;
        if product != chi {
            return Err(format!("{name}: (t − 1)·χ̄ ≠ χ"));
        }
    }
    Ok("χ and χ̄ match the brute-force Möbius oracle; χ = (t − 1)·χ̄".into())
}

fn criterion_2() -> Result<String, String> {
    let mut notes = Vec::new();
    for (name, m) in catalog() {
        let a = abs_from_top(&Oracle::new(&m).reduced());
        let lib = m.reduced_characteristic_polynomial(0).unwrap().abs_coeffs_from_top();
        if a != lib || !is_log_concave(&lib) {
            return Err(format!("{name}: coefficients {lib:?} not log-concave"));
        }
        for k in 1..a.len().saturating_sub(1) {
            if &a[k] * &a[k] < &a[k - 1] * &a[k + 1] {
                return Err(format!("{name}: a_{k}² < a_{}a_{}", k - 1, k + 1));
            }
        }
        if a.len() == 3 {
            notes.push(format!("{name}: {} ≥ {}", &a[1] * &a[1], &a[0] * &a[2]));
        }
    }
    Ok(format!("log-concave absolute coefficients ({})", notes.join(", ")))
}

fn criterion_3() -> Result<String, String> {
    let mut checked = 0;
    for (name, m) in catalog() {
        let oracle = Oracle::new(&m);
        let b = abs_from_top(&oracle.reduced());
        let d = m.full_rank() - 1;
        let lattice = m.flats_lattice().unwrap();
        let mut cache = PolCache::new(lattice.poset());
        let coords = cache.coords(lattice.bottom(), lattice.top()).unwrap();
        let pol = cache.pol(lattice.bottom(), lattice.top()).unwrap();
        let dirs = [
            cache.restrict(lattice.bottom(), lattice.top(), &alpha(&coords)).unwrap(),
            cache.restrict(lattice.bottom(), lattice.top(), &beta(&coords)).unwrap(),
        ];
        let st = named_vars(&["s", "t"]);
        let f = pol
            .restrict_to_named_directions(&dirs, &st)
            .unwrap()
            .scale(&Q::from_integer(factorial(d)));
        for i in 0..m.ground_size() {
            if m.is_loop(i) {
                continue;
            }
            // Σ_{F ∌ i, F ≠ E} C(d, r(F)) |μ(∅,F)| s^{d − r(F)} t^{r(F)}
            let mut expected: HashMap<usize, i64> = HashMap::new();
            for (k, &(s, r)) in oracle.flats.iter().enumerate() {
                if r < oracle.rank && !s.contains(i) {
                    *expected.entry(r).or_default() += oracle.mu_from_bottom[k].abs();
                }
            }
            for k in 0..=d {
                let want = Q::from_integer(binomial(d, k) * BigInt::from(expected.get(&k).copied().unwrap_or(0)));
                if f.coeff(&[(d - k) as u16, k as u16]) != want {
                    return Err(format!("{name}, i = {i}: coefficient of s^{}t^{k}", d - k));
                }
            }
            let lib = cache
                .alpha_beta_bivariate(lattice.bottom(), lattice.top(), i)
                .map_err(|e| format!("{name}, i = {i}: {e}"))?;
            if lib != f {
                return Err(format!("{name}, i = {i}: library bridge differs"));
            }
            checked += 1;
        }
        if normalized_bivariate_coeffs(&f, d) != b {
            return Err(format!("{name}: normalized coefficients differ from |b_k|"));
        }
    }
    Ok(format!("(r−1)!·pol(sα + tβ) equals the binomial-Möbius sum for {checked} (matroid, i) pairs"))
}

fn criterion_4() -> Result<String, String> {
    let mut intervals = 0;
    for (name, m) in catalog() {
        let lattice = m.flats_lattice().unwrap();
        let mu = lattice.mobius().clone();
        let mut cache = PolCache::new(lattice.poset());
        for (a, b) in lattice.strict_pairs().collect::<Vec<_>>() {
            let d = lattice.d(a, b).unwrap();
            let coords = cache.coords(a, b).unwrap();
            let fact = Q::from_integer(factorial(d));
            let pa = cache.eval_at(a, b, &alpha(&coords)).unwrap();
            let pb = cache.eval_at(a, b, &beta(&coords)).unwrap();
            if pa != Q::from_integer(1.into()) / &fact || pb != qi(mu.get(a, b).abs()) / &fact {
                return Err(format!("{name} [{}, {}]: pol(α) = {pa}, pol(β) = {pb}", lattice.element(a), lattice.element(b)));
            }
            intervals += 1;
        }
    }
    Ok(format!("pol(α) = 1/d! and pol(β) = |μ|/d! on {intervals} intervals"))
}

fn criterion_5() -> Result<String, String> {
    let (mut derivative, mut lineality, mut squares) = (0, 0, 0);
    for (name, m) in catalog() {
        let lattice = m.flats_lattice().unwrap();
        let mut cache = PolCache::new(lattice.poset());
        for (a, b) in lattice.strict_pairs().collect::<Vec<_>>() {
            let d = lattice.d(a, b).unwrap();
            let here = format!("{name} [{}, {}]", lattice.element(a), lattice.element(b));
            if d <= 4 {
                if let Some(f) = cache.derivative_identity_witness(a, b).unwrap() {
                    return Err(format!("{here}: ∂ identity fails at {f}"));
                }
                derivative += 1;
            }
            if !cache
                .check_lineality_invariance(a, b, 50, (a * 1000 + b) as u64, Execution::Parallel)
                .unwrap()
            {
                return Err(format!("{here}: lineality fails"));
            }
            lineality += 1;
            if d == 2 {
                if !cache.check_rank_two_squares(a, b).unwrap() {
                    return Err(format!("{here}: sum-of-squares identity fails"));
                }
                squares += 1;
            }
        }
    }
    Ok(format!(
        "∂ identity on {derivative} intervals, lineality (50 pairs) on {lineality}, sum of squares on {squares}"
    ))
}

fn criterion_6() -> Result<String, String> {
    let mut samples = 0;
    for (seed, (name, m)) in catalog().into_iter().enumerate() {
        let lattice = m.flats_lattice().unwrap();
        let mut cache = PolCache::new(lattice.poset());
        let cert = certify_sampled(&mut cache, lattice.bottom(), lattice.top(), 20, seed as u64 + 1, Execution::Parallel)
            .map_err(|e| format!("{name}: {e}"))?;
        if let Some(i) = cert.first_failure() {
            return Err(format!("{name}: sample {i} fails: {:?}", cert.samples[i]));
        }
        if cert.d >= 2 && cert.samples.iter().any(|s| s.inertia.is_none_or(|t| t.n_plus != 1)) {
            return Err(format!("{name}: missing inertia"));
        }
        samples += cert.samples.len();
    }
    Ok(format!("{samples} sampled tuples pass (P) > 0 and (H) n_plus = 1"))
}

fn criterion_7() -> Result<String, String> {
    let mut rng = rng_from_seed(7);
    let (mut compared, mut skipped) = (0, 0);
    for trial in 0..100 {
        let n = rng.gen_range(1..=10);
        let mut entries = vec![Q::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let x = Q::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=6).into());
                entries[i * n + j] = x.clone();
                entries[j * n + i] = x;
            }
        }
        let exact = SymMatrix::new(n, entries).unwrap();
        let float = DMatrix::from_fn(n, n, |i, j| exact.get(i, j).to_f64().unwrap());
        let eigen = float.symmetric_eigenvalues();
        if eigen.iter().any(|l| l.abs() <= 1e-9) {
            skipped += 1;
            continue;
        }
        let plus = eigen.iter().filter(|&&l| l > 0.0).count();
        let t = inertia(&exact);
        if (t.n_plus, t.n_zero, t.n_minus) != (plus, 0, n - plus) {
            return Err(format!("matrix {trial} (n = {n}): exact {t:?}, float {plus} positive"));
        }
        compared += 1;
    }
    Ok(format!("exact inertia matches the float eigensolver on {compared} matrices ({skipped} near-singular skipped)"))
}

fn criterion_8() -> Result<String, String> {
    let mut checked = 0;
    for (name, m) in catalog() {
        let lattice = m.flats_lattice().unwrap();
        let mut cache = PolCache::new(lattice.poset());
        let (k, l) = (lattice.bottom(), lattice.top());
        let mut pairs = vec![(k, l)];
        if name == "F7" {
            pairs.extend(
                lattice
                    .strict_pairs()
                    .filter(|&(a, b)| (a, b) != (k, l) && lattice.d(a, b).unwrap() <= 2),
            );
        }
        for (a, b) in pairs {
            let here = format!("{name} [{}, {}]", lattice.element(a), lattice.element(b));
            let ring = build_chow(lattice.poset(), a, b).map_err(|e| format!("{here}: {e}"))?;
            if ring.graded_dims().last() != Some(&1) {
                return Err(format!("{here}: top piece {:?}", ring.graded_dims()));
            }
            let report = verify_vol_eq_pol(&mut cache, a, b).map_err(|e| format!("{here}: {e}"))?;
            if !report.equal {
                return Err(format!("{here}: {}", report.witness.unwrap_or_default()));
            }
            checked += 1;
        }
    }
    Ok(format!("vol = pol with one-dimensional top piece and consistent flags on {checked} intervals"))
}

fn criterion_9() -> Result<String, String> {
    let mut weisner = 0;
    for (name, m) in catalog() {
        let lattice = m.flats_lattice().unwrap();
        let p = lattice.poset();
        let (k, l) = (lattice.bottom(), lattice.top());
        if !p.satisfies_flat_axioms(k, l) {
            return Err(format!("{name}: flat axioms"));
        }
        if !(p.is_one_balanced() && p.is_balanced() && p.is_semimodular() && p.is_interval_connected() && p.is_lattice()) {
            return Err(format!("{name}: balance, semimodularity or connectivity"));
        }
        let mu = lattice.mobius();
        for x in 0..p.len() {
            for y in 0..p.len() {
                let Some(r) = p.rank(x, y) else { continue };
                let v = mu.get(x, y);
                if v == 0 || (v > 0) != (r % 2 == 0) {
                    return Err(format!("{name}: μ({}, {}) = {v}", p.element(x), p.element(y)));
                }
                for &a in p.upper_covers(x) {
                    if p.lt(a, y) {
                        if !weisner_check(p, mu, x, a, y).unwrap() {
                            return Err(format!("{name}: Weisner at {}, {}, {}", p.element(x), p.element(a), p.element(y)));
                        }
                        weisner += 1;
                    }
                }
            }
        }
    }
    Ok(format!("flat axioms, balance, semimodularity, connectivity, sign alternation; Weisner on {weisner} triples"))
}

fn criterion_10() -> Result<String, String> {
    let mut restrictions = 0;
    for (seed, (name, m)) in catalog().into_iter().enumerate() {
        let lattice = m.flats_lattice().unwrap();
        let (k, l) = (lattice.bottom(), lattice.top());
        let mut cache = PolCache::new(lattice.poset());
        let pol = cache.pol(k, l).unwrap();
        let d = lattice.d(k, l).unwrap();
        let coords = cache.coords(k, l).unwrap();
        let points: Vec<IntervalVector> = sample_tuples(&cache, k, l, 3, 4, 100 + seed as u64)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        let (a, b, v) = (alpha(&coords), beta(&coords), interior_point(&coords));
        let mut families: Vec<Vec<&IntervalVector>> = vec![vec![&a, &b], vec![&a, &b, &v]];
        for chunk in points.chunks(3) {
            families.push(vec![&chunk[0], &chunk[1]]);
            families.push(chunk.iter().collect());
        }
        for family in families {
            let dirs: Vec<Vec<Q>> = family.iter().map(|x| direction_on_vars(&pol, x).unwrap()).collect();
            let f = pol.restrict_to_directions(&dirs).unwrap();
            if !is_lorentzian_orthant(&f).map_err(|e| e.to_string())? {
                return Err(format!("{name}: restriction to {} directions is not Lorentzian: {f}", family.len()));
            }
            restrictions += 1;
        }
        let ab = pol
            .restrict_to_directions(&[direction_on_vars(&pol, &a).unwrap(), direction_on_vars(&pol, &b).unwrap()])
            .unwrap();
        let coeffs = normalized_bivariate_coeffs(&ab, d);
        if !is_log_concave(&coeffs) || coeffs.iter().any(|c| !c.is_positive()) {
            return Err(format!("{name}: (α, β) coefficients {coeffs:?}"));
        }
    }
    Ok(format!("{restrictions} bivariate/trivariate restrictions are Lorentzian; (α, β) coefficients log-concave"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<String, String>, Option<Duration>); 10] = [
        ("catalog characteristic polynomials", criterion_1, Some(Duration::from_secs(10))),
        ("log-concavity of reduced coefficients", criterion_2, None),
        ("bivariate restriction and Möbius expansion", criterion_3, None),
        ("special values at α and β", criterion_4, None),
        ("derivative, lineality and sum-of-squares identities", criterion_5, None),
        ("sampled Lorentzian certification", criterion_6, None),
        ("exact inertia against a float eigensolver", criterion_7, None),
        ("Chow-ring volume equals pol", criterion_8, Some(Duration::from_secs(300))),
        ("poset predicates, Weisner, Möbius signs", criterion_9, None),
        ("orthant-Lorentzian restrictions", criterion_10, None),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(max)) if elapsed > max => Err(format!("took {elapsed:.2?}, limit {max:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
