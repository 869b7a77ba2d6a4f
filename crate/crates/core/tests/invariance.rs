use proptest::prelude::*;

use flatpol::cone::{modular_from_weights, IntervalVector};
use flatpol::lorentz::inertia;
use flatpol::matrix::SymMatrix;
use flatpol::matroid::Matroid;
use flatpol::pol::PolCache;
use flatpol::rational::Q;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn arb_q() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pol_is_blind_to_modular_shifts(
        vals in proptest::collection::vec(arb_q(), 16),
        w in proptest::collection::vec(arb_q(), 3),
        c in arb_q(),
    ) {
        let k4 = Matroid::graphic(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let lattice = k4.flats_lattice().unwrap();
        let (k, l) = (lattice.bottom(), lattice.top());
        let mut cache = PolCache::new(lattice.poset());
        let coords = cache.coords(k, l).unwrap();
        let y = IntervalVector::from_fn(&coords, |s| vals[s.0 as usize % vals.len()].clone());
        // weights must sum to zero
        let mut weights = w.clone();
        weights.extend(std::iter::repeat_n(Q::from_integer(0.into()), coords.free().len() - 4));
        weights.push(-w.iter().sum::<Q>());
        let shift = modular_from_weights(&coords, &weights);
        let base = cache.eval_at(k, l, &y).unwrap();
        prop_assert_eq!(cache.eval_at(k, l, &(&y + &shift)).unwrap(), base.clone());
        prop_assert_eq!(cache.eval_at(k, l, &y.scale(&c)).unwrap(), base * &c * &c);
    }

    #[test]
    fn inertia_survives_relabeling(
        vals in proptest::collection::vec(arb_q(), 10),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let entry = |i: usize, j: usize| {
            let (i, j) = (i.min(j), i.max(j));
            vals[i * 4 - i * (i + 1) / 2 + j].clone()
        };
        let a = SymMatrix::from_fn(4, entry).unwrap();
        let b = SymMatrix::from_fn(4, |i, j| entry(perm[i], perm[j])).unwrap();
        let ia = inertia(&a);
        prop_assert_eq!(ia, inertia(&b));
        prop_assert_eq!(ia.n_plus + ia.n_minus + ia.n_zero, 4);
    }
}
