use num_traits::Signed;

use flatpol::chow::{build_chow, verify_vol_eq_pol, ChowError};
use flatpol::cone::{alpha, beta, is_modular, is_strictly_submodular, effective_decompose};
use flatpol::exec::Execution;
use flatpol::lorentz::{certify_sampled, direction_on_vars, sample_tuples};
use flatpol::matroid::Matroid;
use flatpol::pol::PolCache;
use flatpol::poly::MultiPoly;
use flatpol::rational::{factorial, Q};

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[test]
fn boolean_rank_four() {
    let lattice = Matroid::uniform(4, 4).unwrap().flats_lattice().unwrap();
    let (k, l) = (lattice.bottom(), lattice.top());
    let mut cache = PolCache::new(lattice.poset());
    let pol = cache.pol(k, l).unwrap();
    assert_eq!(pol.degree(), Some(3));
    assert!(pol.is_homogeneous());
    assert_eq!(cache.derivative_identity_witness(k, l).unwrap(), None);
    assert!(cache.incomparable_mixed_partials_vanish(k, l).unwrap());

    let coords = cache.coords(k, l).unwrap();
    assert_eq!(cache.eval_at(k, l, &alpha(&coords)).unwrap(), Q::new(1.into(), 6.into()));
    // |μ| = 1 for a Boolean lattice
    assert_eq!(cache.eval_at(k, l, &beta(&coords)).unwrap(), Q::new(1.into(), 6.into()));

    let ring = build_chow(lattice.poset(), k, l).unwrap();
    assert_eq!(ring.graded_dims(), vec![1, 11, 11, 1]);
    assert!(verify_vol_eq_pol(&mut cache, k, l).unwrap().equal);

    let cert = certify_sampled(&mut cache, k, l, 6, 4, Execution::Parallel).unwrap();
    assert!(cert.verdict);
    assert!(cert.samples.iter().all(|s| s.inertia.unwrap().n_plus == 1));
}

#[test]
fn uniform_four_five() {
    let m = Matroid::uniform(4, 5).unwrap();
    let lattice = m.flats_lattice().unwrap();
    let (k, l) = (lattice.bottom(), lattice.top());
    let mut cache = PolCache::new(lattice.poset());
    assert_eq!(cache.derivative_identity_witness(k, l).unwrap(), None);
    let coords = cache.coords(k, l).unwrap();
    let mu = lattice.mobius().get(k, l).abs();
    assert_eq!(mu, 4);
    assert_eq!(
        cache.eval_at(k, l, &beta(&coords)).unwrap(),
        qi(mu) / Q::from_integer(factorial(3))
    );
    assert!(cache.check_lineality_invariance(k, l, 10, 9, Execution::Parallel).unwrap());
    let cert = certify_sampled(&mut cache, k, l, 4, 2, Execution::Parallel).unwrap();
    assert!(cert.verdict);
    assert_eq!(
        build_chow(lattice.poset(), k, l).unwrap_err(),
        ChowError::SizeLimitExceeded { open: 25, d: 3 }
    );
}

#[test]
fn euler_identity_and_positive_restrictions() {
    let lattice = Matroid::uniform(4, 4).unwrap().flats_lattice().unwrap();
    let (k, l) = (lattice.bottom(), lattice.top());
    let mut cache = PolCache::new(lattice.poset());
    let pol = cache.pol(k, l).unwrap();
    let vars = pol.vars().clone();
    let euler = (0..pol.nvars()).fold(MultiPoly::zero(&vars), |acc, i| {
        &acc + &(&MultiPoly::var(&vars, i) * &pol.partial(i))
    });
    assert_eq!(euler, pol.scale(&qi(3)));

    for tuple in sample_tuples(&cache, k, l, 3, 5, 21).unwrap() {
        let dirs: Vec<Vec<Q>> = tuple.iter().map(|v| direction_on_vars(&pol, v).unwrap()).collect();
        let restricted = pol.restrict_to_directions(&dirs).unwrap();
        assert_eq!(restricted.num_terms(), 10);
        assert!(restricted.terms().all(|(_, c)| c.is_positive()));
    }
}

#[test]
fn effective_shift_of_sampled_points() {
    let lattice = Matroid::fano().flats_lattice().unwrap();
    let (k, l) = (lattice.bottom(), lattice.top());
    let cache = PolCache::new(lattice.poset());
    for tuple in sample_tuples(&cache, k, l, 2, 6, 8).unwrap() {
        for y in tuple {
            assert!(is_strictly_submodular(&y));
            let dec = effective_decompose(&y).unwrap();
            assert!(is_modular(&dec.shift));
            assert!((&y + &dec.shift).is_positive());
            assert!(!dec.epsilon.is_negative());
        }
    }
}
