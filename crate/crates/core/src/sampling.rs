//! Seeded random rationals, modular vectors and strictly submodular points.

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::cone::{interior_point, is_strictly_submodular, modular_from_weights, IntervalCoords, IntervalVector};
use crate::rational::Q;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `a/b` with `|a| ≤ bound`, `1 ≤ b ≤ max_den`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Q {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    Q::new(num.into(), den.into())
}

pub fn random_vector<R: Rng>(rng: &mut R, coords: &Arc<IntervalCoords>, bound: i64, max_den: i64) -> IntervalVector {
    let values: Vec<Q> = (0..coords.dim()).map(|_| random_rational(rng, bound, max_den)).collect();
    let mut v = IntervalVector::zero(coords);
    for (s, x) in coords.subsets().iter().zip(values) {
        v.set(*s, x).expect("own coordinate");
    }
    v
}

/// Random element of `M_K^L`: integer-ish element weights summing to zero.
pub fn random_modular<R: Rng>(rng: &mut R, coords: &Arc<IntervalCoords>, bound: i64) -> IntervalVector {
    let m = coords.free().len();
    let mut weights: Vec<Q> = (0..m).map(|_| random_rational(rng, bound, 3)).collect();
    if m > 0 {
        let total: Q = weights.iter().sum();
        weights[m - 1] -= total;
    }
    modular_from_weights(coords, &weights)
}

/// A strictly submodular point: a random positive multiple of the interior
/// point, bounded noise, and a random modular shift (which may push
/// coordinates negative). Noise is halved until membership holds.
pub fn random_cone_point<R: Rng>(rng: &mut R, coords: &Arc<IntervalCoords>) -> IntervalVector {
    let v = interior_point(coords);
    let scale = Q::new(rng.gen_range(2..=12).into(), rng.gen_range(2..=4).into());
    let shift = random_modular(rng, coords, 4);
    let mut noise = random_vector(rng, coords, 2, 6);
    loop {
        let y = &(&v.scale(&scale) + &noise) + &shift;
        if is_strictly_submodular(&y) {
            return y;
        }
        if noise.values().iter().all(Zero::is_zero) {
            unreachable!("interior point multiple is strictly submodular");
        }
        noise = noise.scale(&Q::new(1.into(), 2.into()));
    }
}

/// `count` tuples of `size` cone points. The first tuple repeats the
/// canonical interior point.
pub fn direction_tuples(coords: &Arc<IntervalCoords>, size: usize, count: usize, seed: u64) -> Vec<Vec<IntervalVector>> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(vec![interior_point(coords); size]);
    }
    while out.len() < count {
        out.push((0..size).map(|_| random_cone_point(&mut rng, coords)).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::is_modular;
    use crate::subset::Subset;

    #[test]
    fn generated_points_are_in_the_cone() {
        let coords = IntervalCoords::new(Subset::EMPTY, Subset::full(4)).unwrap();
        let mut rng = rng_from_seed(7);
        for _ in 0..30 {
            assert!(is_strictly_submodular(&random_cone_point(&mut rng, &coords)));
            assert!(is_modular(&random_modular(&mut rng, &coords, 5)));
        }
    }

    #[test]
    fn tuples_are_seeded() {
        let coords = IntervalCoords::new(Subset::EMPTY, Subset::full(3)).unwrap();
        let a = direction_tuples(&coords, 2, 5, 11);
        let b = direction_tuples(&coords, 2, 5, 11);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert_eq!(a[0][0], interior_point(&coords));
        assert_ne!(direction_tuples(&coords, 2, 5, 12), a);
    }
}
