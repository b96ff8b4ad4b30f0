//! Deterministic parameter sampling. Every randomized suite draws from a
//! ChaCha8 stream seeded with a caller-supplied 64-bit seed, so a report is
//! a pure function of (inputs, seed).

use crate::scalar::QuadScalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A strictly positive rational p/q with p, q uniform in [1, 100].
pub fn positive_rational(rng: &mut ChaCha8Rng) -> QuadScalar {
    let p = rng.gen_range(1..=100i64);
    let q = rng.gen_range(1..=100i64);
    QuadScalar::from_ratio(p, q)
}

pub fn positive_params(rng: &mut ChaCha8Rng, count: usize) -> Vec<QuadScalar> {
    (0..count).map(|_| positive_rational(rng)).collect()
}

/// A rational of either sign (zero excluded), for falsification sweeps.
pub fn signed_rational(rng: &mut ChaCha8Rng) -> QuadScalar {
    let r = positive_rational(rng);
    if rng.gen_bool(0.5) {
        -&r
    } else {
        r
    }
}

/// An element a + b*sqrt(2) with both parts signed rationals; b is zero half
/// the time so purely rational candidates stay well represented.
pub fn quad_sample(rng: &mut ChaCha8Rng) -> QuadScalar {
    let a = signed_rational(rng);
    if rng.gen_bool(0.5) {
        a
    } else {
        &a + &(&QuadScalar::sqrt2() * &signed_rational(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a: Vec<QuadScalar> = positive_params(&mut rng(42), 8);
        let b: Vec<QuadScalar> = positive_params(&mut rng(42), 8);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.is_positive() && t.is_rational()));

        let c = positive_params(&mut rng(43), 8);
        assert_ne!(a, c);
    }

    #[test]
    fn signed_and_quad_samples_are_nonzero() {
        let mut r = rng(7);
        for _ in 0..50 {
            assert!(!signed_rational(&mut r).is_zero());
            assert!(!quad_sample(&mut r).is_zero());
        }
    }
}
