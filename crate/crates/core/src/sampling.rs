//! Exact random draws from rational distributions.
//!
//! Rejection sampling on integer ranges keeps every draw exactly faithful
//! to its rational probability; nothing is approximated through floats.

use crate::rational::Rational;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// Uniform integer in `[0, bound)`.
pub(crate) fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    debug_assert!(!bound.is_zero());
    if let Some(small) = bound.to_u64() {
        return BigUint::from(rng.random_range(0..small));
    }
    let bits = bound.bits();
    let chunks = bits.div_ceil(32) as usize;
    let top_mask: u32 = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32)) - 1
    };
    loop {
        let mut words: Vec<u32> = (0..chunks).map(|_| rng.next_u32()).collect();
        words[chunks - 1] &= top_mask;
        let candidate = BigUint::new(words);
        if candidate < *bound {
            return candidate;
        }
    }
}

/// Bernoulli draw with success probability `q` in `[0, 1]`.
pub(crate) fn bernoulli_exact<R: Rng + ?Sized>(rng: &mut R, q: &Rational) -> bool {
    debug_assert!(*q >= Rational::zero() && *q <= Rational::one());
    let numer = q.numer().to_biguint().expect("q is nonnegative");
    let denom = q.denom().to_biguint().expect("denominators are positive");
    uniform_below(rng, &denom) < numer
}

/// Categorical draw over positive rational weights summing to 1.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, weights: &[Rational]) -> usize {
    let denominator = weights.iter().fold(BigUint::one(), |acc, w| {
        acc.lcm(&w.denom().to_biguint().expect("positive denominator"))
    });
    let scaled: Vec<BigUint> = weights
        .iter()
        .map(|w| {
            w.numer().to_biguint().expect("nonnegative weight") * &denominator
                / w.denom().to_biguint().expect("positive denominator")
        })
        .collect();
    debug_assert_eq!(
        scaled.iter().sum::<BigUint>(),
        denominator,
        "weights must sum to 1"
    );
    let draw = uniform_below(rng, &denominator);
    let mut acc = BigUint::zero();
    for (i, w) in scaled.iter().enumerate() {
        acc += w;
        if draw < acc {
            return i;
        }
    }
    weights.len() - 1
}
