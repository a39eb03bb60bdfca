//! Exact evaluation of the scalar (restricted) partition function
//! `W(s, d)`: the number of ways to write `s` as a nonnegative integer
//! combination of positive generators `d`.
//!
//! - [`spf`]: dynamic programming over the generating-function product,
//!   one pass per generator, table of size `s + 1`.
//! - [`spf_signed`]: the signed-generator normalization
//!   `(1 - t^-a)^-1 = -t^a (1 - t^a)^-1`, turning a query with negative
//!   generators into `(-1)^K` times a plain query with shifted argument.
//! - [`spf_scaled`]: `W(s, g*d) = W(s/g, d)` when `g | s`, else zero.
//! - [`SpfCache`]: memoized tables keyed by generator multiset, for grid
//!   sweeps that evaluate the same generator sets at many arguments.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::matrix::{Count, SignedCount};

/// A scalar partition evaluation request: integer argument (may be
/// negative) plus nonzero signed generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSpfQuery {
    pub argument: i128,
    pub generators: Vec<i128>,
}

impl SignedSpfQuery {
    /// Panics if any generator is zero; a zero generator corresponds to a
    /// divergent factor and can only arise from a caller bug.
    pub fn new(argument: i128, generators: Vec<i128>) -> Self {
        assert!(
            generators.iter().all(|&g| g != 0),
            "signed partition query must have nonzero generators"
        );
        SignedSpfQuery {
            argument,
            generators,
        }
    }

    /// Apply the signed-generator normalization: with `K` negative
    /// generators, the query equals `(-1)^K * W(argument + sum(neg), |d|)`.
    pub fn normalized(&self) -> NormalizedQuery {
        let mut shift = 0i128;
        let mut negatives = 0u32;
        let mut abs = Vec::with_capacity(self.generators.len());
        for &g in &self.generators {
            if g < 0 {
                shift += g;
                negatives += 1;
            }
            abs.push(g.abs());
        }
        NormalizedQuery {
            sign: if negatives.is_multiple_of(2) { 1 } else { -1 },
            argument: self.argument + shift,
            generators: abs,
        }
    }
}

/// The positive-generator form of a [`SignedSpfQuery`]: the query value is
/// `sign * W(argument, generators)` with all generators positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedQuery {
    pub sign: i64,
    pub argument: i128,
    pub generators: Vec<i128>,
}

/// Number of nonnegative integer solutions of `sum x_i d_i = s`.
///
/// Returns 0 for `s < 0`; for empty `d` the empty product leaves exactly
/// the constant term, so the count is 1 iff `s = 0`. Repeated generators
/// are distinct parts. All `d_i` must be >= 1.
pub fn spf(s: i128, d: &[i128]) -> Count {
    assert!(d.iter().all(|&g| g >= 1), "generators must be positive");
    if s < 0 {
        return Count::zero();
    }
    if s == 0 {
        return Count::one();
    }
    let table = dp_table(s as usize, d);
    Count::from(table[s as usize].clone())
}

fn dp_table(s: usize, d: &[i128]) -> Vec<BigUint> {
    let mut dp = vec![BigUint::zero(); s + 1];
    dp[0] = BigUint::one();
    for &g in d {
        if g as u128 > s as u128 {
            continue;
        }
        let g = g as usize;
        for v in g..=s {
            let prev = dp[v - g].clone();
            dp[v] += prev;
        }
    }
    dp
}

/// Evaluate a signed query per the normalization identity. Defined formally
/// even when the shifted argument is negative (the result is then zero);
/// reduction sums rely on such out-of-chamber terms vanishing.
pub fn spf_signed(q: &SignedSpfQuery) -> SignedCount {
    let n = q.normalized();
    spf(n.argument, &n.generators)
        .to_signed()
        .scaled_i64(n.sign)
}

/// `W(s / g, d)` when `g` divides `s`, else 0. Requires `g >= 1`.
pub fn spf_scaled(s: i128, g: i128, d: &[i128]) -> Count {
    assert!(g >= 1, "scale must be positive");
    if s % g != 0 {
        return Count::zero();
    }
    spf(s / g, d)
}

/// Memoized partition tables keyed by sorted generator list. Tables are
/// rebuilt with doubling growth when a larger argument arrives, so repeated
/// evaluation over a grid costs one DP pass per generator set.
#[derive(Default)]
pub struct SpfCache {
    tables: HashMap<Vec<i128>, Vec<BigUint>>,
}

impl SpfCache {
    pub fn new() -> Self {
        SpfCache::default()
    }

    /// Same result as [`spf`].
    pub fn eval(&mut self, s: i128, d: &[i128]) -> Count {
        assert!(d.iter().all(|&g| g >= 1), "generators must be positive");
        if s < 0 {
            return Count::zero();
        }
        let s = s as usize;
        let mut key: Vec<i128> = d.to_vec();
        key.sort_unstable();
        let table = self.tables.entry(key).or_default();
        if table.len() <= s {
            *table = dp_table(s.max(2 * table.len()), d);
        }
        Count::from(table[s].clone())
    }

    /// Same result as [`spf_signed`].
    pub fn eval_signed(&mut self, q: &SignedSpfQuery) -> SignedCount {
        let n = q.normalized();
        self.eval(n.argument, &n.generators)
            .to_signed()
            .scaled_i64(n.sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::spf_bruteforce;

    #[test]
    fn zero_argument_has_one_empty_partition() {
        assert_eq!(spf(0, &[3, 7]), Count::one());
        assert_eq!(spf(0, &[]), Count::one());
    }

    #[test]
    fn small_values() {
        assert_eq!(spf(5, &[1, 2]), Count::from(3u64));
        // enumerated by triple loop: (4,0,0),(2,1,0),(0,2,0),(1,0,1)
        assert_eq!(spf(4, &[1, 2, 3]), Count::from(4u64));
        assert_eq!(spf(-3, &[2]), Count::zero());
        assert_eq!(spf(1, &[]), Count::zero());
    }

    #[test]
    fn signed_normalization_examples() {
        // {L = 2r - rho, d = (-4,-1,5)} at (r,rho) = (10,4) collapses to
        // +W(11, {4,1,5})
        let q = SignedSpfQuery::new(2 * 10 - 4, vec![-4, -1, 5]);
        let n = q.normalized();
        assert_eq!((n.sign, n.argument), (1, 11));
        assert_eq!(n.generators, vec![4, 1, 5]);
        assert_eq!(spf_signed(&q), spf_bruteforce(11, &[1, 4, 5]).to_signed());

        let q = SignedSpfQuery::new(7, vec![3, 4]);
        assert_eq!(spf_signed(&q), SignedCount::from(1));

        let q = SignedSpfQuery::new(-1, vec![2]);
        assert_eq!(spf_signed(&q), SignedCount::zero());
    }

    #[test]
    fn signed_sign_comes_from_negative_count() {
        // one negative generator: K = 1, so the sign flips
        let q = SignedSpfQuery::new(5, vec![-2, 3]);
        let n = q.normalized();
        assert_eq!((n.sign, n.argument), (-1, 3));
        assert_eq!(spf_signed(&q), SignedCount::from(-1));
    }

    #[test]
    fn scaled_evaluation() {
        // oracle value: x1 + x2 + 3*x3 = 2 has (2,0,0),(1,1,0),(0,2,0)
        assert_eq!(spf_scaled(8, 4, &[1, 1, 3]), Count::from(3u64));
        assert_eq!(spf_scaled(7, 4, &[1, 1, 3]), Count::zero());
        assert_eq!(spf_scaled(0, 5, &[2, 3]), Count::one());
    }

    #[test]
    fn scaling_invariance() {
        for s in 0..30i128 {
            for g in 1..=5i128 {
                let d = [2, 3, 5];
                let gd: Vec<i128> = d.iter().map(|x| x * g).collect();
                assert_eq!(spf(g * s, &gd), spf(s, &d));
            }
        }
    }

    #[test]
    fn cache_matches_direct_evaluation() {
        let mut cache = SpfCache::new();
        for s in (0..60).rev() {
            assert_eq!(cache.eval(s, &[3, 1, 4]), spf(s, &[3, 1, 4]));
        }
        // permuted key hits the same table
        assert_eq!(cache.eval(17, &[4, 3, 1]), spf(17, &[1, 3, 4]));
        assert_eq!(cache.tables.len(), 1);
    }

    #[test]
    #[should_panic(expected = "nonzero generators")]
    fn zero_generator_is_rejected() {
        SignedSpfQuery::new(1, vec![2, 0]);
    }
}
