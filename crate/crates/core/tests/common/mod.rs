#![allow(dead_code)]

use blindspot::distributions::FiniteDistribution;
use blindspot::rational::ratio;
use blindspot::Rational;
use proptest::prelude::*;

/// Counts with at least one positive entry.
pub fn counts(len: std::ops::RangeInclusive<usize>, max: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..=max, len).prop_filter("needs positive mass", |c| c.iter().any(|&x| x > 0))
}

pub fn positive_counts(len: std::ops::RangeInclusive<usize>, max: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1..=max, len)
}

pub fn from_counts(counts: &[i64]) -> FiniteDistribution<Rational> {
    let total: i64 = counts.iter().sum();
    FiniteDistribution::new(counts.iter().map(|&c| ratio(c, total)).collect()).unwrap()
}

/// Prior and posterior of the same length; small integers make ratio
/// collisions common.
pub fn pair(
    len: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (FiniteDistribution<Rational>, FiniteDistribution<Rational>)> {
    len.prop_flat_map(|n| (positive_counts(n..=n, 4), counts(n..=n, 4)))
        .prop_map(|(p, q)| (from_counts(&p), from_counts(&q)))
}

/// Labels in `0..n` for a random partition of `n` points.
pub fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, n)
}

/// Pairwise cross-multiplication test of ratio distinctness.
pub fn ratios_distinct(p: &[Rational], q: &[Rational]) -> bool {
    (0..p.len()).all(|j| (0..j).all(|i| &q[i] * &p[j] != &q[j] * &p[i]))
}
