//! Finite, truncated and parametric probability distributions on countable index sets.
//!
//! Coordinates are zero-based throughout the library; the first coordinate
//! of a sequence `(q_1, q_2, ...)` lives at index 0.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// A distribution whose coordinates are all stored: a finite prefix and the
/// mass that lies beyond it.
pub trait Masses<T: Scalar> {
    fn prefix(&self) -> &[T];

    /// Total mass beyond the stored prefix; zero for finite distributions.
    fn tail_mass(&self) -> T;

    fn len(&self) -> usize {
        self.prefix().len()
    }

    fn is_empty(&self) -> bool {
        self.prefix().is_empty()
    }
}

/// Any source of a sequence of point masses `(p_1, p_2, ...)` that can report
/// an arbitrary finite head and the mass beyond it.
pub trait MassSequence<T: Scalar> {
    /// Number of explicitly available coordinates, or `None` if unbounded.
    fn available(&self) -> Option<usize>;

    /// The first `n` masses.
    fn head(&self, n: usize) -> Result<Vec<T>>;

    /// Total mass of coordinates `n, n+1, ...` (zero-based).
    fn mass_beyond(&self, n: usize) -> Result<T>;
}

fn check_available(n: usize, available: Option<usize>) -> Result<()> {
    match available {
        Some(a) if n > a => Err(Error::HorizonTooLarge { horizon: n, available: a }),
        _ => Ok(()),
    }
}

fn check_nonnegative<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| v.is_negative()) {
        Some(index) => Err(Error::NegativeEntry { index }),
        None => Ok(()),
    }
}

/// A probability vector on `{1, ..., n}`, `n >= 2`, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution<T> {
    probs: Vec<T>,
}

impl<T: Scalar> FiniteDistribution<T> {
    /// Validates that `values` is a probability vector of length at least 2.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len(), min: 2 });
        }
        check_nonnegative(&values)?;
        let total = sum(&values);
        if !total.is_unit_mass() {
            return Err(Error::NotNormalized { sum: format!("{total:?}") });
        }
        Ok(Self { probs: values })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|p| p.is_positive())
    }
}

impl<T: Scalar> Masses<T> for FiniteDistribution<T> {
    fn prefix(&self) -> &[T] {
        &self.probs
    }

    fn tail_mass(&self) -> T {
        T::zero()
    }
}

impl<T: Scalar> MassSequence<T> for FiniteDistribution<T> {
    fn available(&self) -> Option<usize> {
        Some(self.probs.len())
    }

    fn head(&self, n: usize) -> Result<Vec<T>> {
        check_available(n, self.available())?;
        Ok(self.probs[..n].to_vec())
    }

    fn mass_beyond(&self, n: usize) -> Result<T> {
        check_available(n, self.available())?;
        Ok(sum(&self.probs[n..]))
    }
}

/// Validates `values` as a finite distribution. Alias of [`FiniteDistribution::new`].
pub fn finite_from_rationals<T: Scalar>(values: Vec<T>) -> Result<FiniteDistribution<T>> {
    FiniteDistribution::new(values)
}

/// Rescales nonnegative weights to a probability vector.
pub fn normalize<T: Scalar>(values: &[T]) -> Result<FiniteDistribution<T>> {
    if values.len() < 2 {
        return Err(Error::TooShort { len: values.len(), min: 2 });
    }
    check_nonnegative(values)?;
    let total = sum(values);
    if total.is_zero() {
        return Err(Error::AllZero);
    }
    let probs = values.iter().map(|v| v.clone() / total.clone()).collect();
    Ok(FiniteDistribution { probs })
}

/// The head `(q_1, ..., q_N)` of a distribution on the positive integers,
/// together with the exact mass `1 - sum(prefix)` it leaves unassigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDistribution<T> {
    prefix: Vec<T>,
    tail_mass: T,
}

impl<T: Scalar> TruncatedDistribution<T> {
    pub fn new(prefix: Vec<T>, tail_mass: T) -> Result<Self> {
        if prefix.len() < 2 {
            return Err(Error::TooShort { len: prefix.len(), min: 2 });
        }
        check_nonnegative(&prefix)?;
        if tail_mass.is_negative() {
            return Err(Error::NegativeEntry { index: prefix.len() });
        }
        let total = sum(&prefix) + tail_mass.clone();
        if !total.is_unit_mass() {
            return Err(Error::NotNormalized { sum: format!("{total:?}") });
        }
        Ok(Self { prefix, tail_mass })
    }

    /// Takes the tail to be whatever the prefix leaves over.
    ///
    /// In float mode a leftover that is negative only by rounding is clamped to zero.
    pub fn from_prefix(prefix: Vec<T>) -> Result<Self> {
        let mut tail = T::one() - sum(&prefix);
        if tail.is_negative() && tail.abs() <= T::mass_slack() {
            tail = T::zero();
        }
        if tail.is_negative() {
            return Err(Error::NotNormalized { sum: format!("{:?}", T::one() - tail) });
        }
        Self::new(prefix, tail)
    }

    pub fn tail(&self) -> &T {
        &self.tail_mass
    }

    pub fn horizon(&self) -> usize {
        self.prefix.len()
    }

    /// Drops the tail when it is zero.
    pub fn to_finite(&self) -> Option<FiniteDistribution<T>> {
        if self.tail_mass.is_zero() {
            Some(FiniteDistribution { probs: self.prefix.clone() })
        } else {
            None
        }
    }
}

impl<T: Scalar> From<FiniteDistribution<T>> for TruncatedDistribution<T> {
    fn from(d: FiniteDistribution<T>) -> Self {
        Self { prefix: d.probs, tail_mass: T::zero() }
    }
}

impl<T: Scalar> Masses<T> for TruncatedDistribution<T> {
    fn prefix(&self) -> &[T] {
        &self.prefix
    }

    fn tail_mass(&self) -> T {
        self.tail_mass.clone()
    }
}

impl<T: Scalar> MassSequence<T> for TruncatedDistribution<T> {
    fn available(&self) -> Option<usize> {
        Some(self.prefix.len())
    }

    fn head(&self, n: usize) -> Result<Vec<T>> {
        check_available(n, self.available())?;
        Ok(self.prefix[..n].to_vec())
    }

    fn mass_beyond(&self, n: usize) -> Result<T> {
        check_available(n, self.available())?;
        Ok(sum(&self.prefix[n..]) + self.tail_mass.clone())
    }
}

/// Closed-form, strictly positive distributions on the positive integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParametricDistribution<T> {
    /// `p_i = (1 - r) r^(i-1)` for `i >= 1`.
    Geometric { ratio: T },
}

impl<T: Scalar> ParametricDistribution<T> {
    /// Mass at zero-based index `i`.
    pub fn mass(&self, i: usize) -> T {
        match self {
            Self::Geometric { ratio } => (T::one() - ratio.clone()) * num_traits::pow(ratio.clone(), i),
        }
    }
}

impl<T: Scalar> MassSequence<T> for ParametricDistribution<T> {
    fn available(&self) -> Option<usize> {
        None
    }

    fn head(&self, n: usize) -> Result<Vec<T>> {
        match self {
            Self::Geometric { ratio } => {
                let head_factor = T::one() - ratio.clone();
                let mut power = T::one();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(head_factor.clone() * power.clone());
                    power = power * ratio.clone();
                }
                Ok(out)
            }
        }
    }

    fn mass_beyond(&self, n: usize) -> Result<T> {
        match self {
            Self::Geometric { ratio } => Ok(num_traits::pow(ratio.clone(), n)),
        }
    }
}

/// The geometric family with ratio `r`, `0 < r < 1`.
pub fn geometric<T: Scalar>(r: T) -> Result<ParametricDistribution<T>> {
    if r <= T::zero() || r >= T::one() {
        return Err(Error::OutOfRange { value: format!("{r:?}"), expected: "(0, 1)" });
    }
    Ok(ParametricDistribution::Geometric { ratio: r })
}

/// Exact head of length `n` with the closed-form tail.
pub fn truncate<T: Scalar>(d: &ParametricDistribution<T>, n: usize) -> Result<TruncatedDistribution<T>> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let prefix = d.head(n)?;
    let tail_mass = d.mass_beyond(n)?;
    Ok(TruncatedDistribution { prefix, tail_mass })
}

/// The vector `q_i / p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile<T> {
    ratios: Vec<T>,
}

impl<T: Scalar> RatioProfile<T> {
    /// Ratios of the heads `q[..n] / p[..n]`; requires `p` strictly positive there.
    pub fn from_slices(q: &[T], p: &[T]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::LengthMismatch { left: q.len(), right: p.len() });
        }
        if let Some(index) = p.iter().position(|x| !x.is_positive()) {
            return Err(Error::ZeroPrior { index });
        }
        let ratios = q.iter().zip(p).map(|(a, b)| a.clone() / b.clone()).collect();
        Ok(Self { ratios })
    }

    pub fn ratios(&self) -> &[T] {
        &self.ratios
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Level sets of `i -> ratio_i`, each sorted ascending, ordered by their
    /// smallest index.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.ratios.len()).collect();
        // Stable sort keeps indices ascending inside each level set.
        order.sort_by(|&a, &b| self.ratios[a].partial_cmp(&self.ratios[b]).unwrap_or(Ordering::Equal));
        let mut fibers: Vec<Vec<usize>> = Vec::new();
        for idx in order {
            match fibers.last_mut() {
                Some(fiber) if self.ratios[fiber[0]] == self.ratios[idx] => fiber.push(idx),
                _ => fibers.push(vec![idx]),
            }
        }
        fibers.sort_by_key(|f| f[0]);
        fibers
    }

    pub fn is_injective(&self) -> bool {
        self.fibers().len() == self.ratios.len()
    }

    /// Lexicographically smallest pair `(i, j)`, `i < j`, with equal ratios.
    pub fn first_collision(&self) -> Option<(usize, usize)> {
        self.fibers().into_iter().filter(|f| f.len() >= 2).map(|f| (f[0], f[1])).min()
    }

    /// Number of unordered pairs with equal ratios.
    pub fn collision_count(&self) -> usize {
        self.fibers().iter().map(|f| f.len() * (f.len() - 1) / 2).sum()
    }
}

/// Ratio profile `q / p` of two distributions of the same kind and length.
pub fn ratio_profile<T: Scalar, D: Masses<T>>(q: &D, p: &D) -> Result<RatioProfile<T>> {
    RatioProfile::from_slices(q.prefix(), p.prefix())
}
