//! `l^p` distances between distributions and the bounded metric `t / (1 + t)`.
//!
//! `l^1` and `l^inf` are computed in the scalar type itself (exact for
//! rationals). Every other exponent is evaluated in `f64`, and comparisons
//! against such values should allow [`FLOAT_SLACK`].
//!
//! For truncated distributions the coordinates beyond the prefix are unknown,
//! so distances come back as an interval: the lower end uses the prefix only,
//! and the upper end also charges the worst case the two tails allow.

use std::fmt;

use crate::distributions::Masses;
use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::scalar::{abs_diff, max_of, Scalar};
use crate::Rational;
use num_traits::{One, ToPrimitive, Zero};

/// Comparison slack for distances computed in floating point.
pub const FLOAT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormKind {
    /// `(sum |s_i|^p)^(1/p)` for `p >= 1`.
    Lp(Rational),
    /// `max |s_i|`.
    LInfinity,
}

impl NormKind {
    pub fn lp(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::OutOfRange { value: p.to_string(), expected: "[1, inf)" });
        }
        Ok(Self::Lp(p))
    }

    pub fn l1() -> Self {
        Self::Lp(Rational::one())
    }

    pub fn l2() -> Self {
        Self::Lp(Rational::from_integer(2.into()))
    }

    /// Parses `l1`, `l2`, `linf`, or `lp:<p>`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(Self::l1()),
            "l2" => Ok(Self::l2()),
            "linf" | "l_inf" | "linfinity" => Ok(Self::LInfinity),
            other => match other.strip_prefix("lp:") {
                Some(p) => Self::lp(parse_rational(p)?),
                None => Err(Error::Parse(format!("unknown norm {text:?}"))),
            },
        }
    }

    fn is_l1(&self) -> bool {
        matches!(self, Self::Lp(p) if p.is_one())
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LInfinity => write!(f, "linf"),
            Self::Lp(p) if p.is_one() => write!(f, "l1"),
            Self::Lp(p) if *p == Rational::from_integer(2.into()) => write!(f, "l2"),
            Self::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

/// A distance value: in the scalar type when it can be computed there, else `f64`.
#[derive(Debug, Clone, PartialEq)]
pub enum Distance<T> {
    Scalar(T),
    Float(f64),
}

impl<T: Scalar> Distance<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Scalar(v) => v.to_f64_lossy(),
            Self::Float(v) => *v,
        }
    }

    /// Strict comparison against `bound`, exact whenever the value is.
    pub fn is_below(&self, bound: &T) -> bool {
        match self {
            Self::Scalar(v) => v < bound,
            Self::Float(v) => bound.to_f64().is_some_and(|b| *v < b),
        }
    }

    fn map_bounded(&self) -> Self {
        match self {
            Self::Scalar(t) => Self::Scalar(t.clone() / (T::one() + t.clone())),
            Self::Float(t) => Self::Float(t / (1.0 + t)),
        }
    }
}

/// `[lower, upper]` enclosing the true distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBounds<T> {
    pub lower: Distance<T>,
    pub upper: Distance<T>,
}

impl<T: Scalar> DistanceBounds<T> {
    /// `true` when both ends coincide, i.e. the distance is known.
    pub fn is_tight(&self) -> bool {
        self.lower == self.upper
    }

    /// The distance is certified to be strictly below `bound`.
    pub fn certifies_below(&self, bound: &T) -> bool {
        self.upper.is_below(bound)
    }
}

/// `l^p` distance between two distributions with equal prefix lengths.
pub fn lp_distance<T: Scalar, D: Masses<T>>(u: &D, v: &D, norm: &NormKind) -> Result<DistanceBounds<T>> {
    let (a, b) = (u.prefix(), v.prefix());
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let (tu, tv) = (u.tail_mass(), v.tail_mass());
    let diffs = a.iter().zip(b).map(|(x, y)| abs_diff(x, y));
    match norm {
        NormKind::LInfinity => {
            let lower = diffs.fold(T::zero(), max_of);
            // A tail coordinate difference is at most the larger tail mass.
            let upper = max_of(lower.clone(), max_of(tu, tv));
            Ok(DistanceBounds { lower: Distance::Scalar(lower), upper: Distance::Scalar(upper) })
        }
        n if n.is_l1() => {
            let lower = diffs.fold(T::zero(), |acc, d| acc + d);
            let upper = lower.clone() + tu + tv;
            Ok(DistanceBounds { lower: Distance::Scalar(lower), upper: Distance::Scalar(upper) })
        }
        NormKind::Lp(p) => {
            let p = p.to_f64().unwrap_or(f64::INFINITY);
            let power_sum: f64 = diffs.map(|d| d.to_f64_lossy().powf(p)).sum();
            let tail = (tu + tv).to_f64_lossy();
            let lower = power_sum.powf(1.0 / p);
            // sum_i |d_i|^p <= (sum_i |d_i|)^p over the tail.
            let upper = if tail.is_zero() { lower } else { (power_sum + tail.powf(p)).powf(1.0 / p) };
            Ok(DistanceBounds { lower: Distance::Float(lower), upper: Distance::Float(upper) })
        }
    }
}

/// `d(u, v) = t / (1 + t)` with `t` the chosen `l^p` distance; always in `[0, 1)`.
pub fn bounded_metric<T: Scalar, D: Masses<T>>(u: &D, v: &D, norm: &NormKind) -> Result<DistanceBounds<T>> {
    let base = lp_distance(u, v, norm)?;
    Ok(DistanceBounds { lower: base.lower.map_bounded(), upper: base.upper.map_bounded() })
}
