//! JSON documents for distributions.
//!
//! ```json
//! {"kind": "finite", "probs": ["1/2", "1/4", "1/4"]}
//! {"kind": "truncated", "prefix": ["1/2", "1/4"], "tail_mass": "1/4"}
//! {"kind": "geometric", "ratio": "1/2"}
//! ```
//!
//! Exact values travel as strings (`"a/b"`, an integer, or a short decimal).
//! Float-mode values travel as JSON numbers. Either form is accepted on input
//! for either scalar type: numbers convert to rationals exactly, strings
//! convert to floats by rounding.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::distributions::{FiniteDistribution, MassSequence, Masses, ParametricDistribution, TruncatedDistribution};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireNumber {
    Text(String),
    Number(f64),
}

/// Scalars with a JSON encoding.
pub trait WireScalar: Scalar {
    fn from_wire(value: &WireNumber) -> Result<Self>;
    fn to_wire(&self) -> WireNumber;
}

impl WireScalar for Rational {
    fn from_wire(value: &WireNumber) -> Result<Self> {
        match value {
            WireNumber::Text(s) => parse_rational(s),
            WireNumber::Number(x) => {
                BigRational::from_float(*x).ok_or_else(|| Error::Parse(format!("{x} is not a finite number")))
            }
        }
    }

    fn to_wire(&self) -> WireNumber {
        WireNumber::Text(format_rational(self))
    }
}

impl WireScalar for f64 {
    fn from_wire(value: &WireNumber) -> Result<Self> {
        match value {
            WireNumber::Number(x) => Ok(*x),
            WireNumber::Text(s) => {
                parse_rational(s)?.to_f64().ok_or_else(|| Error::Parse(format!("{s:?} does not fit in f64")))
            }
        }
    }

    fn to_wire(&self) -> WireNumber {
        WireNumber::Number(*self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionDoc {
    Finite { probs: Vec<WireNumber> },
    Truncated { prefix: Vec<WireNumber>, tail_mass: WireNumber },
    Geometric { ratio: WireNumber },
}

fn from_wires<T: WireScalar>(values: &[WireNumber]) -> Result<Vec<T>> {
    values.iter().map(T::from_wire).collect()
}

fn to_wires<T: WireScalar>(values: &[T]) -> Vec<WireNumber> {
    values.iter().map(T::to_wire).collect()
}

/// Any of the three distribution kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyDistribution<T> {
    Finite(FiniteDistribution<T>),
    Truncated(TruncatedDistribution<T>),
    Parametric(ParametricDistribution<T>),
}

impl<T: WireScalar> AnyDistribution<T> {
    pub fn from_doc(doc: &DistributionDoc) -> Result<Self> {
        Ok(match doc {
            DistributionDoc::Finite { probs } => Self::Finite(FiniteDistribution::new(from_wires(probs)?)?),
            DistributionDoc::Truncated { prefix, tail_mass } => {
                Self::Truncated(TruncatedDistribution::new(from_wires(prefix)?, T::from_wire(tail_mass)?)?)
            }
            DistributionDoc::Geometric { ratio } => {
                Self::Parametric(crate::distributions::geometric(T::from_wire(ratio)?)?)
            }
        })
    }

    pub fn to_doc(&self) -> DistributionDoc {
        match self {
            Self::Finite(d) => DistributionDoc::Finite { probs: to_wires(d.probs()) },
            Self::Truncated(d) => {
                DistributionDoc::Truncated { prefix: to_wires(d.prefix()), tail_mass: d.tail().to_wire() }
            }
            Self::Parametric(ParametricDistribution::Geometric { ratio }) => {
                DistributionDoc::Geometric { ratio: ratio.to_wire() }
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DistributionDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("documents always serialize")
    }

    /// Finite view, or `None` for truncated and parametric inputs.
    pub fn as_finite(&self) -> Option<&FiniteDistribution<T>> {
        match self {
            Self::Finite(d) => Some(d),
            _ => None,
        }
    }

    /// Stored-prefix view: finite distributions get a zero tail, parametric
    /// ones are truncated at `horizon`.
    pub fn to_truncated(&self, horizon: Option<usize>) -> Result<TruncatedDistribution<T>> {
        match self {
            Self::Finite(d) => Ok(d.clone().into()),
            Self::Truncated(d) => Ok(d.clone()),
            Self::Parametric(d) => {
                let n = horizon.ok_or_else(|| {
                    Error::Parse("a horizon is required to truncate a parametric distribution".into())
                })?;
                crate::distributions::truncate(d, n)
            }
        }
    }
}

impl<T: Scalar> MassSequence<T> for AnyDistribution<T> {
    fn available(&self) -> Option<usize> {
        match self {
            Self::Finite(d) => d.available(),
            Self::Truncated(d) => d.available(),
            Self::Parametric(d) => d.available(),
        }
    }

    fn head(&self, n: usize) -> Result<Vec<T>> {
        match self {
            Self::Finite(d) => d.head(n),
            Self::Truncated(d) => d.head(n),
            Self::Parametric(d) => d.head(n),
        }
    }

    fn mass_beyond(&self, n: usize) -> Result<T> {
        match self {
            Self::Finite(d) => d.mass_beyond(n),
            Self::Truncated(d) => d.mass_beyond(n),
            Self::Parametric(d) => d.mass_beyond(n),
        }
    }
}

impl<T: WireScalar> From<FiniteDistribution<T>> for AnyDistribution<T> {
    fn from(d: FiniteDistribution<T>) -> Self {
        Self::Finite(d)
    }
}

impl<T: WireScalar> From<TruncatedDistribution<T>> for AnyDistribution<T> {
    fn from(d: TruncatedDistribution<T>) -> Self {
        Self::Truncated(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parses_all_kinds() {
        let f = AnyDistribution::<Rational>::from_json(r#"{"kind":"finite","probs":["1/2","0.25",0.25]}"#).unwrap();
        assert_eq!(f.as_finite().unwrap().probs(), &[ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
        let t =
            AnyDistribution::<Rational>::from_json(r#"{"kind":"truncated","prefix":["1/2","1/4"],"tail_mass":"1/4"}"#)
                .unwrap();
        assert_eq!(t.mass_beyond(1).unwrap(), ratio(1, 2));
        let g = AnyDistribution::<Rational>::from_json(r#"{"kind":"geometric","ratio":"1/2"}"#).unwrap();
        assert_eq!(g.head(2).unwrap(), vec![ratio(1, 2), ratio(1, 4)]);
        assert_eq!(g.available(), None);
    }

    #[test]
    fn emits_canonical_strings() {
        let d = AnyDistribution::Finite(FiniteDistribution::new(vec![ratio(2, 4), ratio(1, 2)]).unwrap());
        assert_eq!(serde_json::to_string(&d.to_doc()).unwrap(), r#"{"kind":"finite","probs":["1/2","1/2"]}"#);
    }

    #[test]
    fn validation_errors_surface() {
        assert!(matches!(
            AnyDistribution::<Rational>::from_json(r#"{"kind":"finite","probs":["1/2","1/2","1/4"]}"#),
            Err(Error::NotNormalized { .. })
        ));
        assert!(AnyDistribution::<Rational>::from_json(r#"{"kind":"beta"}"#).is_err());
        assert!(AnyDistribution::<Rational>::from_json(r#"{"kind":"geometric","ratio":"1"}"#).is_err());
    }

    #[test]
    fn float_documents_round_trip_bitwise() {
        let probs = vec![0.1f64, 0.2, 0.7000000000000001];
        let d = AnyDistribution::Finite(FiniteDistribution::new(probs).unwrap());
        let text = d.to_json_value().to_string();
        assert_eq!(AnyDistribution::<f64>::from_json(&text).unwrap(), d);
    }
}
