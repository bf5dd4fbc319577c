//! Blind-spot membership: `q` is out of reach of Jeffrey conditioning from
//! `p` on every nontrivial partition exactly when the ratios `q_i / p_i` are
//! pairwise distinct.
//!
//! Infinite sequences are only ever inspected up to a horizon `N`. A
//! [`PrefixStatus::PrefixDistinct`] verdict says nothing about coordinates
//! past `N`, and every rendering of it says so.

use std::fmt;

use rayon::prelude::*;

use crate::distributions::{FiniteDistribution, MassSequence, RatioProfile};
use crate::error::{Error, Result};
use crate::jeffrey::{coarsest_partition, Partition};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    InBlindSpot,
    Accessible,
}

/// Membership outcome for finite distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlindSpotVerdict {
    pub status: MembershipStatus,
    /// Smallest colliding pair `(i, j)`, `i < j`, zero-based.
    pub witness: Option<(usize, usize)>,
    /// Ratio fibers; present when accessible.
    pub coarsest: Option<Partition>,
}

impl BlindSpotVerdict {
    pub fn in_blind_spot(&self) -> bool {
        self.status == MembershipStatus::InBlindSpot
    }
}

/// `q_i p_j == q_j p_i`.
pub fn ratios_collide<T: Scalar>(p: &[T], q: &[T], i: usize, j: usize) -> bool {
    q[i].clone() * p[j].clone() == q[j].clone() * p[i].clone()
}

pub fn membership_finite<T: Scalar>(p: &FiniteDistribution<T>, q: &FiniteDistribution<T>) -> Result<BlindSpotVerdict> {
    let profile = RatioProfile::from_slices(q.probs(), p.probs())?;
    match profile.first_collision() {
        None => Ok(BlindSpotVerdict { status: MembershipStatus::InBlindSpot, witness: None, coarsest: None }),
        Some(pair) => {
            debug_assert!(ratios_collide(p.probs(), q.probs(), pair.0, pair.1));
            Ok(BlindSpotVerdict {
                status: MembershipStatus::Accessible,
                witness: Some(pair),
                coarsest: Some(coarsest_partition(p, q)?),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixStatus {
    /// The first `horizon` ratios are pairwise distinct; later ones unchecked.
    PrefixDistinct,
    /// Zero-based `i < j < horizon` with equal ratios.
    CollisionFound { i: usize, j: usize },
}

/// Horizon-limited membership outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixVerdict {
    pub status: PrefixStatus,
    pub horizon: usize,
}

impl PrefixVerdict {
    pub fn is_distinct(&self) -> bool {
        self.status == PrefixStatus::PrefixDistinct
    }

    /// Re-evaluates a collision claim against the inputs by cross-multiplication.
    /// Distinctness claims have no short certificate and return `true`.
    pub fn verify_collision<T: Scalar>(&self, prior: &[T], q: &[T]) -> bool {
        match self.status {
            PrefixStatus::PrefixDistinct => true,
            PrefixStatus::CollisionFound { i, j } => {
                i < j && j < self.horizon && j < prior.len() && j < q.len() && ratios_collide(prior, q, i, j)
            }
        }
    }
}

impl fmt::Display for PrefixVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            PrefixStatus::PrefixDistinct => {
                write!(f, "prefix-distinct up to N={} (horizon-limited)", self.horizon)
            }
            PrefixStatus::CollisionFound { i, j } => {
                write!(f, "collision found at ({}, {}) within N={}", i + 1, j + 1, self.horizon)
            }
        }
    }
}

fn heads<T: Scalar, P, Q>(prior: &P, q: &Q, horizon: usize) -> Result<(Vec<T>, Vec<T>)>
where
    P: MassSequence<T> + ?Sized,
    Q: MassSequence<T> + ?Sized,
{
    if horizon == 0 {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    let p = prior.head(horizon)?;
    if let Some(index) = p.iter().position(|x| !x.is_positive()) {
        return Err(Error::ZeroPrior { index });
    }
    Ok((p, q.head(horizon)?))
}

/// Scans the first `horizon` ratios `q_i / p_i` for an exact repeat.
pub fn membership_prefix<T: Scalar, P, Q>(prior: &P, q: &Q, horizon: usize) -> Result<PrefixVerdict>
where
    P: MassSequence<T> + ?Sized,
    Q: MassSequence<T> + ?Sized,
{
    let (p, q) = heads(prior, q, horizon)?;
    let profile = RatioProfile::from_slices(&q, &p)?;
    let status = match profile.first_collision() {
        None => PrefixStatus::PrefixDistinct,
        Some((i, j)) => PrefixStatus::CollisionFound { i, j },
    };
    Ok(PrefixVerdict { status, horizon })
}

/// Number of unordered pairs `(i, j)` with `q_i / p_i == q_j / p_j`.
pub fn collision_count<T: Scalar>(p: &FiniteDistribution<T>, q: &FiniteDistribution<T>) -> Result<usize> {
    Ok(RatioProfile::from_slices(q.probs(), p.probs())?.collision_count())
}

/// [`collision_count`] over the first `horizon` coordinates.
pub fn collision_count_prefix<T: Scalar, P, Q>(prior: &P, q: &Q, horizon: usize) -> Result<usize>
where
    P: MassSequence<T> + ?Sized,
    Q: MassSequence<T> + ?Sized,
{
    let (p, q) = heads(prior, q, horizon)?;
    Ok(RatioProfile::from_slices(&q, &p)?.collision_count())
}

/// Per-prior verdicts and their conjunction: `q` is in the blind spot of the
/// family iff it is in the blind spot of every member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict<V> {
    pub per_prior: Vec<V>,
    pub member: bool,
}

fn check_family<P>(priors: &[P]) -> Result<()> {
    if priors.is_empty() {
        Err(Error::TooShort { len: 0, min: 1 })
    } else {
        Ok(())
    }
}

pub fn family_membership_finite<T: Scalar>(
    priors: &[FiniteDistribution<T>],
    q: &FiniteDistribution<T>,
) -> Result<FamilyVerdict<BlindSpotVerdict>> {
    check_family(priors)?;
    let per_prior = priors.par_iter().map(|p| membership_finite(p, q)).collect::<Result<Vec<_>>>()?;
    let member = per_prior.iter().all(BlindSpotVerdict::in_blind_spot);
    Ok(FamilyVerdict { per_prior, member })
}

pub fn family_membership_prefix<T: Scalar, P, Q>(
    priors: &[P],
    q: &Q,
    horizon: usize,
) -> Result<FamilyVerdict<PrefixVerdict>>
where
    P: MassSequence<T> + Sync,
    Q: MassSequence<T> + Sync + ?Sized,
{
    check_family(priors)?;
    let per_prior = priors.par_iter().map(|p| membership_prefix(p, q, horizon)).collect::<Result<Vec<_>>>()?;
    let member = per_prior.iter().all(PrefixVerdict::is_distinct);
    Ok(FamilyVerdict { per_prior, member })
}
