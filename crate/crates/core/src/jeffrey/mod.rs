//! Jeffrey conditioning on finite index sets.
//!
//! A posterior `q` comes from a strictly positive prior `p` by Jeffrey
//! conditioning on a partition `E` when
//! `q(A) = sum_i q(E_i) p(A | E_i)` for every event `A`. On a countable set
//! this is the same as asking the ratio `q_x / p_x` to be constant on every
//! block, and the fibers of that ratio map form the coarsest such partition.

mod partition;

pub use partition::{bell, Partition, SetPartitions};

use serde::{Deserialize, Serialize};

use crate::distributions::{FiniteDistribution, RatioProfile};
use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// Largest set size [`accessible_brute_force`] will enumerate (`B_8 = 4140`).
pub const BRUTE_FORCE_MAX: usize = 8;

/// New probabilities for the blocks of a partition, in block order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockWeights<T> {
    weights: Vec<T>,
}

impl<T: Scalar> BlockWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if let Some(index) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::NegativeEntry { index });
        }
        let total = sum(&weights);
        if !total.is_unit_mass() {
            return Err(Error::NotNormalized { sum: format!("{total:?}") });
        }
        Ok(Self { weights })
    }

    /// The masses `q(E_i)` that `q` assigns to the blocks of `e`.
    pub fn block_masses(q: &FiniteDistribution<T>, e: &Partition) -> Result<Self> {
        check_len(q.probs().len(), e.size())?;
        let weights = e.blocks().iter().map(|b| block_mass(q.probs(), b)).collect();
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

fn check_prior<T: Scalar>(p: &FiniteDistribution<T>) -> Result<()> {
    match p.probs().iter().position(|x| !x.is_positive()) {
        Some(index) => Err(Error::ZeroPrior { index }),
        None => Ok(()),
    }
}

fn block_mass<T: Scalar>(probs: &[T], block: &[usize]) -> T {
    block.iter().fold(T::zero(), |acc, &i| acc + probs[i].clone())
}

pub fn is_nontrivial(e: &Partition) -> bool {
    e.is_nontrivial()
}

/// Revises `p` so that block `E_b` receives mass `w_b`, keeping the
/// conditional distribution inside each block: `q_x = w_b p_x / p(E_b)`.
pub fn jc_apply<T: Scalar>(
    p: &FiniteDistribution<T>,
    e: &Partition,
    w: &BlockWeights<T>,
) -> Result<FiniteDistribution<T>> {
    check_prior(p)?;
    check_len(p.probs().len(), e.size())?;
    if w.weights.len() != e.num_blocks() {
        return Err(Error::WeightCountMismatch { weights: w.weights.len(), blocks: e.num_blocks() });
    }
    let probs = p.probs();
    let mut q = vec![T::zero(); probs.len()];
    for (block, weight) in e.blocks().iter().zip(&w.weights) {
        let mass = block_mass(probs, block);
        for &x in block {
            q[x] = weight.clone() * probs[x].clone() / mass.clone();
        }
    }
    FiniteDistribution::new(q)
}

/// `q(. | E_i) = p(. | E_i)` on every block with `q(E_i) > 0`.
pub fn rigidity_holds<T: Scalar>(p: &FiniteDistribution<T>, q: &FiniteDistribution<T>, e: &Partition) -> Result<bool> {
    check_prior(p)?;
    check_len(p.probs().len(), q.probs().len())?;
    check_len(p.probs().len(), e.size())?;
    let (pp, qq) = (p.probs(), q.probs());
    Ok(e.blocks().iter().all(|block| {
        let q_mass = block_mass(qq, block);
        if q_mass.is_zero() {
            return true;
        }
        let p_mass = block_mass(pp, block);
        // q_x / q(E) == p_x / p(E), cross-multiplied.
        block.iter().all(|&x| qq[x].clone() * p_mass.clone() == pp[x].clone() * q_mass.clone())
    }))
}

/// `q_x / p_x` is constant on every block.
pub fn ratio_constant_on_blocks<T: Scalar>(
    p: &FiniteDistribution<T>,
    q: &FiniteDistribution<T>,
    e: &Partition,
) -> Result<bool> {
    check_prior(p)?;
    check_len(p.probs().len(), q.probs().len())?;
    check_len(p.probs().len(), e.size())?;
    Ok(ratios_constant(p.probs(), q.probs(), e))
}

fn ratios_constant<T: Scalar>(pp: &[T], qq: &[T], e: &Partition) -> bool {
    e.blocks().iter().all(|block| {
        let head = block[0];
        block[1..].iter().all(|&x| qq[x].clone() * pp[head].clone() == qq[head].clone() * pp[x].clone())
    })
}

/// The fibers of `x -> q_x / p_x`: the coarsest partition on which `q` comes
/// from `p` by Jeffrey conditioning.
pub fn coarsest_partition<T: Scalar>(p: &FiniteDistribution<T>, q: &FiniteDistribution<T>) -> Result<Partition> {
    let profile = RatioProfile::from_slices(q.probs(), p.probs())?;
    Partition::new(profile.fibers())
}

/// Outcome of the exhaustive accessibility search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "witness")]
pub enum BruteForceVerdict {
    Accessible(Partition),
    Inaccessible,
}

impl BruteForceVerdict {
    pub fn is_accessible(&self) -> bool {
        matches!(self, Self::Accessible(_))
    }
}

/// Tries every set partition of the index set, in restricted-growth-string
/// order, and reports the first nontrivial one on which the ratios are
/// constant. Independent of the ratio-fiber shortcut used elsewhere.
pub fn accessible_brute_force<T: Scalar>(
    p: &FiniteDistribution<T>,
    q: &FiniteDistribution<T>,
) -> Result<BruteForceVerdict> {
    check_prior(p)?;
    let n = p.probs().len();
    check_len(n, q.probs().len())?;
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX });
    }
    Ok(SetPartitions::new(n)
        .filter(Partition::is_nontrivial)
        .find(|e| ratios_constant(p.probs(), q.probs(), e))
        .map_or(BruteForceVerdict::Inaccessible, BruteForceVerdict::Accessible))
}
