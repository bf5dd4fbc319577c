//! Constructive procedures over exact rationals:
//!
//! * [`generate_blindspot_member`] builds a distribution whose ratio profile
//!   is injective against every prior in a family.
//! * [`delta_family`] / [`pick_valid_delta`] slide mass between the first two
//!   coordinates of such a member, staying inside the blind spot.
//! * [`densify`] finds a blind-spot member within `4 eps` (l1) of any target.
//! * [`exteriorize`] and [`multi_collision_near`] find distributions with one
//!   (or `l`) exact ratio collisions within `2 eps` (or `2 l eps`) of a member.
//!
//! Randomized choices are seeded dyadic rationals, so every output is a
//! deterministic function of its inputs and seed. All distance claims are
//! certified through [`crate::metrics::lp_distance`] rather than trusted.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blindspot::{collision_count_prefix, family_membership_prefix, membership_prefix, ratios_collide};
use crate::distributions::{MassSequence, TruncatedDistribution};
use crate::error::{Error, Result};
use crate::metrics::{lp_distance, NormKind};
use crate::rational::{dyadic, format_rational, pow2_inv};
use crate::scalar::sum;
use crate::Rational;

/// Bits of resolution for random dyadic candidates.
pub const CANDIDATE_BITS: u32 = 32;

/// Cap on rejected candidates per coordinate. Each exclusion set is finite
/// and tiny next to `2^CANDIDATE_BITS`, so reaching it means a broken input.
pub const MAX_ATTEMPTS: usize = 4096;

/// Retries for [`pick_valid_delta`].
pub const MAX_DELTA_ATTEMPTS: usize = 64;

fn draw_unit_dyadic(rng: &mut ChaCha8Rng) -> Rational {
    let k: u64 = rng.random_range(1..(1u64 << CANDIDATE_BITS));
    dyadic(k, CANDIDATE_BITS)
}

fn prior_heads<P: MassSequence<Rational>>(priors: &[P], horizon: usize) -> Result<Vec<Vec<Rational>>> {
    if priors.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    priors
        .iter()
        .map(|p| {
            let head = p.head(horizon)?;
            match head.iter().position(|x| !x.is_positive()) {
                Some(index) => Err(Error::ZeroPrior { index }),
                None => Ok(head),
            }
        })
        .collect()
}

fn check_epsilon(epsilon: &Rational, upper: &Rational, expected: &str) -> Result<()> {
    if epsilon.is_positive() && epsilon < upper {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon { epsilon: format_rational(epsilon), expected: expected.to_string() })
    }
}

/// Values the next coordinate must avoid: `m_j p_i / p_j` for every earlier
/// `j` and every prior, so that `m_i / p_i` differs from all `m_j / p_j`.
#[derive(Debug, Clone, Default)]
pub struct ExclusionSet {
    forbidden: HashSet<Rational>,
}

impl ExclusionSet {
    /// Exclusions for coordinate `i` given the already chosen `masses[..i]`.
    pub fn for_coordinate(masses: &[Rational], heads: &[Vec<Rational>], i: usize) -> Self {
        let mut forbidden = HashSet::with_capacity(i * heads.len());
        for head in heads {
            for (j, m) in masses.iter().enumerate().take(i) {
                forbidden.insert(m * &head[i] / &head[j]);
            }
        }
        Self { forbidden }
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.forbidden.contains(value)
    }

    pub fn len(&self) -> usize {
        self.forbidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty()
    }
}

/// Ratios `m_j / p_j` seen so far, one set per prior. Equivalent to testing
/// against an [`ExclusionSet`] but linear rather than quadratic in the horizon.
struct SeenRatios<'a> {
    heads: &'a [Vec<Rational>],
    seen: Vec<HashSet<Rational>>,
}

impl<'a> SeenRatios<'a> {
    fn new(heads: &'a [Vec<Rational>], horizon: usize) -> Self {
        Self { heads, seen: vec![HashSet::with_capacity(horizon); heads.len()] }
    }

    fn admits(&self, m: &Rational, i: usize) -> bool {
        self.heads.iter().zip(&self.seen).all(|(head, seen)| !seen.contains(&(m / &head[i])))
    }

    fn insert(&mut self, m: &Rational, i: usize) {
        for (head, seen) in self.heads.iter().zip(&mut self.seen) {
            seen.insert(m / &head[i]);
        }
    }
}

/// Output of [`generate_blindspot_member`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMember {
    /// Unnormalized masses: `m_1 = 1/2`, then `0 < m_i < 2^-i`.
    pub masses: Vec<Rational>,
    /// `m / sum(m)` with zero tail.
    pub distribution: TruncatedDistribution<Rational>,
    /// Candidates discarded because they hit an exclusion set.
    pub rejected: usize,
}

/// Builds a distribution on `horizon` coordinates whose ratios against every
/// prior are pairwise distinct.
pub fn generate_blindspot_member<P: MassSequence<Rational>>(
    priors: &[P],
    horizon: usize,
    seed: u64,
) -> Result<GeneratedMember> {
    if horizon < 2 {
        return Err(Error::TooShort { len: horizon, min: 2 });
    }
    let heads = prior_heads(priors, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masses = Vec::with_capacity(horizon);
    masses.push(pow2_inv(1));
    let mut seen = SeenRatios::new(&heads, horizon);
    seen.insert(&masses[0], 0);
    let mut rejected = 0;
    for i in 1..horizon {
        // Coordinate i (zero-based) is the (i+1)-th: scale into (0, 2^-(i+1)).
        let scale = pow2_inv(i as u32 + 1);
        let mut attempts = 0;
        let m = loop {
            let candidate = draw_unit_dyadic(&mut rng) * &scale;
            if seen.admits(&candidate, i) {
                break candidate;
            }
            rejected += 1;
            attempts += 1;
            if attempts >= MAX_ATTEMPTS {
                return Err(Error::Exhausted { attempts });
            }
        };
        seen.insert(&m, i);
        masses.push(m);
    }
    let total = sum(&masses);
    let prefix = masses.iter().map(|m| m / &total).collect();
    let distribution = TruncatedDistribution::new(prefix, Rational::zero())?;
    Ok(GeneratedMember { masses, distribution, rejected })
}

/// `(q_1 + delta, q_2 - delta, q_3, ...)`, for `0 < delta < q_2`.
pub fn delta_family(q: &TruncatedDistribution<Rational>, delta: &Rational) -> Result<TruncatedDistribution<Rational>> {
    let mut prefix = q.prefix_vec();
    if !delta.is_positive() || delta >= &prefix[1] {
        return Err(Error::DeltaTooLarge { delta: format_rational(delta), limit: format_rational(&prefix[1]) });
    }
    prefix[0] += delta;
    prefix[1] -= delta;
    TruncatedDistribution::new(prefix, q.tail().clone())
}

/// Draws `delta` in `(0, epsilon)` such that `delta_family(q, delta)` stays
/// prefix-distinct against every prior at the horizon of `q`.
///
/// Requires `0 < epsilon <= min(1 - q_1, q_2)`.
pub fn pick_valid_delta<P: MassSequence<Rational> + Sync>(
    q: &TruncatedDistribution<Rational>,
    priors: &[P],
    epsilon: &Rational,
    seed: u64,
) -> Result<Rational> {
    let head = q.prefix_vec();
    if head[1].is_zero() {
        return Err(Error::DegenerateSecondCoordinate);
    }
    let cap = std::cmp::min(Rational::one() - &head[0], head[1].clone());
    if !epsilon.is_positive() || epsilon > &cap {
        return Err(Error::InvalidEpsilon {
            epsilon: format_rational(epsilon),
            expected: format!("0 < epsilon <= {}", format_rational(&cap)),
        });
    }
    let horizon = q.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DELTA_ATTEMPTS {
        let delta = draw_unit_dyadic(&mut rng) * epsilon;
        let shifted = delta_family(q, &delta)?;
        if family_membership_prefix(priors, &shifted, horizon)?.member {
            return Ok(delta);
        }
    }
    Err(Error::Exhausted { attempts: MAX_DELTA_ATTEMPTS })
}

/// Output of [`densify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Densified {
    /// Nudged prefix `r` before normalization.
    pub nudged: Vec<Rational>,
    /// `r_n - q_n` per coordinate.
    pub nudges: Vec<Rational>,
    /// `r / |r|`, tail included.
    pub distribution: TruncatedDistribution<Rational>,
    /// Certified upper bound on the l1 distance to the target.
    pub certified_upper: Rational,
    /// The claimed bound `4 eps`.
    pub bound: Rational,
}

/// Finds a prefix-distinct distribution within l1 distance `4 eps` of `target`.
///
/// Coordinates are copied from the target unless their ratio would repeat an
/// earlier one, in which case a seeded dyadic nudge below `eps / 2^(n+1)` is
/// added (one-based `n`). The result is rescaled to total mass one, tail included.
pub fn densify<P: MassSequence<Rational>>(
    prior: &P,
    target: &TruncatedDistribution<Rational>,
    epsilon: &Rational,
    seed: u64,
) -> Result<Densified> {
    check_epsilon(epsilon, &pow2_inv(1), "0 < epsilon < 1/2")?;
    let horizon = target.horizon();
    let p = &prior_heads(std::slice::from_ref(prior), horizon)?[0];
    let q = target.prefix_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Rational> = HashSet::with_capacity(horizon);
    let mut nudged = Vec::with_capacity(horizon);
    let mut nudges = Vec::with_capacity(horizon);
    for (n, (q_n, p_n)) in q.iter().zip(p).enumerate() {
        let mut r_n = q_n.clone();
        if seen.contains(&(&r_n / p_n)) {
            let ceiling = epsilon * pow2_inv(n as u32 + 2);
            let mut attempts = 0;
            loop {
                r_n = q_n + draw_unit_dyadic(&mut rng) * &ceiling;
                if !seen.contains(&(&r_n / p_n)) {
                    break;
                }
                attempts += 1;
                if attempts >= MAX_ATTEMPTS {
                    return Err(Error::Exhausted { attempts });
                }
            }
        }
        seen.insert(&r_n / p_n);
        nudges.push(&r_n - q_n);
        nudged.push(r_n);
    }
    let norm = sum(&nudged) + target.tail();
    let prefix = nudged.iter().map(|r| r / &norm).collect();
    let distribution = TruncatedDistribution::new(prefix, target.tail() / &norm)?;

    let bound = epsilon * Rational::from_integer(BigInt::from(4));
    let certified_upper = l1_upper(&distribution, target)?;
    if certified_upper >= bound {
        return Err(Error::HorizonInsufficient(format!(
            "l1 upper bound {} does not certify < {} at horizon {horizon}",
            format_rational(&certified_upper),
            format_rational(&bound)
        )));
    }
    if !membership_prefix(prior, &distribution, horizon)?.is_distinct() {
        return Err(Error::NotInBlindSpot { horizon });
    }
    Ok(Densified { nudged, nudges, distribution, certified_upper, bound })
}

fn l1_upper(u: &TruncatedDistribution<Rational>, v: &TruncatedDistribution<Rational>) -> Result<Rational> {
    match lp_distance(u, v, &NormKind::l1())?.upper {
        crate::metrics::Distance::Scalar(d) => Ok(d),
        crate::metrics::Distance::Float(_) => unreachable!("l1 is computed in the scalar type"),
    }
}

/// How a collision move rebalances mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionBranch {
    /// `q_n / p_n > q_1 / p_1`: the excess moves onto coordinate `n + 1`.
    RaiseNext,
    /// `q_n / p_n < q_1 / p_1`: the deficit is taken from the pivot coordinate.
    DrawFromPivot,
}

/// One collision move: coordinate `index` is set to `q_1 p_n / p_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionMove {
    /// Zero-based index `n` that now collides with index 0.
    pub index: usize,
    pub branch: CollisionBranch,
    /// Zero-based coordinate that absorbed the mass difference.
    pub compensated: usize,
    /// Mass moved, `|q_n - q_1 p_n / p_1|`.
    pub shift: Rational,
}

/// Output of [`exteriorize`] and [`multi_collision_near`].
#[derive(Debug, Clone, PartialEq)]
pub struct Exteriorized {
    pub distribution: TruncatedDistribution<Rational>,
    pub moves: Vec<CollisionMove>,
    /// Zero-based coordinate used for negative-branch compensation (1, or 2
    /// when `q_2 = 0`).
    pub pivot: usize,
    /// Smallest index `n` meeting the smallness threshold.
    pub threshold_index: usize,
    pub certified_upper: Rational,
    /// `2 eps` per move.
    pub bound: Rational,
}

struct ExteriorSetup {
    p: Vec<Rational>,
    q: Vec<Rational>,
    pivot: usize,
    threshold_index: usize,
}

fn exterior_setup<P: MassSequence<Rational>>(
    prior: &P,
    member: &TruncatedDistribution<Rational>,
    epsilon: &Rational,
) -> Result<ExteriorSetup> {
    let horizon = member.horizon();
    if horizon < 3 {
        return Err(Error::TooShort { len: horizon, min: 3 });
    }
    if !membership_prefix(prior, member, horizon)?.is_distinct() {
        return Err(Error::NotInBlindSpot { horizon });
    }
    let p = prior.head(horizon)?;
    let q = member.prefix_vec();
    // Distinct ratios allow at most one zero coordinate, so q_3 > 0 when q_2 = 0.
    let pivot = if q[1].is_positive() { 1 } else { 2 };
    check_epsilon(epsilon, &q[pivot], &format!("0 < epsilon < q_{} = {}", pivot + 1, format_rational(&q[pivot])))?;

    let p_tail = prior.mass_beyond(horizon)?;
    let small = |q_i: &Rational, p_i: &Rational| q_i < epsilon && &(p_i / &p[0]) < epsilon;
    if !small(member.tail(), &p_tail) {
        return Err(Error::HorizonInsufficient(format!(
            "mass beyond horizon {horizon} is not below epsilon {}",
            format_rational(epsilon)
        )));
    }
    let mut threshold_index = horizon;
    while threshold_index > 0 && small(&q[threshold_index - 1], &p[threshold_index - 1]) {
        threshold_index -= 1;
    }
    if threshold_index == horizon {
        return Err(Error::HorizonInsufficient(format!(
            "no coordinate within horizon {horizon} has q_i and p_i/p_1 below epsilon {}",
            format_rational(epsilon)
        )));
    }
    Ok(ExteriorSetup { p, q, pivot, threshold_index })
}

fn collision_move(s: &ExteriorSetup, n: usize, out: &mut [Rational]) -> CollisionMove {
    let target = &s.q[0] * &s.p[n] / &s.p[0];
    out[n] = target.clone();
    if s.q[n] > target {
        let shift = &s.q[n] - &target;
        out[n + 1] += &shift;
        CollisionMove { index: n, branch: CollisionBranch::RaiseNext, compensated: n + 1, shift }
    } else {
        // Equality is impossible: q is prefix-distinct.
        let shift = &target - &s.q[n];
        out[s.pivot] -= &shift;
        CollisionMove { index: n, branch: CollisionBranch::DrawFromPivot, compensated: s.pivot, shift }
    }
}

fn finish_exterior<P: MassSequence<Rational>>(
    prior: &P,
    member: &TruncatedDistribution<Rational>,
    setup: ExteriorSetup,
    out: Vec<Rational>,
    moves: Vec<CollisionMove>,
    epsilon: &Rational,
) -> Result<Exteriorized> {
    let horizon = member.horizon();
    if out[setup.pivot].is_negative() {
        return Err(Error::HorizonInsufficient("pivot coordinate cannot absorb the collision moves".into()));
    }
    let distribution = TruncatedDistribution::new(out, member.tail().clone())?;
    let bound = epsilon * Rational::from_integer(BigInt::from(2 * moves.len()));
    let certified_upper = l1_upper(&distribution, member)?;
    if certified_upper >= bound {
        return Err(Error::HorizonInsufficient(format!(
            "l1 upper bound {} does not certify < {}",
            format_rational(&certified_upper),
            format_rational(&bound)
        )));
    }
    let prefix = distribution.prefix_vec();
    debug_assert!(moves.iter().all(|m| ratios_collide(&setup.p, &prefix, 0, m.index)));
    debug_assert!(collision_count_prefix(prior, &distribution, horizon)? >= moves.len());
    Ok(Exteriorized {
        distribution,
        moves,
        pivot: setup.pivot,
        threshold_index: setup.threshold_index,
        certified_upper,
        bound,
    })
}

/// Moves a prefix-distinct `member` by less than `2 eps` (l1) onto a
/// distribution whose ratios at indices `0` and `n` coincide exactly, `n`
/// being the smallest index past which every `q_i` and `p_i / p_1` is below `eps`.
pub fn exteriorize<P: MassSequence<Rational>>(
    prior: &P,
    member: &TruncatedDistribution<Rational>,
    epsilon: &Rational,
) -> Result<Exteriorized> {
    let setup = exterior_setup(prior, member, epsilon)?;
    let n = setup.threshold_index;
    let mut out = setup.q.clone();
    let needs_next = &setup.q[n] * &setup.p[0] > &setup.q[0] * &setup.p[n];
    if needs_next && n + 1 >= member.horizon() {
        return Err(Error::HorizonInsufficient(format!(
            "collision at index {} needs coordinate {} beyond the horizon",
            n + 1,
            n + 2
        )));
    }
    let mv = collision_move(&setup, n, &mut out);
    finish_exterior(prior, member, setup, out, vec![mv], epsilon)
}

/// Applies `pairs` disjoint collision moves, taken greedily from the largest
/// admissible indices, for at least `pairs` colliding ratio pairs within
/// `2 * pairs * eps` (l1).
pub fn multi_collision_near<P: MassSequence<Rational>>(
    prior: &P,
    member: &TruncatedDistribution<Rational>,
    pairs: usize,
    epsilon: &Rational,
) -> Result<Exteriorized> {
    if pairs == 0 {
        return Err(Error::OutOfRange { value: "0".into(), expected: "pairs >= 1" });
    }
    let setup = exterior_setup(prior, member, epsilon)?;
    let horizon = member.horizon();
    // Move k uses index horizon-2-2k and possibly horizon-1-2k.
    let lowest = (horizon - 2).checked_sub(2 * (pairs - 1));
    match lowest {
        Some(low) if low >= setup.threshold_index => {}
        _ => {
            return Err(Error::HorizonInsufficient(format!(
                "{pairs} disjoint moves do not fit between index {} and horizon {horizon}",
                setup.threshold_index + 1
            )))
        }
    }
    let mut out = setup.q.clone();
    let moves = (0..pairs).map(|k| collision_move(&setup, horizon - 2 - 2 * k, &mut out)).collect();
    finish_exterior(prior, member, setup, out, moves, epsilon)
}

impl TruncatedDistribution<Rational> {
    fn prefix_vec(&self) -> Vec<Rational> {
        crate::distributions::Masses::prefix(self).to_vec()
    }
}
