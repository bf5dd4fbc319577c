//! Stick-breaking random distributions and Monte Carlo estimates of how
//! often they land in a prior's blind spot.
//!
//! Each coordinate takes a random fraction of the mass not yet assigned:
//! `x_i = u_i * (1 - x_1 - ... - x_{i-1})` with `u_i` drawn from a base
//! distribution on `[0, 1)`. Everything here is `f64`.
//!
//! Monte Carlo trial `t` draws from its own ChaCha8 stream: the master seed
//! selects the key and `t` the stream number. Results therefore do not
//! depend on how trials are spread across worker threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{FiniteDistribution, Masses, RatioProfile, TruncatedDistribution};
use crate::error::{Error, Result};

/// Relative gap under which two distinct ratios count as a near-collision.
pub const NEAR_COLLISION_THRESHOLD: f64 = 1e-12;

/// Distribution of the unit-interval fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StickBase {
    Uniform,
    Beta { a: f64, b: f64 },
}

impl StickBase {
    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::OutOfRange { value: format!("beta({a}, {b})"), expected: "a > 0, b > 0" });
        }
        Ok(Self::Beta { a, b })
    }

    /// Parses `uniform` or `beta:a,b`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("uniform") {
            return Ok(Self::Uniform);
        }
        let params = t
            .strip_prefix("beta:")
            .ok_or_else(|| Error::Parse(format!("unknown base {text:?}, expected uniform or beta:a,b")))?;
        let (a, b) = params.split_once(',').ok_or_else(|| Error::Parse(format!("expected beta:a,b, got {text:?}")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        Self::beta(parse(a)?, parse(b)?)
    }

    /// A draw in `[0, 1)`; draws equal to one are repeated.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform => rng.random::<f64>(),
            Self::Beta { a, b } => {
                let beta = Beta::new(a, b).expect("parameters validated on construction");
                loop {
                    let u = beta.sample(rng);
                    if u < 1.0 {
                        return u;
                    }
                }
            }
        }
    }
}

impl fmt::Display for StickBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => write!(f, "uniform"),
            Self::Beta { a, b } => write!(f, "beta:{a},{b}"),
        }
    }
}

/// A stick-breaking draw together with the unit fractions that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StickSample {
    pub distribution: TruncatedDistribution<f64>,
    pub unit_draws: Vec<f64>,
    /// Mass left unassigned after each break; `1 - remainders[i]` is the
    /// `(i+1)`-th partial sum.
    pub remainders: Vec<f64>,
}

struct Broken {
    pieces: Vec<f64>,
    draws: Vec<f64>,
    remainders: Vec<f64>,
}

fn break_sticks<R: Rng + ?Sized>(rng: &mut R, pieces: usize, base: &StickBase) -> Broken {
    let mut remaining = 1.0f64;
    let mut pieces_out = Vec::with_capacity(pieces);
    let mut draws = Vec::with_capacity(pieces);
    let mut remainders = Vec::with_capacity(pieces);
    for _ in 0..pieces {
        let (u, x) = loop {
            let u = base.draw(rng);
            let x = u * remaining;
            // Half-open interval: never take the whole remainder.
            if x < remaining {
                break (u, x);
            }
        };
        remaining *= 1.0 - u;
        pieces_out.push(x);
        draws.push(u);
        remainders.push(remaining);
    }
    Broken { pieces: pieces_out, draws, remainders }
}

/// First `horizon` coordinates of a stick-breaking distribution; the
/// unassigned remainder is reported as the tail mass.
pub fn stick_breaking_sample<R: Rng + ?Sized>(rng: &mut R, horizon: usize, base: &StickBase) -> Result<StickSample> {
    if horizon < 2 {
        return Err(Error::TooShort { len: horizon, min: 2 });
    }
    let Broken { pieces, draws, remainders } = break_sticks(rng, horizon, base);
    let distribution = TruncatedDistribution::new(pieces, remainders[horizon - 1])?;
    Ok(StickSample { distribution, unit_draws: draws, remainders })
}

/// [`stick_breaking_sample`] from a fresh ChaCha8 generator seeded with `seed`.
pub fn stick_breaking_seeded(seed: u64, horizon: usize, base: &StickBase) -> Result<StickSample> {
    stick_breaking_sample(&mut ChaCha8Rng::seed_from_u64(seed), horizon, base)
}

/// Stick-breaking on `n` points: `n - 1` breaks, the last point takes the rest.
pub fn finite_stick_sample<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    base: &StickBase,
) -> Result<FiniteDistribution<f64>> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let Broken { mut pieces, remainders, .. } = break_sticks(rng, n - 1, base);
    pieces.push(remainders[n - 2]);
    FiniteDistribution::new(pieces)
}

/// Generator for Monte Carlo trial `trial` under master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub horizon: usize,
    pub base: StickBase,
    pub seed: u64,
    /// Worker threads; `0` or `1` runs on the calling thread.
    pub workers: usize,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub in_blindspot: bool,
    /// Zero-based smallest pair with bit-identical ratios.
    pub first_collision: Option<(usize, usize)>,
    /// Some pair of distinct ratios lies within the near-collision threshold.
    pub near_collision: bool,
    pub residual_mass: f64,
}

/// Aggregate over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub trials: u64,
    pub horizon: usize,
    pub base: String,
    pub seed: u64,
    pub in_blindspot: u64,
    pub exact_float_collisions: u64,
    /// Diagnostic only; these trials still count as in the blind spot.
    pub near_collisions: u64,
    pub near_collision_threshold: f64,
    pub mean_residual_mass: f64,
}

impl McReport {
    pub fn fraction_in_blindspot(&self) -> f64 {
        self.in_blindspot as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub report: McReport,
    pub records: Vec<TrialRecord>,
}

fn run_trial(prior: &[f64], config: &MonteCarloConfig, trial: u64) -> Result<TrialRecord> {
    let mut rng = trial_rng(config.seed, trial);
    let sample = stick_breaking_sample(&mut rng, config.horizon, &config.base)?;
    let profile = RatioProfile::from_slices(sample.distribution.prefix(), prior)?;
    let first_collision = profile.first_collision();
    let mut sorted: Vec<f64> = profile.ratios().to_vec();
    sorted.sort_by(f64::total_cmp);
    let near_collision = sorted
        .windows(2)
        .any(|w| w[0] != w[1] && (w[1] - w[0]).abs() <= NEAR_COLLISION_THRESHOLD * w[0].abs().max(w[1].abs()));
    Ok(TrialRecord {
        trial,
        in_blindspot: first_collision.is_none(),
        first_collision,
        near_collision,
        residual_mass: *sample.distribution.tail(),
    })
}

/// Samples `trials` stick-breaking distributions and checks each one's
/// first `horizon` ratios against `prior` for exact (bitwise) repeats.
pub fn monte_carlo_blindspot_fraction(prior: &[f64], config: &MonteCarloConfig) -> Result<MonteCarloRun> {
    if config.trials == 0 {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if prior.len() < config.horizon {
        return Err(Error::HorizonTooLarge { horizon: config.horizon, available: prior.len() });
    }
    let prior = &prior[..config.horizon];
    if let Some(index) = prior.iter().position(|p| p.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::ZeroPrior { index });
    }
    let records: Vec<TrialRecord> = if config.workers <= 1 {
        (0..config.trials).map(|t| run_trial(prior, config, t)).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
        pool.install(|| (0..config.trials).into_par_iter().map(|t| run_trial(prior, config, t)).collect::<Result<_>>())?
    };
    let in_blindspot = records.iter().filter(|r| r.in_blindspot).count() as u64;
    let near_collisions = records.iter().filter(|r| r.near_collision).count() as u64;
    // Sequential sum in trial order keeps the mean independent of scheduling.
    let residual_total: f64 = records.iter().map(|r| r.residual_mass).sum();
    let report = McReport {
        trials: config.trials,
        horizon: config.horizon,
        base: config.base.to_string(),
        seed: config.seed,
        in_blindspot,
        exact_float_collisions: config.trials - in_blindspot,
        near_collisions,
        near_collision_threshold: NEAR_COLLISION_THRESHOLD,
        mean_residual_mass: residual_total / config.trials as f64,
    };
    Ok(MonteCarloRun { report, records })
}
