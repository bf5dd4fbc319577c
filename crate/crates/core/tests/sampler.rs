use blindspot::distributions::Masses;
use blindspot::sampler::{
    monte_carlo_blindspot_fraction, stick_breaking_sample, stick_breaking_seeded, trial_rng, MonteCarloConfig,
    StickBase,
};
use proptest::prelude::*;

fn halving(n: usize) -> Vec<f64> {
    (1..=n).map(|i| 0.5f64.powi(i as i32)).collect()
}

proptest! {
    #[test]
    fn remainders_shrink_and_mass_is_conserved(seed in any::<u64>(), n in 2usize..100, a in 0.2f64..4.0, b in 0.2f64..4.0) {
        let base = StickBase::beta(a, b).unwrap();
        let s = stick_breaking_seeded(seed, n, &base).unwrap();
        let d = &s.distribution;
        prop_assert!(d.prefix().iter().all(|x| *x > 0.0 || *d.tail() == 0.0));
        prop_assert!(s.remainders.windows(2).all(|w| w[1] <= w[0]));
        let total: f64 = d.prefix().iter().sum::<f64>() + d.tail();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_samples_repeat(seed in any::<u64>()) {
        let a = stick_breaking_seeded(seed, 20, &StickBase::Uniform).unwrap();
        let b = stick_breaking_seeded(seed, 20, &StickBase::Uniform).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn uniform_means_halve() {
    let n = 20_000;
    let mut sums = [0.0; 4];
    for t in 0..n {
        let s = stick_breaking_sample(&mut trial_rng(1, t), 8, &StickBase::Uniform).unwrap();
        for (acc, x) in sums.iter_mut().zip(s.distribution.prefix()) {
            *acc += x;
        }
    }
    for (i, sum) in sums.iter().enumerate() {
        assert!((sum / n as f64 - 0.5f64.powi(i as i32 + 1)).abs() < 0.01, "coordinate {}", i + 1);
    }
}

#[test]
fn beta_base_mean_matches() {
    // E[x_1] = a / (a + b).
    let base = StickBase::beta(2.0, 6.0).unwrap();
    let n = 20_000;
    let mean = (0..n)
        .map(|t| stick_breaking_sample(&mut trial_rng(2, t), 2, &base).unwrap().distribution.prefix()[0])
        .sum::<f64>()
        / n as f64;
    assert!((mean - 0.25).abs() < 0.01, "{mean}");
}

#[test]
fn monte_carlo_ignores_worker_count() {
    let prior = halving(40);
    let run = |workers| {
        let config = MonteCarloConfig { trials: 2000, horizon: 40, base: StickBase::Uniform, seed: 5, workers };
        monte_carlo_blindspot_fraction(&prior, &config).unwrap()
    };
    let (one, four) = (run(1), run(4));
    assert_eq!(one.records, four.records);
    assert_eq!(serde_json::to_string(&one.report).unwrap(), serde_json::to_string(&four.report).unwrap());
    assert_eq!(one.report.fraction_in_blindspot(), 1.0);
}

#[test]
fn monte_carlo_rejects_bad_configs() {
    let base = StickBase::Uniform;
    let cfg = |trials, horizon| MonteCarloConfig { trials, horizon, base, seed: 0, workers: 1 };
    assert!(monte_carlo_blindspot_fraction(&halving(10), &cfg(0, 10)).is_err());
    assert!(monte_carlo_blindspot_fraction(&halving(10), &cfg(5, 20)).is_err());
    let mut zero = halving(10);
    zero[3] = 0.0;
    assert!(monte_carlo_blindspot_fraction(&zero, &cfg(5, 10)).is_err());
}

#[test]
fn base_names_round_trip() {
    for text in ["uniform", "beta:2,3", "beta:0.5,1.5"] {
        assert_eq!(StickBase::parse(text).unwrap().to_string(), text);
    }
    assert!(StickBase::parse("beta:0,1").is_err());
    assert!(StickBase::parse("gamma").is_err());
}
