use std::fmt::Write as _;
use std::fs;

use blindspot::blindspot::{
    collision_count_prefix, membership_finite, membership_prefix, ratios_collide, MembershipStatus, PrefixStatus,
};
use blindspot::construct::{
    densify, exteriorize, generate_blindspot_member, multi_collision_near, CollisionBranch, Exteriorized,
};
use blindspot::distributions::{normalize, MassSequence, Masses, TruncatedDistribution};
use blindspot::jeffrey::{
    accessible_brute_force, coarsest_partition, is_nontrivial, jc_apply, ratio_constant_on_blocks, rigidity_holds,
    BlockWeights, BruteForceVerdict,
};
use blindspot::json::AnyDistribution;
use blindspot::metrics::{bounded_metric, lp_distance, Distance, DistanceBounds, NormKind};
use blindspot::rational::{format_rational, pow2_inv};
use blindspot::sampler::{monte_carlo_blindspot_fraction, stick_breaking_seeded, MonteCarloConfig, StickBase};
use blindspot::{Error, Rational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::certificate::Certificate;
use crate::input;
use crate::{
    BsCommand, Cli, DistCommand, Format, Group, JcCommand, EXIT_ACCESSIBLE, EXIT_HORIZON, EXIT_INPUT, EXIT_OK,
};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(msg) => f.write_str(msg),
            Self::Core(err) => write!(f, "{err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self::Core(err)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(Error::HorizonInsufficient(_) | Error::HorizonTooLarge { .. }) => EXIT_HORIZON,
            _ => EXIT_INPUT,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a subcommand produced, before formatting.
pub struct Outcome {
    pub payload: Value,
    pub summary: String,
    pub exit: u8,
    pub csv: Option<String>,
}

impl Outcome {
    fn new(payload: Value, summary: impl Into<String>) -> Self {
        Self { payload, summary: summary.into(), exit: EXIT_OK, csv: None }
    }

    fn exit(mut self, code: u8) -> Self {
        self.exit = code;
        self
    }

    fn csv(mut self, table: String) -> Self {
        self.csv = Some(table);
        self
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.group {
        Group::Jc(cmd) => run_jc(cmd),
        Group::Bs(cmd) => run_bs(cli, cmd),
        Group::Dist(cmd) => run_dist(cli, cmd),
    }
}

/// Writes the payload in the requested format and returns the exit code.
pub fn emit(cli: &Cli, outcome: Outcome) -> CliResult<u8> {
    let format = cli.format.unwrap_or_else(|| match &cli.out {
        Some(path) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let body = match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&outcome.payload).expect("values serialize");
            text.push('\n');
            text
        }
        Format::Csv => outcome.csv.ok_or_else(|| CliError::Input("this subcommand has no CSV output".into()))?,
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{body}"),
    }
    eprintln!("{}", outcome.summary);
    Ok(outcome.exit)
}

fn require_seed(cli: &Cli) -> CliResult<u64> {
    cli.seed.ok_or_else(|| CliError::Input("this subcommand is randomized and requires --seed".into()))
}

fn require_horizon(cli: &Cli) -> CliResult<usize> {
    cli.horizon.ok_or_else(|| CliError::Input("this subcommand requires --horizon".into()))
}

fn finite(dist: &AnyDistribution<Rational>, role: &str) -> CliResult<blindspot::ExactDistribution> {
    dist.as_finite().cloned().ok_or_else(|| CliError::Input(format!("{role} must be a finite distribution")))
}

fn strings(values: &[Rational]) -> Value {
    values.iter().map(format_rational).collect::<Vec<_>>().into()
}

fn one_based(pair: (usize, usize)) -> Value {
    json!([pair.0 + 1, pair.1 + 1])
}

fn truncated_doc(d: &TruncatedDistribution<Rational>) -> Value {
    AnyDistribution::Truncated(d.clone()).to_json_value()
}

fn distribution_csv(values: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from("index,mass\n");
    for (i, v) in values.into_iter().enumerate() {
        let _ = writeln!(out, "{},{v}", i + 1);
    }
    out
}

// ---------------------------------------------------------------- jc

fn run_jc(cmd: &JcCommand) -> CliResult<Outcome> {
    match cmd {
        JcCommand::Apply { prior, partition, weights } => {
            let (prior_json, prior) = input::distribution(prior)?;
            let p = finite(&prior, "prior")?;
            let (partition_json, e) = input::partition(partition)?;
            let (weights_json, w) = input::scalars(weights, "weights")?;
            let q = jc_apply(&p, &e, &BlockWeights::new(w)?)?;
            let inputs = json!({"prior": prior_json, "partition": partition_json, "weights": weights_json});
            let mut cert = Certificate::new("jc apply", &inputs, None);
            cert.claim("rigidity", e.to_string(), rigidity_holds(&p, &q, &e)?);
            cert.claim("ratio_constant_on_blocks", e.to_string(), ratio_constant_on_blocks(&p, &q, &e)?);
            let summary =
                format!("posterior ({})", q.probs().iter().map(format_rational).collect::<Vec<_>>().join(", "));
            let table = distribution_csv(q.probs().iter().map(format_rational));
            let payload = json!({
                "posterior": AnyDistribution::Finite(q).to_json_value(),
                "certificate": cert,
            });
            Ok(Outcome::new(payload, summary).csv(table))
        }
        JcCommand::Rigidity(args) => {
            let (_, prior) = input::distribution(&args.prior)?;
            let (_, posterior) = input::distribution(&args.posterior)?;
            let (p, q) = (finite(&prior, "prior")?, finite(&posterior, "posterior")?);
            let (_, e) = input::partition(&args.partition)?;
            let rigid = rigidity_holds(&p, &q, &e)?;
            let constant = ratio_constant_on_blocks(&p, &q, &e)?;
            let payload = json!({
                "partition": e,
                "nontrivial": is_nontrivial(&e),
                "rigidity_holds": rigid,
                "ratio_constant": constant,
            });
            Ok(Outcome::new(payload, format!("rigidity on {e}: {rigid}; ratio constancy: {constant}")))
        }
        JcCommand::Coarsest(args) => {
            let (_, prior) = input::distribution(&args.prior)?;
            let (_, posterior) = input::distribution(&args.posterior)?;
            let (p, q) = (finite(&prior, "prior")?, finite(&posterior, "posterior")?);
            let e = coarsest_partition(&p, &q)?;
            let nontrivial = is_nontrivial(&e);
            let payload = json!({"coarsest": e, "nontrivial": nontrivial});
            Ok(Outcome::new(payload, format!("coarsest witness partition {e} (nontrivial: {nontrivial})")))
        }
        JcCommand::Brute(args) => {
            let (_, prior) = input::distribution(&args.prior)?;
            let (_, posterior) = input::distribution(&args.posterior)?;
            let (p, q) = (finite(&prior, "prior")?, finite(&posterior, "posterior")?);
            let verdict = accessible_brute_force(&p, &q)?;
            let (payload, summary, code) = match &verdict {
                BruteForceVerdict::Accessible(e) => (
                    json!({"status": "accessible", "witness": e, "rigidity_holds": rigidity_holds(&p, &q, e)?}),
                    format!("accessible via {e}"),
                    EXIT_ACCESSIBLE,
                ),
                BruteForceVerdict::Inaccessible => (
                    json!({"status": "inaccessible", "witness": null}),
                    "no nontrivial partition works: posterior is in the blind spot".to_string(),
                    EXIT_OK,
                ),
            };
            Ok(Outcome::new(payload, summary).exit(code))
        }
    }
}

// ---------------------------------------------------------------- bs

fn run_bs(cli: &Cli, cmd: &BsCommand) -> CliResult<Outcome> {
    match cmd {
        BsCommand::Test(args) => bs_test(cli, &args.prior, &args.posterior),
        BsCommand::Construct { priors } => bs_construct(cli, priors),
        BsCommand::Densify { prior, target, epsilon } => bs_densify(cli, prior, target, epsilon),
        BsCommand::Exteriorize { prior, posterior, epsilon } => bs_exterior(cli, prior, posterior, None, epsilon),
        BsCommand::Multicollide { prior, posterior, pairs, epsilon } => {
            bs_exterior(cli, prior, posterior, Some(*pairs), epsilon)
        }
        BsCommand::Sample { base } => bs_sample(cli, base),
        BsCommand::Montecarlo { prior, trials, base } => bs_montecarlo(cli, prior, *trials, base),
    }
}

fn bs_test(cli: &Cli, prior: &str, posterior: &str) -> CliResult<Outcome> {
    let (_, prior) = input::distribution(prior)?;
    let (_, posterior) = input::distribution(posterior)?;
    if let (Some(p), Some(q), None) = (prior.as_finite(), posterior.as_finite(), cli.horizon) {
        let verdict = membership_finite(p, q)?;
        let member = verdict.status == MembershipStatus::InBlindSpot;
        let mut payload = json!({
            "mode": "finite",
            "status": if member { "in_blind_spot" } else { "accessible" },
            "witness": verdict.witness.map(one_based),
            "coarsest": verdict.coarsest,
        });
        if let Some((i, j)) = verdict.witness {
            payload["witness_verified"] = ratios_collide(p.probs(), q.probs(), i, j).into();
        }
        let summary = match verdict.witness {
            None => "in the blind spot: all ratios are pairwise distinct".to_string(),
            Some((i, j)) => format!("accessible: ratios {} and {} coincide", i + 1, j + 1),
        };
        return Ok(Outcome::new(payload, summary).exit(if member { EXIT_OK } else { EXIT_ACCESSIBLE }));
    }
    let horizon = match cli.horizon {
        Some(n) => n,
        None => match (prior.available(), posterior.available()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return Err(CliError::Input("--horizon is required for two parametric inputs".into())),
        },
    };
    let verdict = membership_prefix(&prior, &posterior, horizon)?;
    let mut payload = json!({
        "mode": "prefix",
        "horizon": horizon,
        "horizon_limited": true,
        "label": verdict.to_string(),
    });
    let code = match verdict.status {
        PrefixStatus::PrefixDistinct => {
            payload["status"] = "prefix_distinct".into();
            payload["witness"] = Value::Null;
            EXIT_OK
        }
        PrefixStatus::CollisionFound { i, j } => {
            payload["status"] = "collision_found".into();
            payload["witness"] = one_based((i, j));
            let (p, q) = (prior.head(horizon)?, posterior.head(horizon)?);
            payload["witness_verified"] = verdict.verify_collision(&p, &q).into();
            EXIT_ACCESSIBLE
        }
    };
    Ok(Outcome::new(payload, verdict.to_string()).exit(code))
}

fn bs_construct(cli: &Cli, priors_arg: &str) -> CliResult<Outcome> {
    let seed = require_seed(cli)?;
    let horizon = require_horizon(cli)?;
    let (priors_json, priors) = input::distributions(priors_arg)?;
    let generated = generate_blindspot_member(&priors, horizon, seed)?;
    let q = &generated.distribution;

    let inputs = json!({"priors": priors_json, "horizon": horizon});
    let mut cert = Certificate::new("bs construct", &inputs, Some(seed));
    let total: Rational = q.prefix().iter().sum::<Rational>() + q.tail();
    cert.claim("unit_mass", "1", total.is_one());
    let bounded = generated.masses.first().is_some_and(|m| *m == pow2_inv(1))
        && generated.masses.iter().enumerate().skip(1).all(|(i, m)| m.is_positive() && *m < pow2_inv(i as u32 + 1));
    cert.claim("m_1 = 1/2 and 0 < m_i < 2^-i", horizon, bounded);
    let mut verdicts = Vec::with_capacity(priors.len());
    for (k, prior) in priors.iter().enumerate() {
        let v = membership_prefix(prior, q, horizon)?;
        cert.claim(format!("prefix_distinct against prior {}", k + 1), horizon, v.is_distinct());
        verdicts.push(v.to_string());
    }
    cert.set_bounds(Value::Null, Value::Null, verdicts);

    let summary = format!(
        "generated a member of the common blind spot of {} prior(s) at N={horizon} ({} candidates rejected); certificate {}",
        priors.len(),
        generated.rejected,
        if cert.all_verified() { "verified" } else { "NOT verified" }
    );
    let table = distribution_csv(q.prefix().iter().map(format_rational));
    let payload = json!({
        "distribution": truncated_doc(q),
        "masses": strings(&generated.masses),
        "rejected": generated.rejected,
        "certificate": cert,
    });
    Ok(Outcome::new(payload, summary).csv(table))
}

fn bs_densify(cli: &Cli, prior: &str, target: &str, epsilon: &str) -> CliResult<Outcome> {
    let seed = require_seed(cli)?;
    let (prior_json, prior) = input::distribution(prior)?;
    let (target_json, target) = input::distribution(target)?;
    let target = target.to_truncated(cli.horizon)?;
    let eps = input::rational(epsilon, "--epsilon")?;
    let out = densify(&prior, &target, &eps, seed)?;
    let r = &out.distribution;
    let horizon = r.horizon();

    let inputs =
        json!({"prior": prior_json, "target": target_json, "epsilon": format_rational(&eps), "horizon": horizon});
    let mut cert = Certificate::new("bs densify", &inputs, Some(seed));
    let bound = Rational::from_integer(4.into()) * &eps;
    let distance = lp_distance(r, &target, &NormKind::l1())?;
    cert.claim("l1 distance to target < 4 epsilon", format_rational(&bound), distance.certifies_below(&bound));
    let verdict = membership_prefix(&prior, r, horizon)?;
    cert.claim("prefix_distinct", horizon, verdict.is_distinct());
    cert.set_bounds(format_rational(&bound).into(), distance_text(&distance.upper).into(), vec![verdict.to_string()]);

    let nudged = out.nudges.iter().filter(|d| !d.is_zero()).count();
    let summary = format!(
        "densified within l1 <= {} < 4 eps = {} ({nudged} coordinate(s) nudged); {verdict}",
        distance_text(&distance.upper),
        format_rational(&bound)
    );
    let table = distribution_csv(r.prefix().iter().map(format_rational));
    let payload = json!({
        "distribution": truncated_doc(r),
        "nudges": strings(&out.nudges),
        "certificate": cert,
    });
    Ok(Outcome::new(payload, summary).csv(table))
}

fn bs_exterior(cli: &Cli, prior: &str, member: &str, pairs: Option<usize>, epsilon: &str) -> CliResult<Outcome> {
    let (prior_json, prior) = input::distribution(prior)?;
    let (member_json, member) = input::distribution(member)?;
    let member = member.to_truncated(cli.horizon)?;
    let eps = input::rational(epsilon, "--epsilon")?;
    let out: Exteriorized = match pairs {
        None => exteriorize(&prior, &member, &eps)?,
        Some(l) => multi_collision_near(&prior, &member, l, &eps)?,
    };
    let q = &out.distribution;
    let horizon = q.horizon();
    let ell = out.moves.len();
    let operation = if pairs.is_some() { "bs multicollide" } else { "bs exteriorize" };

    let mut inputs =
        json!({"prior": prior_json, "posterior": member_json, "epsilon": format_rational(&eps), "horizon": horizon});
    if let Some(l) = pairs {
        inputs["pairs"] = l.into();
    }
    let mut cert = Certificate::new(operation, &inputs, None);
    let bound = Rational::from_integer((2 * ell).into()) * &eps;
    let distance = lp_distance(q, &member, &NormKind::l1())?;
    cert.claim(
        format!("l1 distance to input < {}", if ell == 1 { "2 epsilon".into() } else { format!("2*{ell}*epsilon") }),
        format_rational(&bound),
        distance.certifies_below(&bound),
    );
    let p = prior.head(horizon)?;
    let qh = q.prefix().to_vec();
    for mv in &out.moves {
        let ok = mv.index < horizon && ratios_collide(&p, &qh, 0, mv.index);
        cert.claim(format!("ratio collision (1, {})", mv.index + 1), Value::Null, ok);
    }
    let count = collision_count_prefix(&prior, q, horizon)?;
    cert.claim("collision_count >= pairs", ell, count >= ell);
    cert.set_bounds(
        format_rational(&bound).into(),
        distance_text(&distance.upper).into(),
        vec![format!("collision_count={count}")],
    );

    let moves: Vec<Value> = out
        .moves
        .iter()
        .map(|mv| {
            json!({
                "index": mv.index + 1,
                "branch": match mv.branch { CollisionBranch::RaiseNext => "raise_next", CollisionBranch::DrawFromPivot => "draw_from_pivot" },
                "compensated": mv.compensated + 1,
                "shift": format_rational(&mv.shift),
            })
        })
        .collect();
    let summary = format!(
        "{ell} collision move(s), pivot {}; l1 <= {} < {}; {count} colliding pair(s)",
        out.pivot + 1,
        distance_text(&distance.upper),
        format_rational(&bound)
    );
    let table = distribution_csv(q.prefix().iter().map(format_rational));
    let payload = json!({
        "distribution": truncated_doc(q),
        "pivot": out.pivot + 1,
        "threshold_index": out.threshold_index + 1,
        "moves": moves,
        "collision_count": count,
        "certificate": cert,
    });
    Ok(Outcome::new(payload, summary).csv(table))
}

fn bs_sample(cli: &Cli, base: &str) -> CliResult<Outcome> {
    let seed = require_seed(cli)?;
    let horizon = require_horizon(cli)?;
    let base = StickBase::parse(base)?;
    let sample = stick_breaking_seeded(seed, horizon, &base)?;
    let d = &sample.distribution;
    let table = distribution_csv(d.prefix().iter().map(|x| x.to_string()));
    let payload = json!({
        "distribution": AnyDistribution::Truncated(d.clone()).to_json_value(),
        "base": base.to_string(),
        "horizon": horizon,
        "seed": seed,
    });
    let summary = format!("stick-breaking sample, base {base}, N={horizon}, residual mass {:e}", d.tail());
    Ok(Outcome::new(payload, summary).csv(table))
}

fn bs_montecarlo(cli: &Cli, prior: &str, trials: u64, base: &str) -> CliResult<Outcome> {
    let seed = require_seed(cli)?;
    let horizon = require_horizon(cli)?;
    let base = StickBase::parse(base)?;
    let (_, prior) = input::distribution(prior)?;
    let head: Vec<f64> = prior
        .head(horizon)?
        .iter()
        .map(|x| x.to_f64().ok_or_else(|| CliError::Input("prior mass does not fit in f64".into())))
        .collect::<CliResult<_>>()?;
    let config = MonteCarloConfig { trials, horizon, base, seed, workers: cli.workers };
    let run = monte_carlo_blindspot_fraction(&head, &config)?;
    let report = &run.report;

    let mut table = String::from("trial,in_blindspot,first_collision_i,first_collision_j,residual_mass\n");
    for r in &run.records {
        let (i, j) = match r.first_collision {
            Some((i, j)) => ((i + 1).to_string(), (j + 1).to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(table, "{},{},{i},{j},{:e}", r.trial, r.in_blindspot, r.residual_mass);
    }
    let summary = format!(
        "{} of {} trials prefix-distinct at N={} (fraction {}); {} exact float collisions, {} near collisions",
        report.in_blindspot,
        report.trials,
        report.horizon,
        report.fraction_in_blindspot(),
        report.exact_float_collisions,
        report.near_collisions
    );
    let mut payload = serde_json::to_value(report).expect("report serializes");
    payload["fraction_in_blindspot"] = report.fraction_in_blindspot().into();
    Ok(Outcome::new(payload, summary).csv(table))
}

// ---------------------------------------------------------------- dist

fn run_dist(cli: &Cli, cmd: &DistCommand) -> CliResult<Outcome> {
    match cmd {
        DistCommand::Normalize { values } => {
            let (_, values) = input::scalars(values, "values")?;
            let d = normalize(&values)?;
            let table = distribution_csv(d.probs().iter().map(format_rational));
            let summary = format!("normalized {} values", d.probs().len());
            Ok(Outcome::new(json!({"distribution": AnyDistribution::Finite(d).to_json_value()}), summary).csv(table))
        }
        DistCommand::Distance { left, right, norm, bounded } => {
            let norm = NormKind::parse(norm)?;
            let (_, left) = input::distribution(left)?;
            let (_, right) = input::distribution(right)?;
            let (u, v) = (left.to_truncated(cli.horizon)?, right.to_truncated(cli.horizon)?);
            let (u, v) = match cli.horizon {
                Some(n) => (cut(&u, n)?, cut(&v, n)?),
                None => (u, v),
            };
            let bounds = if *bounded { bounded_metric(&u, &v, &norm)? } else { lp_distance(&u, &v, &norm)? };
            let exact = matches!(bounds.lower, Distance::Scalar(_));
            let mut payload = json!({
                "norm": norm.to_string(),
                "bounded": bounded,
                "exact": exact,
                "tight": bounds.is_tight(),
                "lower": distance_text(&bounds.lower),
                "upper": distance_text(&bounds.upper),
            });
            if bounds.is_tight() {
                payload["distance"] = distance_text(&bounds.lower).into();
            }
            let summary = describe_bounds(&bounds, &norm, *bounded);
            Ok(Outcome::new(payload, summary))
        }
    }
}

/// Re-truncates a stored prefix at `n`, folding the rest into the tail.
fn cut(d: &TruncatedDistribution<Rational>, n: usize) -> CliResult<TruncatedDistribution<Rational>> {
    if n > d.horizon() {
        return Err(Error::HorizonTooLarge { horizon: n, available: d.horizon() }.into());
    }
    let head = d.head(n)?;
    Ok(TruncatedDistribution::new(head, d.mass_beyond(n)?)?)
}

fn distance_text(d: &Distance<Rational>) -> String {
    match d {
        Distance::Scalar(v) => format_rational(v),
        Distance::Float(x) => format!("{x:.12}"),
    }
}

fn describe_bounds(b: &DistanceBounds<Rational>, norm: &NormKind, bounded: bool) -> String {
    let name = if bounded { format!("bounded {norm}") } else { norm.to_string() };
    if b.is_tight() {
        format!("{name} distance = {}", distance_text(&b.lower))
    } else {
        format!("{name} distance in [{}, {}]", distance_text(&b.lower), distance_text(&b.upper))
    }
}
