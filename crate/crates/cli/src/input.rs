//! Argument decoding: each structured argument is inline JSON or a path to a JSON file.

use std::fs;

use blindspot::jeffrey::Partition;
use blindspot::json::{AnyDistribution, DistributionDoc, WireNumber, WireScalar};
use blindspot::Rational;
use serde::Deserialize;
use serde_json::Value;

use crate::commands::CliError;

/// Inline JSON if the argument starts with `{` or `[`, otherwise a file path.
pub fn load_json(arg: &str) -> Result<Value, CliError> {
    let text = arg.trim_start();
    let text = if text.starts_with('{') || text.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid JSON in {arg:?}: {e}")))
}

pub fn decode<T: for<'de> Deserialize<'de>>(value: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("invalid {what}: {e}")))
}

pub fn distribution(arg: &str) -> Result<(Value, AnyDistribution<Rational>), CliError> {
    let value = load_json(arg)?;
    let doc: DistributionDoc = decode(value.clone(), "distribution")?;
    Ok((value, AnyDistribution::from_doc(&doc)?))
}

/// A list of distributions: a bare array or `{"priors": [...]}`.
pub fn distributions(arg: &str) -> Result<(Value, Vec<AnyDistribution<Rational>>), CliError> {
    let value = load_json(arg)?;
    let list = match &value {
        Value::Object(map) if map.contains_key("priors") => map["priors"].clone(),
        _ => value.clone(),
    };
    let docs: Vec<DistributionDoc> = decode(list, "prior list")?;
    if docs.is_empty() {
        return Err(CliError::Input("prior list is empty".into()));
    }
    let dists = docs.iter().map(AnyDistribution::from_doc).collect::<Result<Vec<_>, _>>()?;
    Ok((value, dists))
}

/// `{"blocks": [[1], [2, 3]]}` or the bare block list, one-based.
pub fn partition(arg: &str) -> Result<(Value, Partition), CliError> {
    let value = load_json(arg)?;
    let blocks = match &value {
        Value::Object(map) if map.contains_key("blocks") => map["blocks"].clone(),
        _ => value.clone(),
    };
    let blocks: Vec<Vec<usize>> = decode(blocks, "partition")?;
    Ok((value, Partition::from_one_based(blocks)?))
}

/// A bare array of numbers, or an object holding one under `key`.
pub fn scalars(arg: &str, key: &str) -> Result<(Value, Vec<Rational>), CliError> {
    let value = load_json(arg)?;
    let list = match &value {
        Value::Object(map) if map.contains_key(key) => map[key].clone(),
        _ => value.clone(),
    };
    let wires: Vec<WireNumber> = decode(list, key)?;
    let values = wires.iter().map(Rational::from_wire).collect::<Result<Vec<_>, _>>()?;
    Ok((value, values))
}

pub fn rational(arg: &str, what: &str) -> Result<Rational, CliError> {
    blindspot::rational::parse_rational(arg).map_err(|e| CliError::Input(format!("{what}: {e}")))
}
