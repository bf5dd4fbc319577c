use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Machine-checkable record of what a construction claims and whether an
/// independent re-check confirmed it.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub operation: String,
    pub inputs_digest: String,
    pub claims: Vec<Claim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Construction summary: the bound promised, the bound re-derived, and
    /// the membership verdicts of the output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_claimed: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_certified: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub property: String,
    pub bound_or_value: Value,
    pub verified: bool,
}

impl Certificate {
    pub fn new(operation: &str, inputs: &Value, seed: Option<u64>) -> Self {
        Self {
            operation: operation.to_string(),
            inputs_digest: digest(inputs),
            claims: Vec::new(),
            seed,
            bound_claimed: None,
            bound_certified: None,
            verdicts: None,
        }
    }

    pub fn set_bounds(&mut self, claimed: Value, certified: Value, verdicts: Vec<String>) {
        self.bound_claimed = Some(claimed);
        self.bound_certified = Some(certified);
        self.verdicts = Some(verdicts);
    }

    pub fn claim(&mut self, property: impl Into<String>, bound_or_value: impl Into<Value>, verified: bool) {
        self.claims.push(Claim { property: property.into(), bound_or_value: bound_or_value.into(), verified });
    }

    pub fn all_verified(&self) -> bool {
        self.claims.iter().all(|c| c.verified)
    }
}

/// SHA-256 of the compact JSON rendering (object keys sorted).
pub fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}
