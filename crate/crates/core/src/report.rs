use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one numerical or exact verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(default)]
    pub details: Value,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            check: check.into(),
            pass: max_residual.is_finite() && max_residual <= tolerance,
            max_residual,
            tolerance,
            samples,
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
