use serde::{Deserialize, Serialize};

/// Standard errors allowed between estimate and target.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

/// Largest accepted `stderr / |target|` when the target is nonzero.
pub const REL_STDERR_CAP: f64 = 0.02;

/// How a verdict is reached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Pass iff `residual ≤ tolerance`.
    Deterministic { residual: f64, tolerance: f64 },
    /// Pass iff `|estimate − target| ≤ 3·stderr` and, for a nonzero target,
    /// `stderr ≤ 2% |target|`.
    Stochastic { estimate: [f64; 2], target: [f64; 2], stderr: f64, samples: usize },
    /// Pass iff both sides agree exactly.
    Exact { lhs: String, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub inputs: serde_json::Value,
    pub outcome: Outcome,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

impl Outcome {
    pub fn verdict(&self) -> bool {
        match self {
            Outcome::Deterministic { residual, tolerance } => residual <= tolerance,
            Outcome::Stochastic { estimate, target, stderr, .. } => {
                let dev = (estimate[0] - target[0]).hypot(estimate[1] - target[1]);
                let t = target[0].hypot(target[1]);
                dev <= SIGMA_MULTIPLIER * stderr && (t == 0.0 || *stderr <= REL_STDERR_CAP * t)
            }
            Outcome::Exact { lhs, rhs } => lhs == rhs,
        }
    }
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, inputs: serde_json::Value, outcome: Outcome) -> Self {
        let passed = outcome.verdict();
        Self { check: check.into(), inputs, outcome, passed, runtime_ms: None }
    }

    /// Verdict from the stored fields alone.
    pub fn recompute_verdict(&self) -> bool {
        self.outcome.verdict()
    }

    pub fn with_runtime(mut self, ms: f64) -> Self {
        self.runtime_ms = Some(ms);
        self
    }

    /// One JSON line; byte-identical across replays unless a runtime is set.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
