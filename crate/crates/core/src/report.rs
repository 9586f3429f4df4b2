//! Machine-readable separability verdicts.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Separable,
    Nonseparable,
    /// Separable, and within the boundary tolerance of the threshold.
    Boundary,
    /// Between the proven separable and proven nonseparable thresholds.
    Undetermined,
}

impl Verdict {
    pub fn is_separable(self) -> bool {
        matches!(self, Verdict::Separable | Verdict::Boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub name: String,
    pub value: f64,
}

/// One term of a separable decomposition: a named product component and its weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTerm {
    pub member: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityReport {
    pub family: String,
    pub epsilon: f64,
    pub threshold: f64,
    /// Exact rational form of `threshold`, e.g. "1/4".
    pub threshold_exact: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<DecompositionTerm>>,
}

impl SeparabilityReport {
    pub fn witness(&self, name: &str) -> Option<f64> {
        self.witnesses.iter().find(|w| w.name == name).map(|w| w.value)
    }
}
