use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One failed feasibility constraint of a flow profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub player: usize,
    pub constraint: String,
    pub magnitude: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "player {}: {} (off by {:e})",
            self.player, self.constraint, self.magnitude
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("latency is undefined for negative flow {0}")]
    NegativeFlow(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible flow profile: {}", format_violations(.0))]
    InfeasibleProfile(Vec<Violation>),

    #[error("parameter regime violated: {0}")]
    ParameterRegime(String),

    #[error("degree-of-cooperation row {row}: {detail}")]
    DocRow { row: usize, detail: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
