use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CasimirError {
    /// Argument outside the domain of a closed-form expression.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Φ is undefined when both f and the gap vanish (only at ζ = y = 0).
    #[error("degenerate point: f = 0 and gap = 0")]
    DegeneratePoint,

    /// Graphene-dressed coefficient evaluated exactly on the light cone y = ζ > 0.
    #[error("singular point y = zeta = {zeta}")]
    SingularPoint { zeta: f64 },

    /// e^y - r1 r2 <= 0, impossible for |r| <= 1 and y > 0.
    #[error("mode singularity at zeta = {zeta}, y = {y}")]
    ModeSingularity { zeta: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// An integral failed to reach tolerance within its subdivision budget.
    #[error("integration did not converge: value {value:e}, error estimate {error:e}")]
    Integration { value: f64, error: f64 },

    /// The Matsubara sum hit its cutoff before the truncation rule fired.
    #[error("Matsubara sum not converged after {terms} terms: partial {partial:e} Pa")]
    Convergence {
        terms: usize,
        partial: f64,
        last_term: f64,
    },

    #[error("material data error at line {line}: {message}")]
    MaterialData { line: usize, message: String },

    #[error("unknown material '{0}'")]
    UnknownMaterial(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CasimirError {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        CasimirError::Domain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CasimirError>;
