use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid species: {0}")]
    InvalidSpecies(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// No activity tilt makes the system charge symmetric.
    #[error("not charge symmetrizable: {0}")]
    NotSymmetrizable(String),

    #[error("dimension {dimension} unsupported: {context}")]
    DimensionUnsupported { dimension: u32, context: String },

    /// A momentum sum diverges at zero ultraviolet cutoff.
    #[error("positive cutoff required: {0}")]
    CutoffRequired(String),

    /// The requested zero-cutoff limit does not exist for this geometry
    /// and self-energy convention.
    #[error("no finite zero-cutoff limit: {0}")]
    NoFiniteLimit(String),

    #[error("failed to converge: {0}")]
    NonConvergence(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("configuration is not charge neutral (total charge {0})")]
    NotNeutral(i64),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("work budget exceeded: needs about {needed:.3e} enumeration steps, budget {budget}")]
    WorkBudgetExceeded { needed: f64, budget: u64 },

    #[error("bad run configuration: {0}")]
    Config(String),
}
