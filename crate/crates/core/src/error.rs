use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("P requires zero-mean input (mode n = 0 is present)")]
    NonZeroMean,

    #[error("profile {0} lacks an exact second derivative")]
    MissingSecondDerivative(String),

    #[error("resolution budget exceeded: {needed} panels needed, at most {max} allowed")]
    ResolutionBudget { needed: usize, max: usize },

    #[error("insufficient dynamic range: {usable} usable points above the floor, need at least 3")]
    InsufficientDynamicRange { usable: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ε = {eps} too large: ε²·sup|v| = {bound} must stay below 1/2")]
    GaugeNotInvertible { eps: f64, bound: f64 },

    #[error("grid step {step} does not resolve the fast scale (need ≤ {required})")]
    UnderResolved { step: f64, required: f64 },

    #[error("step {step} too large (need ≤ {required})")]
    StepTooLarge { step: f64, required: f64 },

    #[error("κ = {0} not in the physical half-plane (Re κ must be positive)")]
    NotPhysical(num_complex::Complex64),

    #[error("κ = {kappa} is not a root: relative mismatch {residual:e}")]
    NotARoot { kappa: num_complex::Complex64, residual: f64 },

    #[error("sign-change scanning needs a real potential; use the Newton path for complex V")]
    ComplexPotential,

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
