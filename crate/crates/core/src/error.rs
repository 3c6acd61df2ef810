use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    /// Mean-field closed forms need Δ ≠ 0.
    #[error("detuning must be non-zero for the mean-field solution")]
    DegenerateDetuning,

    #[error("mean-field solution requires delta_c == delta_a (got {delta_c} and {delta_a})")]
    UnequalDetuning { delta_c: f64, delta_a: f64 },

    #[error("coupling lambda must be positive")]
    ZeroCoupling,

    /// |Z| > 1/2: no real field amplitude on the spin shell.
    #[error("z = {z} lies off the spin shell")]
    OffShell { z: f64 },

    /// Z = 0 branch: the spin-shell normalization has no finite amplitude.
    #[error("branch at z = {z} has no finite amplitude")]
    UnboundedAmplitude { z: f64 },

    #[error("eigenvalue solver did not converge")]
    EigenFailure,

    #[error(
        "drift matrix is not strictly stable on the solved subspace (max Re = {max_real_part:e})"
    )]
    UnstableDrift { max_real_part: f64 },

    #[error("closed-form variance has a vanishing denominator")]
    BoundaryPole,

    #[error("no stable fixed point")]
    NoStableSolution,

    #[error("steady-state solve did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("integrator step rejected at t = {t} (dt = {dt:e})")]
    StepRejected { t: f64, dt: f64 },

    #[error("Fock cutoff too small: {tail_population:e} population in the top band")]
    CutoffTooSmall { tail_population: f64 },

    #[error("Hilbert space too large: dimension {dimension} (limit {limit})")]
    DimensionTooLarge { dimension: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),
}
