use thiserror::Error;

/// Failure modes of the analytic engine, the Fock oracle and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JanusError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular overlap: |1 - z| = {0:e} is below the branch-point guard")]
    SingularOverlap(f64),

    #[error("no normalized state exists for |eta| = {eta} (discriminant {discriminant:e})")]
    InfeasibleAmplitude { eta: f64, discriminant: f64 },

    #[error("state is not normalized: residual {residual:e} exceeds tolerance {tol:e}")]
    Unnormalized { residual: f64, tol: f64 },

    #[error("g2 undefined for vacuum: mean photon number {0:e}")]
    VacuumDominated(f64),

    #[error("series order {0} unsupported (terms through sinh^6 only, order <= 3)")]
    UnsupportedOrder(usize),

    #[error("cutoff {cutoff} too small: truncated tail bound {tail:e} exceeds {target:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64, target: f64 },

    #[error("cutoff {0} must be even and at least 2")]
    BadCutoff(usize),

    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(usize, usize),

    #[error("zero vector: norm^2 = {0:e}")]
    ZeroVector(f64),

    #[error("every grid point is infeasible ({0} points skipped)")]
    EmptyFeasibleSet(usize),

    #[error("formula mismatch: {0}")]
    FormulaMismatch(String),
}

pub type Result<T> = std::result::Result<T, JanusError>;
