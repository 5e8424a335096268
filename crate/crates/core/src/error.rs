use thiserror::Error;

/// Errors raised by the geometric and linear-algebra operations of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector {index} is linearly dependent on its predecessors (residual {residual:e})")]
    DependentInput { index: usize, residual: f64 },

    #[error("numerical rank is ambiguous: spectral gap {spectral_gap:e} is below 1e3")]
    AmbiguousRank { spectral_gap: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not skew-symmetric (residual {residual:e})")]
    NotSkew { residual: f64 },

    #[error("bivector is not decomposable (|<a, *a>| / |a|^2 = {residual:e})")]
    NotDecomposable { residual: f64 },

    #[error("bivector does not have unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("orthogonality violated (residual {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("bivector has no preimage on the requested sphere (residual {residual:e})")]
    OffSphere { residual: f64 },

    #[error("not an orthogonal complex structure: {condition} (residual {residual:e})")]
    NotComplexStructure {
        condition: &'static str,
        residual: f64,
    },

    #[error("sign is numerically ambiguous (determinant indistinguishable from zero)")]
    AmbiguousSign,

    #[error("kernel is not invariant under the complex structure (residual {residual:e})")]
    KernelNotInvariant { residual: f64 },

    #[error(
        "fixed-point iteration did not converge after {iterations} steps (last step {step:e})"
    )]
    NoConvergence { iterations: usize, step: f64 },

    #[error("could not sample a second point on a different fiber")]
    DegenerateSampling,

    #[error("rotation field is not linear (fit residual {residual:e})")]
    NotLinear { residual: f64 },

    #[error("not an orthogonal quaternionic structure: {identity} (residual {residual:e})")]
    NotQuaternionic {
        identity: &'static str,
        residual: f64,
    },

    #[error("sphere map is not distance-decreasing (worst sampled ratio {ratio})")]
    NotDistanceDecreasing { ratio: f64 },

    #[error("quaternionic structures must have opposite signs")]
    SameSign,

    #[error("invalid field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
