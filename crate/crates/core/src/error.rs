use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("eigenvalue {index} did not converge within {iterations} QL iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("matrix is singular (zero pivot at step {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("spectral parameter {z} lies within {distance:e} of the spectrum (tolerance {tolerance:e})")]
    InsideSpectrum {
        z: String,
        distance: f64,
        tolerance: f64,
    },

    #[error("point {0} lies on the support of the semicircle law")]
    OnSupport(String),

    #[error("invalid entry law: {0}")]
    InvalidLaw(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid deformation: {0}")]
    InvalidDeformation(String),

    #[error("spike θ = {theta} is not supercritical for σ = {sigma}")]
    Subcritical { theta: f64, sigma: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative limit-law variance {value} for {entry}")]
    NegativeVariance { entry: &'static str, value: f64 },

    #[error("block is not self-adjoint: defect {0:e}")]
    NotSelfAdjoint(f64),

    #[error("function support [{lo}, {hi}] does not contain the spectrum [{spec_lo}, {spec_hi}] in its interior")]
    SupportTooSmall {
        lo: f64,
        hi: f64,
        spec_lo: f64,
        spec_hi: f64,
    },

    #[error("quadrature budget exceeded: {nodes} nodes requested, limit {limit}")]
    QuadratureBudget { nodes: usize, limit: usize },

    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    #[error("finite-difference step underflow near the spectrum (step {0:e})")]
    StepUnderflow(f64),

    #[error("insufficient moments: need order {needed}, law provides {available}")]
    InsufficientMoments { needed: usize, available: usize },
}
