use thiserror::Error;

/// Every failure the library can report. Variant names are stable and are
/// surfaced verbatim by the command-line runner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("SingularMatrix: |det| = {det:.3e} below guard {guard:.3e}")]
    SingularMatrix { det: f64, guard: f64 },

    #[error("NotLambdaStructured: {0}")]
    NotLambdaStructured(String),

    #[error("SpectralPole: lambda = {lambda} too close to detuning {delta}")]
    SpectralPole { lambda: String, delta: f64 },

    #[error("NotNormalized: state norm {norm} deviates from 1")]
    NotNormalized { norm: f64 },

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("DegenerateSeed: {0}")]
    DegenerateSeed(String),

    #[error("UnverifiedSeed: fundamental-matrix residual {residual:.3e} exceeds {tolerance:.1e}")]
    UnverifiedSeed { residual: f64, tolerance: f64 },

    #[error("DegeneratePsi: |det Psi1| = {det:.3e} below guard {guard:.3e}")]
    DegeneratePsi { det: f64, guard: f64 },

    #[error("DegenerateMapping: {0}")]
    DegenerateMapping(String),

    #[error("DegenerateConstants: {0}")]
    DegenerateConstants(String),

    #[error("ParameterGuard: {0}")]
    ParameterGuard(String),

    #[error("StepUnstable: density eigenvalue {eigenvalue:.3e} out of band at zeta = {zeta}, tau = {tau}")]
    StepUnstable { eigenvalue: f64, zeta: f64, tau: f64 },

    #[error("BoundaryMismatch: initial field deviates from background by {deviation:.3e}")]
    BoundaryMismatch { deviation: f64 },

    #[error("GridMismatch: {0}")]
    GridMismatch(String),

    #[error("FeatureLost: {0}")]
    FeatureLost(String),
}

impl Error {
    /// The bare variant name, e.g. `"SpectralPole"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NotLambdaStructured(_) => "NotLambdaStructured",
            Error::SpectralPole { .. } => "SpectralPole",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DegenerateSeed(_) => "DegenerateSeed",
            Error::UnverifiedSeed { .. } => "UnverifiedSeed",
            Error::DegeneratePsi { .. } => "DegeneratePsi",
            Error::DegenerateMapping(_) => "DegenerateMapping",
            Error::DegenerateConstants(_) => "DegenerateConstants",
            Error::ParameterGuard(_) => "ParameterGuard",
            Error::StepUnstable { .. } => "StepUnstable",
            Error::BoundaryMismatch { .. } => "BoundaryMismatch",
            Error::GridMismatch(_) => "GridMismatch",
            Error::FeatureLost(_) => "FeatureLost",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
