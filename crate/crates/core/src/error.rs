use thiserror::Error;

/// Errors shared across the library. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) used by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid resolution {0}: must be even and >= 4 (antipodal pairing)")]
    InvalidResolution(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integrand contains a non-finite value at index {0}")]
    NonFiniteIntegrand(usize),
    #[error("origin is not in the interior of the body (support {0} <= 0)")]
    OriginNotInterior(f64),
    #[error("operation unsupported in dimension {0}")]
    UnsupportedDimension(usize),
    #[error("smooth body has no curvature samples")]
    MissingCurvature,
    #[error("support profile is not convex: curvature {0} <= 0")]
    NotConvexProfile(f64),
    #[error("transform is not unimodular: |det| = {0}")]
    NotUnimodular(f64),
    #[error("degenerate random sample after {0} retries")]
    DegenerateSample(usize),
    #[error("phi evaluated outside its domain: t = {0}")]
    DomainError(f64),
    #[error("phi produced a non-finite or non-positive value at t = {0}")]
    RangeError(f64),
    #[error("analytic class {analytic} disagrees with numerical audit {audit}")]
    ClassificationConflict { analytic: String, audit: String },
    #[error("F_phi is within tolerance of proportional-to-t (phi ~ t^-n is excluded)")]
    NearDegenerate,
    #[error("phi classifies Neither: functional optimization is undefined")]
    UnclassifiedPhi,
    #[error("supremum iterates diverge: the functional appears unbounded")]
    Diverging,
    #[error("phi vector mixes Phi and Psi classes")]
    MixedClassConflict,
    #[error("density measures use incompatible grids")]
    IncompatibleGrids,
    #[error("p = -n is excluded for L_p surface area functionals")]
    PEqualsMinusN,
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("phi class does not match suite requirements: {0}")]
    ClassMismatch(String),
    #[error("parse error: {0}")]
    ParseError(String),
}

impl Error {
    /// Stable one-word code for machine consumption.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidResolution(_) => "InvalidResolution",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteIntegrand(_) => "NonFiniteIntegrand",
            Error::OriginNotInterior(_) => "OriginNotInterior",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::MissingCurvature => "MissingCurvature",
            Error::NotConvexProfile(_) => "NotConvexProfile",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::DomainError(_) => "DomainError",
            Error::RangeError(_) => "RangeError",
            Error::ClassificationConflict { .. } => "ClassificationConflict",
            Error::NearDegenerate => "NearDegenerate",
            Error::UnclassifiedPhi => "UnclassifiedPhi",
            Error::Diverging => "Diverging",
            Error::MixedClassConflict => "MixedClassConflict",
            Error::IncompatibleGrids => "IncompatibleGrids",
            Error::PEqualsMinusN => "PEqualsMinusN",
            Error::UnknownSuite(_) => "UnknownSuite",
            Error::ClassMismatch(_) => "ClassMismatch",
            Error::ParseError(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
