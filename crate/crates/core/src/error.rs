use thiserror::Error;

/// Errors raised by the numeric kernel and the foliation, moduli and holonomy layers.
///
/// Every variant has a stable string code (see [`Error::code`]) used in reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("resultant vanishes identically (common polynomial factor)")]
    IdenticallyZeroResultant,
    #[error("newton step is ill-posed: singular jacobian")]
    SingularJacobian,
    #[error("common factor of P and Q: singular points are not isolated")]
    NonIsolatedSingularities,
    #[error("degenerate singular point: {0}")]
    DegenerateSingularity(String),
    #[error("top-degree part is radial: line at infinity is not invariant")]
    DicriticalAtInfinity,
    #[error("line is not invariant for the field")]
    LineNotInvariant,
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("expected {expected} singular points, found {found}")]
    SingularCountMismatch { expected: usize, found: usize },
    #[error("need at least three finite nondegenerate singular points, found {0}")]
    TooFewFiniteSingularities(usize),
    #[error("anchor singular points are collinear")]
    CollinearSingularities,
    #[error("label tracking failed: a singular point moved {moved:.3e} (trust radius {radius:.3e})")]
    LabelTrackingFailure { moved: f64, radius: f64 },
    #[error("trajectory left the chart (|u| = {0:.3e})")]
    TrajectoryEscape(f64),
    #[error("integrator exceeded {0} steps")]
    StepLimitExceeded(usize),
    #[error("transversal vanishes on the path (|V| = {0:.3e})")]
    NearSingularTransversal(f64),
    #[error("extrapolation unstable: successive estimates differ by {0:.3e}")]
    ExtrapolationUnstable(f64),
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable identifier, identical to the variant name.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::NoConvergence(_) => "NoConvergence",
            Error::IdenticallyZeroResultant => "IdenticallyZeroResultant",
            Error::SingularJacobian => "SingularJacobian",
            Error::NonIsolatedSingularities => "NonIsolatedSingularities",
            Error::DegenerateSingularity(_) => "DegenerateSingularity",
            Error::DicriticalAtInfinity => "DicriticalAtInfinity",
            Error::LineNotInvariant => "LineNotInvariant",
            Error::DegreeOverflow(_) => "DegreeOverflow",
            Error::SingularCountMismatch { .. } => "SingularCountMismatch",
            Error::TooFewFiniteSingularities(_) => "TooFewFiniteSingularities",
            Error::CollinearSingularities => "CollinearSingularities",
            Error::LabelTrackingFailure { .. } => "LabelTrackingFailure",
            Error::TrajectoryEscape(_) => "TrajectoryEscape",
            Error::StepLimitExceeded(_) => "StepLimitExceeded",
            Error::NearSingularTransversal(_) => "NearSingularTransversal",
            Error::ExtrapolationUnstable(_) => "ExtrapolationUnstable",
            Error::ParseError { .. } => "ParseError",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True for rejections caused by the input field itself rather than a numerical failure.
    pub fn is_degenerate_input(&self) -> bool {
        matches!(
            self,
            Error::NonIsolatedSingularities
                | Error::DegenerateSingularity(_)
                | Error::DicriticalAtInfinity
                | Error::IdenticallyZeroResultant
                | Error::SingularCountMismatch { .. }
                | Error::TooFewFiniteSingularities(_)
                | Error::CollinearSingularities
                | Error::LineNotInvariant
                | Error::ZeroPolynomial
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
