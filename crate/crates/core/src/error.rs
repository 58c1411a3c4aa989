use thiserror::Error;

/// Errors raised by state, metric, field, action and flow computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "point is outside the open Bloch ball or within {margin} of its boundary (|v| = {radius})"
    )]
    BoundaryViolation { radius: f64, margin: f64 },

    #[error("matrix is not a faithful density matrix: {0}")]
    NotAState(String),

    #[error("spherical chart is singular at this point (r = {r}, |z|/r = {cos_theta})")]
    ChartSingularity { r: f64, cos_theta: f64 },

    #[error("Cartesian metric is undefined at the center (r = {0})")]
    CenterSingularity(f64),

    #[error("argument {0} outside the domain (0, 1]")]
    DomainError(f64),

    #[error("tangent pole of the excluded family at t = {0}")]
    PoleError(f64),

    #[error("metric condition number {0:e} exceeds 1e12")]
    IllConditioned(f64),

    #[error("metric is not positive definite (f = {0})")]
    NotPositiveDefinite(f64),

    #[error("matrix has a non-positive eigenvalue {0}")]
    NotPositive(f64),

    #[error("trace {0:e} underflowed during normalization")]
    NumericalUnderflow(f64),

    #[error("finite-difference stencil of radius {reach} leaves the ball at |p| = {radius}")]
    NeighborhoodOutsideBall { radius: f64, reach: f64 },

    #[error("trajectory left the manifold at t = {time} (r = {radius})")]
    LeftManifold { time: f64, radius: f64 },

    #[error("derivative extrapolation did not converge (last estimates {0} and {1})")]
    ExtrapolationUnstable(f64, f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable machine-readable code, used in CLI JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BoundaryViolation { .. } => "BoundaryViolation",
            Error::NotAState(_) => "NotAState",
            Error::ChartSingularity { .. } => "ChartSingularity",
            Error::CenterSingularity(_) => "CenterSingularity",
            Error::DomainError(_) => "DomainError",
            Error::PoleError(_) => "PoleError",
            Error::IllConditioned(_) => "IllConditioned",
            Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
            Error::NotPositive(_) => "NotPositive",
            Error::NumericalUnderflow(_) => "NumericalUnderflow",
            Error::NeighborhoodOutsideBall { .. } => "NeighborhoodOutsideBall",
            Error::LeftManifold { .. } => "LeftManifold",
            Error::ExtrapolationUnstable(..) => "ExtrapolationUnstable",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }

    /// True for errors caused by the caller's input rather than by a numeric breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::BoundaryViolation { .. }
                | Error::NotAState(_)
                | Error::ChartSingularity { .. }
                | Error::CenterSingularity(_)
                | Error::DomainError(_)
                | Error::PoleError(_)
                | Error::NeighborhoodOutsideBall { .. }
                | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
