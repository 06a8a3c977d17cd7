use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({0}, {1}) is not strictly inside the unit disk")]
    OutsideDisk(f64, f64),
    #[error("invalid density specification: {0}")]
    InvalidDensity(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tangent direction is degenerate")]
    DegenerateTangent,
    #[error("comparison circle is underdetermined: point on the axis with perpendicular tangent")]
    AxisUnderdetermined,
    #[error("comparison circle degenerates to a point: point on the axis with oblique tangent")]
    DegenerateCircle,
    #[error("trajectory is not closed on the axis (defect {0:e})")]
    OpenTrajectory(f64),
    #[error("empty occupancy grid")]
    EmptyGrid,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
