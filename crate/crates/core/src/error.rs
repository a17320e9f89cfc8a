//! Top-level error with the originating module in its message.

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::ieti::IetiError;
use crate::krylov::KrylovError;
use crate::linalg::LinalgError;
use crate::spline::SplineError;
use crate::topology::TopologyError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("linalg: {0}")]
    Linalg(#[from] LinalgError),
    #[error("spline: {0}")]
    Spline(#[from] SplineError),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("ieti: {0}")]
    Ieti(IetiError),
    #[error("krylov: {0}")]
    Krylov(#[from] KrylovError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<IetiError> for Error {
    /// Errors that the ieti module only forwards keep their own module tag.
    fn from(e: IetiError) -> Self {
        match e {
            IetiError::Linalg(e) => Error::Linalg(e),
            IetiError::Spline(e) => Error::Spline(e),
            IetiError::Geometry(e) => Error::Geometry(e),
            IetiError::Topology(e) => Error::Topology(e),
            other => Error::Ieti(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
