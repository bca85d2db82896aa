use thiserror::Error;

use crate::geometry::Violations;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(Violations),

    #[error("mesh efficiency {name} = {value} is outside (0, 1]")]
    MeshOutOfRange { name: &'static str, value: f64 },

    #[error("input speed must be finite and nonzero, got {0}")]
    InvalidInputSpeed(f64),

    #[error("input torque must be finite and positive, got {0}")]
    InvalidInputTorque(f64),

    #[error("invalid design query: {0}")]
    InvalidQuery(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
