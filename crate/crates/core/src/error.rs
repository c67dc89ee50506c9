use thiserror::Error;

use crate::energies::EnergyEstimate;
use crate::model::ValidationReport;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid configuration:\n{0}")]
    InvalidConfig(ValidationReport),

    #[error("angular frequency must be positive, got {0:e}")]
    NonPositiveFrequency(f64),

    #[error("temperature must be non-negative, got {0:e}")]
    NegativeTemperature(f64),

    #[error("singular response: |D| = {magnitude:e} at omega = {omega:e} is below the floor {floor:e}")]
    SingularResponse { omega: f64, magnitude: f64, floor: f64 },

    #[error("invalid integration domain [{lower:e}, {upper:e}]")]
    InvalidDomain { lower: f64, upper: f64 },

    #[error("quadrature did not converge: {}", .0)]
    NonConvergedQuadrature(EnergyEstimate),

    #[error("discrete bath needs at least 2 oscillators, got {0}")]
    TooFewBathModes(usize),

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
