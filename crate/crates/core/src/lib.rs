//! Stationary energies of two coupled, damped quantum oscillators, each in
//! contact with its own heat bath.
//!
//! Everything is computed from the continuum-limit integrals in
//! [`energies`]; [`discrete_bath`] evaluates the same quantities from finite
//! baths as an independent check.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod discrete_bath;
pub mod energies;
pub mod error;
pub mod model;
pub mod parallel;
pub mod presets;
pub mod quadrature;
pub mod response;

pub use analysis::{
    critical_coupling, find_peaks, normal_modes, sweep_coupling, sweep_frequency_ratio, ModeSet, Peak, Stability,
    SweepAxis, SweepRow, SweepTable,
};
pub use discrete_bath::{build_bath, u1_discrete, u2_discrete, u_int_discrete, DiscreteBath};
pub use energies::{
    energy_report, energy_report_native, sample_spectrum, u1_mean, u2_mean, u_equilibrium_single, u_int_mean,
    u_int_spectral_density, EnergyEstimate, EnergyReport, Spectrum,
};
pub use error::{Error, Result};
pub use model::{
    from_reduced, to_reduced, validate, BathSpec, OscillatorParams, PhysicalConstants, ReducedSystem,
    ReferenceScales, SpectralModel, SystemConfig, UnitSystem, ValidationReport, Violation,
};
pub use parallel::Execution;
pub use quadrature::{integrate, IntegrandSpec, IntegrationResult, QuadratureOptions};
pub use response::{beta, big_d, rho, theta, theta_in, transfer, ComplexResponse, TransferMatrix};
