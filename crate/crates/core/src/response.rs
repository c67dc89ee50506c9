//! Frequency-domain response of the coupled pair: the bath mean energy
//! `Θ(ω, T)`, the inverse susceptibilities `β₁,₂(ω)`, the response
//! denominator `D(ω)`, the spectral densities `ρ(ω)` and the transfer matrix
//! mapping bath forces `(F₁, F₂)` onto displacements `(x, y)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BathSpec, OscillatorParams, PhysicalConstants, SpectralModel, SystemConfig};

pub type ComplexResponse = Complex64;

/// Below this `x = ħω/2k_BT` coth is taken from its Laurent series.
const SERIES_THRESHOLD: f64 = 0.05;

/// Default floor on `|D|/ω₀₁⁴` for [`transfer`].
pub const DEFAULT_SINGULAR_FLOOR: f64 = 1e-12;

/// Mean energy `(ħω/2) coth(ħω/2k_BT)` of a free oscillator in a bath, for
/// any `ω ≥ 0`. At `ω = 0` this is the classical limit `k_BT`.
pub(crate) fn mean_energy(c: &PhysicalConstants, omega: f64, temperature: f64) -> f64 {
    let zero_point = 0.5 * c.hbar * omega;
    if temperature == 0.0 {
        return zero_point;
    }
    let thermal = c.k_boltzmann * temperature;
    let x = zero_point / thermal;
    if x <= SERIES_THRESHOLD {
        // k_BT · x coth x from the Laurent series of coth
        let x2 = x * x;
        thermal * (1.0 + x2 / 3.0 - x2 * x2 / 45.0)
    } else {
        // coth x = 1 + 2/(e^{2x} − 1). Scaling ħω/2 rather than k_BT·x keeps
        // the result exactly non-decreasing in T; exp_m1 overflows to inf for
        // huge x, which correctly sends the correction to zero.
        zero_point * (1.0 + 2.0 / (2.0 * x).exp_m1())
    }
}

/// `Θ(ω, T)` in an explicit unit system.
pub fn theta_in(c: &PhysicalConstants, omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if !(temperature >= 0.0) {
        return Err(Error::NegativeTemperature(temperature));
    }
    Ok(mean_energy(c, omega, temperature))
}

/// `Θ(ω, T)` in CGS: `ω` in rad/s, `T` in kelvin, result in erg.
pub fn theta(omega: f64, temperature: f64) -> Result<f64> {
    theta_in(&PhysicalConstants::CGS, omega, temperature)
}

/// `β(ω) = (ω₀² − ω²) − 2iγω`.
#[inline]
pub fn beta(osc: &OscillatorParams, omega: f64) -> ComplexResponse {
    Complex64::new(
        osc.eigenfrequency * osc.eigenfrequency - omega * omega,
        -2.0 * osc.damping * omega,
    )
}

/// `D(ω) = β₁(ω)β₂(ω) − λ²/(m₁m₂)`.
#[inline]
pub fn big_d(sys: &SystemConfig, omega: f64) -> ComplexResponse {
    beta(&sys.osc1, omega) * beta(&sys.osc2, omega) - sys.coupling_strength()
}

/// Spectral density of `bath` as seen by `attached`. Every model gives
/// `ρ(ω₀) = 2γ`.
pub fn rho(bath: &BathSpec, attached: &OscillatorParams, omega: f64) -> f64 {
    let two_gamma = 2.0 * attached.damping;
    match bath.model {
        SpectralModel::FlatOhmic => two_gamma,
        SpectralModel::Debye => {
            if omega > bath.cutoff {
                0.0
            } else {
                let r = omega / attached.eigenfrequency;
                two_gamma * r * r
            }
        }
        SpectralModel::Gauss => {
            let sigma = bath.gauss_sigma.unwrap_or(f64::NAN);
            let d = (omega - attached.eigenfrequency) / sigma;
            two_gamma * (-0.5 * d * d).exp()
        }
    }
}

/// `ρ(ω)` restricted to the bath's integration domain.
#[inline]
pub(crate) fn bath_weight(bath: &BathSpec, attached: &OscillatorParams, omega: f64) -> f64 {
    let (lo, hi) = bath.domain(attached);
    if omega < lo || omega > hi {
        0.0
    } else {
        rho(bath, attached, omega)
    }
}

/// Linear map `(F₁, F₂) → (x, y)` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t11: ComplexResponse,
    pub t12: ComplexResponse,
    pub t21: ComplexResponse,
    pub t22: ComplexResponse,
}

impl TransferMatrix {
    pub fn apply(&self, f1: ComplexResponse, f2: ComplexResponse) -> (ComplexResponse, ComplexResponse) {
        (self.t11 * f1 + self.t12 * f2, self.t21 * f1 + self.t22 * f2)
    }
}

pub fn transfer(sys: &SystemConfig, omega: f64) -> Result<TransferMatrix> {
    transfer_with_floor(sys, omega, DEFAULT_SINGULAR_FLOOR)
}

/// Transfer matrix with an explicit floor on `|D|`, measured in units of
/// `ω₀₁⁴` so the same floor works in any unit system.
pub fn transfer_with_floor(sys: &SystemConfig, omega: f64, floor: f64) -> Result<TransferMatrix> {
    let b1 = beta(&sys.osc1, omega);
    let b2 = beta(&sys.osc2, omega);
    let d = b1 * b2 - sys.coupling_strength();
    let w4 = sys.osc1.eigenfrequency.powi(4);
    let magnitude = d.norm() / w4;
    if !(magnitude >= floor) {
        return Err(Error::SingularResponse {
            omega,
            magnitude,
            floor,
        });
    }
    let inv = d.inv();
    Ok(TransferMatrix {
        t11: b2 * inv,
        t12: inv * (sys.coupling / sys.osc1.mass),
        t21: inv * (sys.coupling / sys.osc2.mass),
        t22: b1 * inv,
    })
}
