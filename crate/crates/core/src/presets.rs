//! Ready-made CGS systems for the standard studies. All share the first
//! oscillator `m₁ = 10⁻²³ g`, `ω₀₁ = 10¹³ rad/s`; only ratios matter once the
//! system is reduced.

use crate::model::{BathSpec, OscillatorParams, SystemConfig, UnitSystem};

pub const BASE_MASS: f64 = 1e-23;
pub const BASE_FREQUENCY: f64 = 1e13;

/// Debye cutoff used by the spectrum studies, in units of `ω₀₁`.
pub const SPECTRUM_CUTOFF: f64 = 30.0;
/// Gauss width used by the coupling and ratio studies, in units of `ω₀₁`.
pub const STUDY_GAUSS_SIGMA: f64 = 0.5;

fn oscillator(ratio: f64, damping_ratio: f64) -> OscillatorParams {
    let w = ratio * BASE_FREQUENCY;
    OscillatorParams::new(BASE_MASS, w, damping_ratio * w)
}

fn lambda0() -> f64 {
    BASE_MASS * BASE_FREQUENCY * BASE_FREQUENCY
}

/// Spectral power density study: `γᵢ = 0.02ω₀ᵢ`, `T = 300/700 K`, Debye baths
/// cut off at `30ω₀₁`.
pub fn spectrum_study(frequency_ratio: f64, coupling_ratio: f64) -> SystemConfig {
    let cutoff = SPECTRUM_CUTOFF * BASE_FREQUENCY;
    SystemConfig {
        units: UnitSystem::Cgs,
        osc1: oscillator(1.0, 0.02),
        osc2: oscillator(frequency_ratio, 0.02),
        bath1: BathSpec::debye(300.0, cutoff),
        bath2: BathSpec::debye(700.0, cutoff),
        coupling: coupling_ratio * lambda0(),
    }
}

/// Coupling sweep base: identical oscillators with `γ = 0.01ω₀`, Gauss baths.
/// The coupling is left at zero; sweeps set it.
pub fn coupling_study(t1: f64, t2: f64) -> SystemConfig {
    ratio_study(0.0, t1, t2)
}

/// Frequency-ratio sweep base: identical oscillators with `γᵢ = 0.01ω₀ᵢ`,
/// Gauss baths and the given coupling ratio `λ/λ₀`. Sweeps rescale `ω₀₂`.
pub fn ratio_study(coupling_ratio: f64, t1: f64, t2: f64) -> SystemConfig {
    let sigma = STUDY_GAUSS_SIGMA * BASE_FREQUENCY;
    SystemConfig {
        units: UnitSystem::Cgs,
        osc1: oscillator(1.0, 0.01),
        osc2: oscillator(1.0, 0.01),
        bath1: BathSpec::gauss(t1, sigma),
        bath2: BathSpec::gauss(t2, sigma),
        coupling: coupling_ratio * lambda0(),
    }
}

/// Continuum-versus-discrete check system: Debye `30ω₀₁`, `λ = 0.1λ₀`,
/// `ω₀₂ = 1.3ω₀₁`, `γᵢ = 0.02ω₀ᵢ`, `T = 300/700 K`.
pub fn oracle_study() -> SystemConfig {
    spectrum_study(1.3, 0.1)
}
