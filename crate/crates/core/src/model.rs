//! Domain types shared by every other module: oscillator and bath parameters,
//! the coupled system, unit systems and the reduced (dimensionless) form used
//! for all internal computation.
//!
//! Reduced units take the first oscillator as reference: frequencies in
//! `ω₀₁`, masses in `m₁`, coupling in `λ₀ = m₁ω₀₁²`, energies in `ħω₀₁` and
//! temperatures as `θ = k_B T / (ħω₀₁)`. In reduced units `ħ = k_B = 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Planck's constant over 2π and Boltzmann's constant in one unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_boltzmann: f64,
}

impl PhysicalConstants {
    /// CGS values: erg·s and erg/K.
    pub const CGS: Self = Self {
        hbar: 1.054_571_817e-27,
        k_boltzmann: 1.380_649e-16,
    };

    pub const REDUCED: Self = Self {
        hbar: 1.0,
        k_boltzmann: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitSystem {
    /// grams, rad/s, kelvin, erg
    Cgs,
    /// dimensionless, `ħ = k_B = 1`
    Reduced,
}

impl UnitSystem {
    pub fn constants(self) -> PhysicalConstants {
        match self {
            UnitSystem::Cgs => PhysicalConstants::CGS,
            UnitSystem::Reduced => PhysicalConstants::REDUCED,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitSystem::Cgs => "cgs",
            UnitSystem::Reduced => "reduced",
        }
    }
}

/// One of the two selected oscillators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub mass: f64,
    pub eigenfrequency: f64,
    /// Damping rate `γ`; the friction spectrum is the constant `μ(Ω) = 2γ`.
    pub damping: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, eigenfrequency: f64, damping: f64) -> Self {
        Self {
            mass,
            eigenfrequency,
            damping,
        }
    }

    /// Spring constant `m ω₀²`.
    pub fn spring_constant(&self) -> f64 {
        self.mass * self.eigenfrequency * self.eigenfrequency
    }

    fn check(&self, label: &str, out: &mut Vec<Violation>) {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            out.push(Violation::new(format!("{label}.mass"), "mass must be positive"));
        }
        if !(self.eigenfrequency.is_finite() && self.eigenfrequency > 0.0) {
            out.push(Violation::new(
                format!("{label}.eigenfrequency"),
                "eigenfrequency must be positive",
            ));
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            out.push(Violation::new(
                format!("{label}.damping"),
                "damping must be non-negative",
            ));
        } else if self.eigenfrequency > 0.0 && self.damping >= self.eigenfrequency {
            out.push(Violation::new(
                format!("{label}.damping"),
                "damping must be below the eigenfrequency (underdamped regime)",
            ));
        }
    }
}

/// Shape of the coupling-weighted bath density `ρ(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralModel {
    /// `ρ = 2γ` up to the cutoff.
    FlatOhmic,
    /// `ρ = 2γ (ω/ω₀)²`, hard-truncated at the cutoff.
    Debye,
    /// `ρ = 2γ exp(−(ω − ω₀)²/2σ²)`.
    Gauss,
}

impl SpectralModel {
    pub fn name(self) -> &'static str {
        match self {
            SpectralModel::FlatOhmic => "flat_ohmic",
            SpectralModel::Debye => "debye",
            SpectralModel::Gauss => "gauss",
        }
    }
}

/// Width of the Gauss density support on each side of `ω₀`, in units of `σ`.
pub const GAUSS_TRUNCATION_SIGMAS: f64 = 12.0;

/// One heat bath attached to one oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub model: SpectralModel,
    pub temperature: f64,
    /// Upper integration limit `Ω_max` for the flat and Debye models.
    pub cutoff: f64,
    /// Gauss width `σ`; only read by the Gauss model.
    pub gauss_sigma: Option<f64>,
}

impl BathSpec {
    pub fn flat_ohmic(temperature: f64, cutoff: f64) -> Self {
        Self {
            model: SpectralModel::FlatOhmic,
            temperature,
            cutoff,
            gauss_sigma: None,
        }
    }

    pub fn debye(temperature: f64, cutoff: f64) -> Self {
        Self {
            model: SpectralModel::Debye,
            temperature,
            cutoff,
            gauss_sigma: None,
        }
    }

    pub fn gauss(temperature: f64, sigma: f64) -> Self {
        Self {
            model: SpectralModel::Gauss,
            temperature,
            cutoff: f64::INFINITY,
            gauss_sigma: Some(sigma),
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    /// Frequency interval carrying the density when attached to `attached`.
    pub fn domain(&self, attached: &OscillatorParams) -> (f64, f64) {
        match self.model {
            SpectralModel::FlatOhmic | SpectralModel::Debye => (0.0, self.cutoff),
            SpectralModel::Gauss => {
                let sigma = self.gauss_sigma.unwrap_or(0.0);
                let center = attached.eigenfrequency;
                (
                    (center - GAUSS_TRUNCATION_SIGMAS * sigma).max(0.0),
                    center + GAUSS_TRUNCATION_SIGMAS * sigma,
                )
            }
        }
    }

    fn check(&self, label: &str, attached: &OscillatorParams, out: &mut Vec<Violation>) {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            out.push(Violation::new(
                format!("{label}.temperature"),
                "temperature must be non-negative",
            ));
        }
        match self.model {
            SpectralModel::FlatOhmic | SpectralModel::Debye => {
                if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
                    out.push(Violation::new(
                        format!("{label}.cutoff"),
                        "cutoff must be positive and finite",
                    ));
                } else if self.cutoff < attached.eigenfrequency {
                    out.push(Violation::new(
                        format!("{label}.cutoff"),
                        "cutoff must not lie below the attached eigenfrequency",
                    ));
                }
            }
            SpectralModel::Gauss => {
                if !(self.cutoff > 0.0) {
                    out.push(Violation::new(format!("{label}.cutoff"), "cutoff must be positive"));
                }
                match self.gauss_sigma {
                    Some(s) if s.is_finite() && s > 0.0 => {}
                    _ => out.push(Violation::new(
                        format!("{label}.gauss_sigma"),
                        "gauss_sigma must be positive for the Gauss model",
                    )),
                }
            }
        }
    }
}

/// Two oscillators, their two baths and the bilinear coupling `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub units: UnitSystem,
    pub osc1: OscillatorParams,
    pub osc2: OscillatorParams,
    pub bath1: BathSpec,
    pub bath2: BathSpec,
    pub coupling: f64,
}

impl SystemConfig {
    pub fn constants(&self) -> PhysicalConstants {
        self.units.constants()
    }

    /// `λ₀ = m₁ω₀₁²`.
    pub fn reference_coupling(&self) -> f64 {
        self.osc1.spring_constant()
    }

    /// `λ_crit = ω₀₁ω₀₂√(m₁m₂)`, where `D(0)` vanishes.
    pub fn critical_coupling(&self) -> f64 {
        self.osc1.eigenfrequency
            * self.osc2.eigenfrequency
            * (self.osc1.mass * self.osc2.mass).sqrt()
    }

    /// `λ²/(m₁m₂)`.
    pub fn coupling_strength(&self) -> f64 {
        self.coupling * self.coupling / (self.osc1.mass * self.osc2.mass)
    }

    pub fn is_unstable(&self) -> bool {
        self.coupling >= self.critical_coupling()
    }

    /// Relative distance of `λ` from `λ_crit`.
    pub fn critical_distance(&self) -> f64 {
        let crit = self.critical_coupling();
        (self.coupling - crit).abs() / crit
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    /// Exchanges the roles of (oscillator 1, bath 1) and (oscillator 2, bath 2).
    pub fn swapped(&self) -> Self {
        Self {
            units: self.units,
            osc1: self.osc2,
            osc2: self.osc1,
            bath1: self.bath2,
            bath2: self.bath1,
            coupling: self.coupling,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Dotted path of the offending field, e.g. `osc1.mass`.
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: String, message: &str) -> Self {
        Self {
            field,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
    pub reference_coupling: f64,
    pub critical_coupling: f64,
    pub unstable: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidConfig(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks every field invariant. Violations make the config unusable; the
/// unstable regime `λ ≥ λ_crit` is only a warning.
pub fn validate(config: &SystemConfig) -> ValidationReport {
    let mut violations = Vec::new();
    config.osc1.check("osc1", &mut violations);
    config.osc2.check("osc2", &mut violations);
    config.bath1.check("bath1", &config.osc1, &mut violations);
    config.bath2.check("bath2", &config.osc2, &mut violations);
    if !(config.coupling.is_finite() && config.coupling >= 0.0) {
        violations.push(Violation::new(
            "coupling".into(),
            "coupling must be non-negative and finite",
        ));
    }

    let mut warnings = Vec::new();
    let unstable = violations.is_empty() && config.is_unstable();
    if unstable {
        warnings.push(Violation::new(
            "coupling".into(),
            "unstable: coupling at or above the critical value w01*w02*sqrt(m1*m2)",
        ));
    }
    ValidationReport {
        violations,
        warnings,
        reference_coupling: config.reference_coupling(),
        critical_coupling: config.critical_coupling(),
        unstable,
    }
}

/// Conversion factors from reduced units back to the native unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceScales {
    pub units: UnitSystem,
    pub omega: f64,
    pub mass: f64,
    pub coupling: f64,
    pub energy: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSystem {
    pub system: SystemConfig,
    pub scales: ReferenceScales,
}

pub fn to_reduced(config: &SystemConfig) -> Result<ReducedSystem> {
    validate(config).into_result()?;
    let c = config.constants();
    let omega = config.osc1.eigenfrequency;
    let mass = config.osc1.mass;
    let scales = ReferenceScales {
        units: config.units,
        omega,
        mass,
        coupling: mass * omega * omega,
        energy: c.hbar * omega,
        temperature: c.hbar * omega / c.k_boltzmann,
    };
    let osc = |o: &OscillatorParams| OscillatorParams {
        mass: o.mass / mass,
        eigenfrequency: o.eigenfrequency / omega,
        damping: o.damping / omega,
    };
    let bath = |b: &BathSpec| BathSpec {
        model: b.model,
        temperature: b.temperature / scales.temperature,
        cutoff: b.cutoff / omega,
        gauss_sigma: b.gauss_sigma.map(|s| s / omega),
    };
    Ok(ReducedSystem {
        system: SystemConfig {
            units: UnitSystem::Reduced,
            osc1: osc(&config.osc1),
            osc2: osc(&config.osc2),
            bath1: bath(&config.bath1),
            bath2: bath(&config.bath2),
            coupling: config.coupling / scales.coupling,
        },
        scales,
    })
}

pub fn from_reduced(reduced: &ReducedSystem) -> SystemConfig {
    let s = &reduced.scales;
    let r = &reduced.system;
    let osc = |o: &OscillatorParams| OscillatorParams {
        mass: o.mass * s.mass,
        eigenfrequency: o.eigenfrequency * s.omega,
        damping: o.damping * s.omega,
    };
    let bath = |b: &BathSpec| BathSpec {
        model: b.model,
        temperature: b.temperature * s.temperature,
        cutoff: b.cutoff * s.omega,
        gauss_sigma: b.gauss_sigma.map(|x| x * s.omega),
    };
    SystemConfig {
        units: s.units,
        osc1: osc(&r.osc1),
        osc2: osc(&r.osc2),
        bath1: bath(&r.bath1),
        bath2: bath(&r.bath2),
        coupling: r.coupling * s.coupling,
    }
}
