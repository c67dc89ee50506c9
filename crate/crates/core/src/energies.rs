//! Stationary mean energies of the coupled pair in the continuum-bath limit.
//!
//! With `Θᵢ = Θ(ω, Tᵢ)`, `c = λ²/(m₁m₂)` and every integral taken as
//! `∫ dω/π` over the support of the bath density:
//!
//! ```text
//! Ū₁   = c ∫ ρ₂ (ω² + ω₀₁²) Θ₂ / |D|²  +  ∫ ρ₁ (ω² + ω₀₁²) Θ₁ |β₂|² / |D|²
//! Ū₂   = c ∫ ρ₁ (ω² + ω₀₂²) Θ₁ / |D|²  +  ∫ ρ₂ (ω² + ω₀₂²) Θ₂ |β₁|² / |D|²
//! Ū_int = −2c [ ∫ ρ₁ Θ₁ Re β₂ / |D|²  +  ∫ ρ₂ Θ₂ Re β₁ / |D|² ]
//! ```
//!
//! Each of the six bath terms is integrated separately in reduced units and
//! rescaled by `ħω₀₁` at the end.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{
    to_reduced, validate, BathSpec, OscillatorParams, PhysicalConstants, SystemConfig, UnitSystem,
};
use crate::parallel::Execution;
use crate::quadrature::{auto_breakpoints, integrate, IntegrandSpec, QuadratureOptions};
use crate::response::{bath_weight, beta, mean_energy};

/// Relative distance from `λ_crit` inside which the low-frequency region gets
/// its own panel.
pub const NEAR_CRITICAL_WINDOW: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl EnergyEstimate {
    pub const ZERO: Self = Self {
        value: 0.0,
        error_estimate: 0.0,
        converged: true,
        evaluations: 0,
    };

    fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }

    fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergedQuadrature(self))
        }
    }
}

impl fmt::Display for EnergyEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.value, self.error_estimate)?;
        if !self.converged {
            write!(f, " (not converged)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub u1: EnergyEstimate,
    pub u2: EnergyEstimate,
    pub u_int: EnergyEstimate,
    /// `Ū_int / (Ū₁ + Ū₂)`
    pub normalized_u_int: f64,
    pub normalized_error: f64,
    /// `λ ≥ λ_crit`
    pub unstable: bool,
    pub near_critical: bool,
}

impl EnergyReport {
    pub fn converged(&self) -> bool {
        self.u1.converged && self.u2.converged && self.u_int.converged
    }

    fn assemble(u1: EnergyEstimate, u2: EnergyEstimate, u_int: EnergyEstimate, sys: &SystemConfig) -> Self {
        let total = u1.value + u2.value;
        let normalized = u_int.value / total;
        let total_err = u1.error_estimate + u2.error_estimate;
        let normalized_error = u_int.error_estimate / total.abs() + normalized.abs() * total_err / total.abs();
        Self {
            u1,
            u2,
            u_int,
            normalized_u_int: normalized,
            normalized_error,
            unstable: sys.is_unstable(),
            near_critical: sys.critical_distance() < NEAR_CRITICAL_WINDOW,
        }
    }
}

/// The six bath terms of the three energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    U1FromBath2,
    U1FromBath1,
    U2FromBath1,
    U2FromBath2,
    IntFromBath1,
    IntFromBath2,
}

impl Term {
    fn uses_bath1(self) -> bool {
        matches!(self, Term::U1FromBath1 | Term::U2FromBath1 | Term::IntFromBath1)
    }

    /// Terms carrying a `λ²` prefactor.
    fn cross(self) -> bool {
        !matches!(self, Term::U1FromBath1 | Term::U2FromBath2)
    }
}

struct Kernels<'a> {
    sys: &'a SystemConfig,
    constants: PhysicalConstants,
    strength: f64,
}

impl<'a> Kernels<'a> {
    fn new(sys: &'a SystemConfig) -> Self {
        Self {
            sys,
            constants: sys.constants(),
            strength: sys.coupling_strength(),
        }
    }

    fn bath(&self, term: Term) -> (&BathSpec, &OscillatorParams) {
        if term.uses_bath1() {
            (&self.sys.bath1, &self.sys.osc1)
        } else {
            (&self.sys.bath2, &self.sys.osc2)
        }
    }

    /// Integrand of `term` including the `1/π` measure.
    #[inline]
    fn eval(&self, term: Term, w: f64) -> f64 {
        let (bath, attached) = self.bath(term);
        let density = bath_weight(bath, attached, w);
        if density == 0.0 {
            return 0.0;
        }
        let s = self.sys;
        let b1 = beta(&s.osc1, w);
        let b2 = beta(&s.osc2, w);
        let d = b1 * b2 - self.strength;
        let inv_d2 = 1.0 / d.norm_sqr();
        let theta = mean_energy(&self.constants, w, bath.temperature);
        let w2 = w * w;
        let w01 = s.osc1.eigenfrequency * s.osc1.eigenfrequency;
        let w02 = s.osc2.eigenfrequency * s.osc2.eigenfrequency;
        let kernel = match term {
            Term::U1FromBath2 => self.strength * (w2 + w01),
            Term::U1FromBath1 => (w2 + w01) * b2.norm_sqr(),
            Term::U2FromBath1 => self.strength * (w2 + w02),
            Term::U2FromBath2 => (w2 + w02) * b1.norm_sqr(),
            Term::IntFromBath1 => -2.0 * self.strength * b2.re,
            Term::IntFromBath2 => -2.0 * self.strength * b1.re,
        };
        density * kernel * theta * inv_d2 / PI
    }

    fn spectral_density(&self, w: f64) -> f64 {
        self.eval(Term::IntFromBath1, w) + self.eval(Term::IntFromBath2, w)
    }
}

/// Breakpoints at each resonance and at a few widths either side of it.
fn resonance_seeds(centers: &[f64], width: f64) -> Vec<f64> {
    let mut pts = Vec::with_capacity(centers.len() * 7);
    for &c in centers {
        pts.push(c);
        if width > 0.0 {
            for k in [1.0, 5.0, 25.0] {
                pts.push(c - k * width);
                pts.push(c + k * width);
            }
        }
    }
    pts
}

/// Scale of the low-frequency structure of `1/|D|²` when `D(0)` is small.
fn soft_mode_scale(sys: &SystemConfig) -> Option<f64> {
    let w01 = sys.osc1.eigenfrequency.powi(2);
    let w02 = sys.osc2.eigenfrequency.powi(2);
    let static_d = w01 * w02 - sys.coupling_strength();
    if static_d.abs() >= 0.1 * w01 * w02 {
        return None;
    }
    let friction = 2.0 * (sys.osc1.damping * w02 + sys.osc2.damping * w01);
    let from_friction = if friction > 0.0 { static_d.abs() / friction } else { 0.0 };
    let scale = from_friction.max((static_d.abs() / (w01 + w02)).sqrt());
    if scale > 0.0 {
        Some(scale)
    } else {
        Some(1e-3 * sys.osc1.eigenfrequency.min(sys.osc2.eigenfrequency))
    }
}

fn term_estimate(sys: &SystemConfig, term: Term, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    let kernels = Kernels::new(sys);
    if term.cross() && kernels.strength == 0.0 {
        return Ok(EnergyEstimate::ZERO);
    }
    let (bath, attached) = kernels.bath(term);
    let (lo, hi) = bath.domain(attached);

    let mut seeds = if sys.coupling == 0.0 {
        resonance_seeds(&[attached.eigenfrequency], attached.damping)
    } else {
        let width = sys.osc1.damping.max(sys.osc2.damping);
        resonance_seeds(&auto_breakpoints(sys), width)
    };
    let soft = soft_mode_scale(sys);
    if let Some(s) = soft {
        seeds.extend([s, 10.0 * s]);
    }

    let f = |w: f64| kernels.eval(term, w);
    let near_critical = sys.critical_distance() < NEAR_CRITICAL_WINDOW;
    let low_edge = soft
        .filter(|_| near_critical)
        .map(|s| (10.0 * s).min(0.5 * sys.osc1.eigenfrequency.min(sys.osc2.eigenfrequency)))
        .filter(|&edge| edge > lo && edge < hi);

    let Some(edge) = low_edge else {
        let r = integrate(&IntegrandSpec::new(f, lo, hi).with_breakpoints(seeds).with_options(*opts))?;
        return Ok(EnergyEstimate {
            value: r.value,
            error_estimate: r.error_estimate,
            converged: r.converged,
            evaluations: r.evaluations,
        });
    };

    // Near λ_crit the ω → 0 spike gets a dedicated panel under absolute
    // tolerance control.
    let low = integrate(
        &IntegrandSpec::new(f, lo, edge)
            .with_breakpoints(seeds.clone())
            .with_options(QuadratureOptions { rel_tol: 0.0, ..*opts }),
    )?;
    let high = integrate(&IntegrandSpec::new(f, edge, hi).with_breakpoints(seeds).with_options(*opts))?;
    let value = low.value + high.value;
    let error = low.error_estimate + high.error_estimate;
    let dominated = low.error_estimate > 0.5 * error && low.error_estimate > opts.abs_tol;
    Ok(EnergyEstimate {
        value,
        error_estimate: error,
        converged: high.converged && error <= opts.tolerance(value) && !dominated,
        evaluations: low.evaluations + high.evaluations,
    })
}

fn energy_pair(sys: &SystemConfig, a: Term, b: Term, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    Ok(term_estimate(sys, a, opts)?.plus(term_estimate(sys, b, opts)?))
}

fn u1_native(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    energy_pair(sys, Term::U1FromBath2, Term::U1FromBath1, opts)
}

fn u2_native(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    energy_pair(sys, Term::U2FromBath1, Term::U2FromBath2, opts)
}

fn u_int_native(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    energy_pair(sys, Term::IntFromBath1, Term::IntFromBath2, opts)
}

/// Evaluates one energy in reduced units and rescales it to the native units
/// of `sys`.
fn via_reduced(
    sys: &SystemConfig,
    opts: &QuadratureOptions,
    energy: fn(&SystemConfig, &QuadratureOptions) -> Result<EnergyEstimate>,
) -> Result<EnergyEstimate> {
    let reduced = to_reduced(sys)?;
    Ok(energy(&reduced.system, opts)?.scaled(reduced.scales.energy))
}

/// Mean energy `Ū₁` of the first oscillator. Fails with
/// [`Error::NonConvergedQuadrature`] (carrying the partial estimate) when the
/// quadrature does not meet its tolerance.
pub fn u1_mean(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    via_reduced(sys, opts, u1_native)?.into_result()
}

pub fn u2_mean(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    via_reduced(sys, opts, u2_native)?.into_result()
}

/// Mean interaction energy `Ū_int = −λ⟨xy + yx⟩/2`.
pub fn u_int_mean(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyEstimate> {
    via_reduced(sys, opts, u_int_native)?.into_result()
}

/// All three energies with per-integral flags. Only an invalid config is an
/// error; non-convergence is reported through the flags.
pub fn energy_report(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyReport> {
    let reduced = to_reduced(sys)?;
    let r = &reduced.system;
    let k = reduced.scales.energy;
    Ok(EnergyReport::assemble(
        u1_native(r, opts)?.scaled(k),
        u2_native(r, opts)?.scaled(k),
        u_int_native(r, opts)?.scaled(k),
        sys,
    ))
}

/// Same as [`energy_report`] but integrated directly in the units of `sys`,
/// without the reduced-unit detour. `opts.abs_tol` is read in those units.
pub fn energy_report_native(sys: &SystemConfig, opts: &QuadratureOptions) -> Result<EnergyReport> {
    validate(sys).into_result()?;
    Ok(EnergyReport::assemble(
        u1_native(sys, opts)?,
        u2_native(sys, opts)?,
        u_int_native(sys, opts)?,
        sys,
    ))
}

/// Spectral power density `Ū_int(ω)`: the integrand of [`u_int_mean`], so that
/// `∫ Ū_int(ω) dω = Ū_int`. Zero outside both bath supports.
pub fn u_int_spectral_density(sys: &SystemConfig, omega: f64) -> Result<f64> {
    let reduced = to_reduced(sys)?;
    let s = &reduced.scales;
    let value = Kernels::new(&reduced.system).spectral_density(omega / s.omega);
    Ok(value * s.energy / s.omega)
}

/// `Ū_int(ω)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub system: SystemConfig,
}

pub fn sample_spectrum(sys: &SystemConfig, frequencies: &[f64], exec: Execution) -> Result<Spectrum> {
    if frequencies.is_empty() {
        return Err(Error::InvalidGrid("no frequencies requested".into()));
    }
    if frequencies.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidGrid("frequencies must be finite and non-negative".into()));
    }
    if frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("frequencies must be strictly increasing".into()));
    }
    let reduced = to_reduced(sys)?;
    let s = reduced.scales;
    let kernels = Kernels::new(&reduced.system);
    let values = exec.map(frequencies.len(), |i| {
        kernels.spectral_density(frequencies[i] / s.omega) * s.energy / s.omega
    });
    Ok(Spectrum {
        frequencies: frequencies.to_vec(),
        values,
        system: *sys,
    })
}

/// Mean energy of a single damped oscillator in one bath at temperature `T`
/// with a flat density cut off at `omega_max`:
/// `∫₀^Ω (dω/π) 2γ(ω² + ω₀²)Θ(ω,T) / [(ω² − ω₀²)² + 4γ²ω²]`.
pub fn u_equilibrium_single(
    osc: &OscillatorParams,
    temperature: f64,
    omega_max: f64,
    units: UnitSystem,
    opts: &QuadratureOptions,
) -> Result<EnergyEstimate> {
    let probe = SystemConfig {
        units,
        osc1: *osc,
        osc2: *osc,
        bath1: BathSpec::flat_ohmic(temperature, omega_max),
        bath2: BathSpec::flat_ohmic(temperature, omega_max),
        coupling: 0.0,
    };
    let reduced = to_reduced(&probe)?;
    let g = reduced.system.osc1.damping;
    let theta = reduced.system.bath1.temperature;
    let upper = reduced.system.bath1.cutoff;
    let c = PhysicalConstants::REDUCED;
    let f = |w: f64| {
        let w2 = w * w;
        let detune = w2 - 1.0;
        2.0 * g * (w2 + 1.0) * mean_energy(&c, w, theta) / (detune * detune + 4.0 * g * g * w2) / PI
    };
    let spec = IntegrandSpec::new(f, 0.0, upper)
        .with_breakpoints(resonance_seeds(&[1.0], g))
        .with_options(*opts);
    let r = integrate(&spec)?;
    EnergyEstimate {
        value: r.value,
        error_estimate: r.error_estimate,
        converged: r.converged,
        evaluations: r.evaluations,
    }
    .scaled(reduced.scales.energy)
    .into_result()
}
