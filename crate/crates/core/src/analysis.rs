//! Resonance structure of the coupled pair and the parameter studies built on
//! top of the energy integrals.

use crate::energies::{energy_report, EnergyReport, Spectrum};
use crate::error::{Error, Result};
use crate::model::{validate, SystemConfig};
use crate::parallel::Execution;
use crate::quadrature::QuadratureOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Critical,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    /// `[ω₋², ω₊²]`, roots of the undamped `Re D(ω) = 0` biquadratic.
    pub omega_sq_roots: [f64; 2],
    /// Square roots of the positive entries of `omega_sq_roots`, ascending.
    pub real_modes: Vec<f64>,
    pub stability: Stability,
}

/// Solves `ω⁴ − (ω₀₁² + ω₀₂²)ω² + ω₀₁²ω₀₂² − λ²/(m₁m₂) = 0` in closed form.
/// The smaller root comes from Vieta's product so it stays accurate when it
/// is close to zero.
pub fn normal_modes(sys: &SystemConfig) -> ModeSet {
    let a = sys.osc1.eigenfrequency.powi(2);
    let b = sys.osc2.eigenfrequency.powi(2);
    let strength = sys.coupling_strength();
    let (minus, plus) = if strength == 0.0 {
        (a.min(b), a.max(b))
    } else {
        let disc = ((a - b).powi(2) + 4.0 * strength).sqrt();
        let plus = 0.5 * (a + b + disc);
        ((a * b - strength) / plus, plus)
    };

    let scale = a * b;
    let stability = if (a * b - strength).abs() <= 1e-12 * scale {
        Stability::Critical
    } else if minus < 0.0 {
        Stability::Unstable
    } else {
        Stability::Stable
    };
    let mut real_modes = Vec::with_capacity(2);
    if stability == Stability::Stable {
        real_modes.push(minus.sqrt());
    }
    real_modes.push(plus.sqrt());
    ModeSet {
        omega_sq_roots: [minus, plus],
        real_modes,
        stability,
    }
}

/// `λ_crit = ω₀₁ω₀₂√(m₁m₂)`.
pub fn critical_coupling(sys: &SystemConfig) -> f64 {
    sys.critical_coupling()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub height: f64,
}

/// Vertex abscissa of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if !(curv < 0.0) {
        return None;
    }
    // y = y1 + s (x − x1) + curv (x − x1)² with s the central slope
    let s = d1 + curv * (x[1] - x[0]);
    let dx = -s / (2.0 * curv);
    let xv = x[1] + dx;
    if xv <= x[0] || xv >= x[2] {
        return None;
    }
    Some((xv, y[1] + s * dx + curv * dx * dx))
}

/// Local maxima of `|value|`, refined by a parabola through the log-heights of
/// the three neighbouring samples. Sorted by descending height.
pub fn find_peaks(spectrum: &Spectrum) -> Vec<Peak> {
    let x = &spectrum.frequencies;
    let y: Vec<f64> = spectrum.values.iter().map(|v| v.abs()).collect();
    if x.len() < 3 || x.len() != y.len() {
        return Vec::new();
    }
    let mut peaks: Vec<Peak> = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| {
            let xs = [x[i - 1], x[i], x[i + 1]];
            let refined = if y[i - 1] > 0.0 && y[i + 1] > 0.0 {
                parabola_vertex(xs, [y[i - 1].ln(), y[i].ln(), y[i + 1].ln()])
                    .map(|(f, lh)| Peak { frequency: f, height: lh.exp() })
            } else {
                None
            };
            refined.unwrap_or(Peak {
                frequency: x[i],
                height: y[i],
            })
        })
        .collect();
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height).then(a.frequency.total_cmp(&b.frequency)));
    peaks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// `λ/λ₀`
    Coupling,
    /// `ω₀₂/ω₀₁`
    FrequencyRatio,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Coupling => "lambda_over_lambda0",
            SweepAxis::FrequencyRatio => "omega02_over_omega01",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub system: SystemConfig,
    pub report: EnergyReport,
}

impl SweepRow {
    pub fn near_critical(&self) -> bool {
        self.report.near_critical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    pub base: SystemConfig,
}

impl SweepTable {
    pub fn converged(&self) -> bool {
        self.rows.iter().all(|r| r.report.converged())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis_value).collect()
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.report.normalized_u_int).collect()
    }
}

fn check_axis(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidAxis("axis has no values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidAxis("axis values must be finite".into()));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidAxis("axis values must be strictly monotone".into()));
    }
    Ok(())
}

fn run_sweep(
    base: &SystemConfig,
    axis: SweepAxis,
    values: &[f64],
    systems: Vec<SystemConfig>,
    opts: &QuadratureOptions,
    exec: Execution,
) -> Result<SweepTable> {
    for s in &systems {
        validate(s).into_result()?;
    }
    let reports = exec.map(systems.len(), |i| energy_report(&systems[i], opts));
    let rows = reports
        .into_iter()
        .zip(values.iter().zip(systems))
        .map(|(report, (&axis_value, system))| {
            Ok(SweepRow {
                axis_value,
                system,
                report: report?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { axis, rows, base: *base })
}

/// Energy report for each `λ/λ₀` in `lambda_over_lambda0`. Rows within
/// [`crate::energies::NEAR_CRITICAL_WINDOW`] of `λ_crit` carry the `near_critical` flag;
/// non-converged rows are kept and flagged.
pub fn sweep_coupling(
    sys: &SystemConfig,
    lambda_over_lambda0: &[f64],
    opts: &QuadratureOptions,
    exec: Execution,
) -> Result<SweepTable> {
    check_axis(lambda_over_lambda0)?;
    if lambda_over_lambda0.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidAxis("couplings must be non-negative".into()));
    }
    let lambda0 = sys.reference_coupling();
    let systems = lambda_over_lambda0.iter().map(|&k| sys.with_coupling(k * lambda0)).collect();
    run_sweep(sys, SweepAxis::Coupling, lambda_over_lambda0, systems, opts, exec)
}

/// Energy report for each `ω₀₂/ω₀₁`. The second damping follows the base
/// system's ratio `c = γ₂/ω₀₂`, so `γ₂ = c·ω₀₂` on every row.
pub fn sweep_frequency_ratio(
    sys: &SystemConfig,
    ratios: &[f64],
    opts: &QuadratureOptions,
    exec: Execution,
) -> Result<SweepTable> {
    check_axis(ratios)?;
    if ratios.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidAxis("frequency ratios must be positive".into()));
    }
    let damping_ratio = sys.osc2.damping / sys.osc2.eigenfrequency;
    let systems = ratios
        .iter()
        .map(|&r| {
            let mut s = *sys;
            s.osc2.eigenfrequency = r * sys.osc1.eigenfrequency;
            s.osc2.damping = damping_ratio * s.osc2.eigenfrequency;
            s
        })
        .collect();
    run_sweep(sys, SweepAxis::FrequencyRatio, ratios, systems, opts, exec)
}
