//! Run configuration: a JSON document with one system block and exactly one
//! command block.
//!
//! ```json
//! {
//!   "units": "cgs",
//!   "system": {
//!     "osc1": { "mass": 1e-23, "eigenfrequency": 1e13, "damping": 2e11 },
//!     "osc2": { "mass": 1e-23, "eigenfrequency": 1.3e13, "damping": 2.6e11 },
//!     "bath1": { "model": "debye", "temperature": 300, "cutoff": 3e14 },
//!     "bath2": { "model": "debye", "temperature": 700, "cutoff": 3e14 },
//!     "coupling_over_lambda0": 0.01
//!   },
//!   "tolerance": { "rel_tol": 1e-8 },
//!   "spectrum": { "min": 0.2, "max": 2.0, "samples": 1801 },
//!   "output": { "name": "spectrum" }
//! }
//! ```
//!
//! Frequencies on spectrum grids and sweep axes are in units of `ω₀₁`;
//! coupling axes are in units of `λ₀ = m₁ω₀₁²`.

use std::fmt;
use std::path::Path;

use oscbath::{validate, BathSpec, OscillatorParams, QuadratureOptions, SystemConfig, UnitSystem, ValidationReport};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Cgs,
    Reduced,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Cgs => UnitSystem::Cgs,
            Units::Reduced => UnitSystem::Reduced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorBlock {
    pub mass: f64,
    pub eigenfrequency: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    FlatOhmic,
    Debye,
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathBlock {
    pub model: ModelTag,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub osc1: OscillatorBlock,
    pub osc2: OscillatorBlock,
    pub bath1: BathBlock,
    pub bath2: BathBlock,
    /// `λ` in the config's units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    /// `λ/λ₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_over_lambda0: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance, in reduced energy units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyBlock {}

/// Uniform grid of `samples` points on `[min, max]`, in units of `ω₀₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

/// Either an explicit list of `values`, or `points` evenly spaced values from
/// `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    /// Number of modes in each discrete bath.
    pub modes: usize,
    /// Largest accepted relative deviation; defaults to 0.5%.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// File stem for the outputs; defaults to the command name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Units,
    pub system: SystemBlock,
    #[serde(default)]
    pub tolerance: ToleranceBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_coupling: Option<AxisBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_ratio: Option<AxisBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate_oracle: Option<OracleBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Energy,
    Spectrum,
    SweepCoupling,
    SweepRatio,
    ValidateOracle,
}

impl CommandKind {
    /// Name of the config block (and default output stem).
    pub fn block(self) -> &'static str {
        match self {
            CommandKind::Energy => "energy",
            CommandKind::Spectrum => "spectrum",
            CommandKind::SweepCoupling => "sweep_coupling",
            CommandKind::SweepRatio => "sweep_ratio",
            CommandKind::ValidateOracle => "validate_oracle",
        }
    }
}

/// A config problem, located at a line of the source file when possible.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub file: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": {field}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Finds the line of `path` (a chain of nested keys) in a JSON source. Each
/// key is searched after the position of its parent; if a key is missing the
/// line of the deepest key found is returned.
pub fn locate(source: &str, path: &[&str]) -> Option<usize> {
    let mut from = 0;
    let mut found = None;
    for key in path {
        let needle = format!("\"{key}\"");
        let hit = source[from..].match_indices(&needle).map(|(i, _)| from + i).find(|&i| {
            source[i + needle.len()..].trim_start().starts_with(':')
        });
        match hit {
            Some(i) => {
                found = Some(i);
                from = i + needle.len();
            }
            None => break,
        }
    }
    found.map(|i| source[..i].matches('\n').count() + 1)
}

/// A parsed and checked configuration together with its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub file: String,
    pub source: String,
    pub run: RunConfig,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            file: file.clone(),
            line: None,
            field: None,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(file, source)
    }

    pub fn parse(file: String, source: String) -> Result<Self, ConfigError> {
        let run: RunConfig = serde_json::from_str(&source).map_err(|e| ConfigError {
            file: file.clone(),
            line: (e.line() > 0).then_some(e.line()),
            field: None,
            message: e.to_string(),
        })?;
        Ok(Self { file, source, run })
    }

    /// Error for the dotted `field`, located in the source.
    pub fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        let path: Vec<&str> = field.split('.').collect();
        ConfigError {
            file: self.file.clone(),
            line: locate(&self.source, &path),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    /// Confirms that the only command block present is the one for `kind`.
    pub fn check_command(&self, kind: CommandKind) -> Result<(), ConfigError> {
        let r = &self.run;
        let present: Vec<&str> = [
            (r.energy.is_some(), "energy"),
            (r.spectrum.is_some(), "spectrum"),
            (r.sweep_coupling.is_some(), "sweep_coupling"),
            (r.sweep_ratio.is_some(), "sweep_ratio"),
            (r.validate_oracle.is_some(), "validate_oracle"),
        ]
        .into_iter()
        .filter_map(|(p, n)| p.then_some(n))
        .collect();
        match present.as_slice() {
            [one] if *one == kind.block() => Ok(()),
            [] => Err(ConfigError {
                file: self.file.clone(),
                line: None,
                field: None,
                message: format!("missing `{}` block (exactly one command block is required)", kind.block()),
            }),
            [one] => Err(self.error(one, format!("this config is for `{one}`, not `{}`", kind.block()))),
            [_, second, ..] => Err(self.error(
                second,
                format!("exactly one command block is allowed, found {}", present.join(", ")),
            )),
        }
    }

    pub fn system(&self) -> Result<(SystemConfig, ValidationReport), ConfigError> {
        let s = &self.run.system;
        let osc = |o: &OscillatorBlock| OscillatorParams::new(o.mass, o.eigenfrequency, o.damping);
        let osc1 = osc(&s.osc1);
        let bath = |label: &str, b: &BathBlock| -> Result<BathSpec, ConfigError> {
            match b.model {
                ModelTag::FlatOhmic | ModelTag::Debye => {
                    let cutoff = b
                        .cutoff
                        .ok_or_else(|| self.error(&format!("system.{label}.model"), "cutoff is required for this model"))?;
                    if b.gauss_sigma.is_some() {
                        return Err(self.error(&format!("system.{label}.gauss_sigma"), "gauss_sigma only applies to the gauss model"));
                    }
                    Ok(if b.model == ModelTag::Debye {
                        BathSpec::debye(b.temperature, cutoff)
                    } else {
                        BathSpec::flat_ohmic(b.temperature, cutoff)
                    })
                }
                ModelTag::Gauss => {
                    if b.cutoff.is_some() {
                        return Err(self.error(
                            &format!("system.{label}.cutoff"),
                            "the gauss model is truncated at 12 sigma; cutoff does not apply",
                        ));
                    }
                    let sigma = b
                        .gauss_sigma
                        .ok_or_else(|| self.error(&format!("system.{label}.model"), "gauss_sigma is required for the gauss model"))?;
                    Ok(BathSpec::gauss(b.temperature, sigma))
                }
            }
        };
        let coupling = match (s.coupling, s.coupling_over_lambda0) {
            (Some(c), None) => c,
            (None, Some(k)) => k * osc1.spring_constant(),
            (Some(_), Some(_)) => {
                return Err(self.error("system.coupling_over_lambda0", "give either coupling or coupling_over_lambda0, not both"))
            }
            (None, None) => {
                return Err(self.error("system", "coupling (or coupling_over_lambda0) is required"))
            }
        };
        let sys = SystemConfig {
            units: self.run.units.into(),
            osc1,
            osc2: osc(&s.osc2),
            bath1: bath("bath1", &s.bath1)?,
            bath2: bath("bath2", &s.bath2)?,
            coupling,
        };
        let report = validate(&sys);
        if let Some(v) = report.violations.first() {
            let mut err = self.error(&format!("system.{}", v.field), v.message.clone());
            if report.violations.len() > 1 {
                let rest: Vec<String> = report.violations[1..]
                    .iter()
                    .map(|v| {
                        let e = self.error(&format!("system.{}", v.field), v.message.clone());
                        e.to_string()
                    })
                    .collect();
                err.message = format!("{}\n{}", err.message, rest.join("\n"));
            }
            return Err(err);
        }
        Ok((sys, report))
    }

    pub fn quadrature(&self) -> Result<QuadratureOptions, ConfigError> {
        let t = &self.run.tolerance;
        let mut opts = QuadratureOptions::default();
        if let Some(r) = t.rel_tol {
            if !(r > 0.0 && r < 1.0) {
                return Err(self.error("tolerance.rel_tol", "rel_tol must lie in (0, 1)"));
            }
            opts.rel_tol = r;
        }
        if let Some(a) = t.abs_tol {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(self.error("tolerance.abs_tol", "abs_tol must be non-negative"));
            }
            opts.abs_tol = a;
        }
        if let Some(m) = t.max_subdivisions {
            if m == 0 {
                return Err(self.error("tolerance.max_subdivisions", "max_subdivisions must be positive"));
            }
            opts.max_subdivisions = m;
        }
        Ok(opts)
    }

    /// Spectrum grid in units of `ω₀₁`.
    pub fn spectrum_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let g = self.run.spectrum.ok_or_else(|| self.error("spectrum", "missing spectrum block"))?;
        if g.samples == 0 {
            return Err(self.error("spectrum.samples", "the grid needs at least one sample"));
        }
        if !(g.min.is_finite() && g.min >= 0.0) {
            return Err(self.error("spectrum.min", "min must be finite and non-negative"));
        }
        if g.samples == 1 {
            return Ok(vec![g.min]);
        }
        if !(g.max.is_finite() && g.max > g.min) {
            return Err(self.error("spectrum.max", "max must be finite and above min"));
        }
        Ok(linspace(g.min, g.max, g.samples))
    }

    pub fn axis(&self, kind: CommandKind) -> Result<Vec<f64>, ConfigError> {
        let name = kind.block();
        let block = match kind {
            CommandKind::SweepCoupling => self.run.sweep_coupling.as_ref(),
            CommandKind::SweepRatio => self.run.sweep_ratio.as_ref(),
            _ => None,
        }
        .ok_or_else(|| self.error(name, "missing axis block"))?;
        let values = match (&block.values, block.start, block.stop, block.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 {
                    return Err(self.error(&format!("{name}.points"), "points must be positive"));
                }
                if n == 1 {
                    vec![a]
                } else {
                    linspace(a, b, n)
                }
            }
            _ => {
                return Err(self.error(name, "give either `values` or all of `start`, `stop`, `points`"));
            }
        };
        if values.is_empty() {
            return Err(self.error(&format!("{name}.values"), "axis has no values"));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if values.iter().any(|v| !v.is_finite()) || !(increasing || decreasing) {
            return Err(self.error(name, "axis values must be finite and strictly monotone"));
        }
        let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
        match kind {
            CommandKind::SweepCoupling if lowest < 0.0 => {
                Err(self.error(name, "coupling ratios must be non-negative"))
            }
            CommandKind::SweepRatio if lowest <= 0.0 => {
                Err(self.error(name, "frequency ratios must be positive"))
            }
            _ => Ok(values),
        }
    }

    pub fn oracle(&self) -> Result<(usize, f64), ConfigError> {
        let o = self.run.validate_oracle.ok_or_else(|| self.error("validate_oracle", "missing block"))?;
        if o.modes < 2 {
            return Err(self.error("validate_oracle.modes", "at least two bath modes are required"));
        }
        let threshold = o.threshold.unwrap_or(0.005);
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(self.error("validate_oracle.threshold", "threshold must be positive"));
        }
        Ok((o.modes, threshold))
    }

    /// Output file stem.
    pub fn stem(&self, kind: CommandKind) -> Result<String, ConfigError> {
        match &self.run.output.name {
            None => Ok(kind.block().to_string()),
            Some(n) if !n.is_empty() && !n.contains(['/', '\\']) && n != "." && n != ".." => Ok(n.clone()),
            Some(_) => Err(self.error("output.name", "name must be a plain file stem")),
        }
    }

    /// SHA-256 of the canonical (re-serialized) configuration with `rel_tol`
    /// applied, so formatting changes do not alter the hash.
    pub fn hash(&self, rel_tol: Option<f64>) -> String {
        let mut run = self.run.clone();
        if rel_tol.is_some() {
            run.tolerance.rel_tol = rel_tol;
        }
        let canonical = serde_json::to_vec(&run).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + i as f64 * step }).collect()
}
