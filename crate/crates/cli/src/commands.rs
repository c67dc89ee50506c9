//! The five subcommands. Each one builds its outputs in memory and hands them
//! back as a list of files; nothing touches the disk until the command has
//! finished.

use std::fmt::Write as _;

use oscbath::{
    build_bath, energy_report, normal_modes, sample_spectrum, sweep_coupling, sweep_frequency_ratio, to_reduced,
    u1_discrete, u2_discrete, u_int_discrete, EnergyEstimate, Execution, QuadratureOptions, ReducedSystem,
    SweepTable, SystemConfig,
};
use serde::Serialize;

use crate::config::{CommandKind, LoadedConfig};
use crate::svg::LinePlot;
use crate::CliError;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NonConverged,
    OracleMismatch,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::NonConverged => 2,
            Outcome::OracleMismatch => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub outcome: Outcome,
    pub artifacts: Vec<Artifact>,
    /// Human-readable summary for stdout.
    pub summary: String,
}

/// Everything a command needs, resolved from the config and the flags.
pub struct Prepared {
    pub kind: CommandKind,
    pub config: LoadedConfig,
    pub system: SystemConfig,
    pub reduced: ReducedSystem,
    pub opts: QuadratureOptions,
    pub hash: String,
    pub stem: String,
    pub svg: bool,
    pub warnings: Vec<String>,
}

impl Prepared {
    pub fn new(kind: CommandKind, config: LoadedConfig, rel_tol: Option<f64>, svg: bool) -> Result<Self, CliError> {
        config.check_command(kind)?;
        let (system, report) = config.system()?;
        let mut opts = config.quadrature()?;
        if let Some(r) = rel_tol {
            if !(r > 0.0 && r < 1.0) {
                return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {r}")));
            }
            opts.rel_tol = r;
        }
        let reduced = to_reduced(&system)?;
        let stem = config.stem(kind)?;
        let hash = config.hash(rel_tol);
        let warnings = report.warnings.iter().map(|w| format!("{}: {}", config.file, w)).collect();
        Ok(Self {
            kind,
            config,
            system,
            reduced,
            opts,
            hash,
            stem,
            svg,
            warnings,
        })
    }

    pub fn run(&self) -> Result<CommandOutput, CliError> {
        match self.kind {
            CommandKind::Energy => energy(self),
            CommandKind::Spectrum => spectrum(self),
            CommandKind::SweepCoupling | CommandKind::SweepRatio => sweep(self),
            CommandKind::ValidateOracle => validate_oracle(self),
        }
    }

    fn comment(&self) -> String {
        format!(
            "# oscbath {} config_sha256={} units=reduced\n",
            self.kind.block(),
            self.hash
        )
    }

    fn file(&self, ext: &str, contents: Vec<u8>) -> Artifact {
        Artifact {
            file_name: format!("{}.{ext}", self.stem),
            contents,
        }
    }
}

/// Shortest round-trip representation, always in scientific form.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

fn csv_table(comment: String, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(comment.into_bytes());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn json(value: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

#[derive(Serialize)]
struct EstimateOut {
    value: f64,
    error_estimate: f64,
    converged: bool,
    evaluations: usize,
}

impl From<EnergyEstimate> for EstimateOut {
    fn from(e: EnergyEstimate) -> Self {
        Self {
            value: e.value,
            error_estimate: e.error_estimate,
            converged: e.converged,
            evaluations: e.evaluations,
        }
    }
}

#[derive(Serialize)]
struct ReducedEnergies {
    /// `ħω₀₁` in the config's energy unit.
    energy_unit: f64,
    u1: f64,
    u2: f64,
    u_int: f64,
}

#[derive(Serialize)]
struct EnergyOut {
    command: &'static str,
    config_sha256: String,
    units: &'static str,
    u1: EstimateOut,
    u2: EstimateOut,
    u_int: EstimateOut,
    normalized_u_int: f64,
    normalized_error: f64,
    converged: bool,
    unstable: bool,
    near_critical: bool,
    coupling_over_lambda0: f64,
    critical_coupling_over_lambda0: f64,
    normal_modes_over_omega01: Vec<f64>,
    reduced: ReducedEnergies,
}

fn energy(p: &Prepared) -> Result<CommandOutput, CliError> {
    let r = energy_report(&p.system, &p.opts)?;
    let k = p.reduced.scales.energy;
    let red = &p.reduced.system;
    let out = EnergyOut {
        command: "energy",
        config_sha256: p.hash.clone(),
        units: p.system.units.name(),
        u1: r.u1.into(),
        u2: r.u2.into(),
        u_int: r.u_int.into(),
        normalized_u_int: r.normalized_u_int,
        normalized_error: r.normalized_error,
        converged: r.converged(),
        unstable: r.unstable,
        near_critical: r.near_critical,
        coupling_over_lambda0: red.coupling,
        critical_coupling_over_lambda0: red.critical_coupling(),
        normal_modes_over_omega01: normal_modes(red).real_modes,
        reduced: ReducedEnergies {
            energy_unit: k,
            u1: r.u1.value / k,
            u2: r.u2.value / k,
            u_int: r.u_int.value / k,
        },
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "u1     = {} (reduced {:.6})", r.u1, r.u1.value / k);
    let _ = writeln!(summary, "u2     = {} (reduced {:.6})", r.u2, r.u2.value / k);
    let _ = writeln!(summary, "u_int  = {} (reduced {:.6e})", r.u_int, r.u_int.value / k);
    let _ = writeln!(summary, "u_int/(u1+u2) = {:.6e}", r.normalized_u_int);
    let _ = writeln!(
        summary,
        "converged: {}  unstable: {}  near_critical: {}",
        r.converged(),
        r.unstable,
        r.near_critical
    );
    Ok(CommandOutput {
        outcome: if r.converged() { Outcome::Success } else { Outcome::NonConverged },
        artifacts: vec![p.file("json", json(&out))],
        summary,
    })
}

fn spectrum(p: &Prepared) -> Result<CommandOutput, CliError> {
    let grid = p.config.spectrum_grid()?;
    let red = &p.reduced.system;
    let s = sample_spectrum(red, &grid, Execution::default())?;
    let csv = csv_table(
        p.comment(),
        &["omega_over_omega01", "u_int_spectral_density"],
        s.frequencies.iter().zip(&s.values).map(|(w, v)| vec![num(*w), num(*v)]),
    )?;
    let mut artifacts = vec![p.file("csv", csv)];
    if p.svg {
        let plot = LinePlot {
            title: "Spectral power density of the interaction energy".into(),
            x_label: "ω/ω₀₁".into(),
            y_label: "Ū_int(ω) [ħ]".into(),
            points: s.frequencies.iter().copied().zip(s.values.iter().copied()).collect(),
            markers: vec![(1.0, "ω₀₁".into()), (red.osc2.eigenfrequency, "ω₀₂".into())],
        };
        artifacts.push(p.file("svg", plot.render().into_bytes()));
    }
    let peak = s
        .frequencies
        .iter()
        .zip(&s.values)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
    let mut summary = format!("{} samples", s.frequencies.len());
    if let Some((w, v)) = peak {
        let _ = write!(summary, "; strongest Ū_int(ω) = {v:.6e} ħ at ω/ω₀₁ = {w:.4}");
    }
    summary.push('\n');
    Ok(CommandOutput {
        outcome: Outcome::Success,
        artifacts,
        summary,
    })
}

fn sweep(p: &Prepared) -> Result<CommandOutput, CliError> {
    let axis = p.config.axis(p.kind)?;
    let red = &p.reduced.system;
    let exec = Execution::default();
    let (table, marker): (SweepTable, (f64, &str)) = if p.kind == CommandKind::SweepCoupling {
        (sweep_coupling(red, &axis, &p.opts, exec)?, (red.critical_coupling(), "λ_crit"))
    } else {
        (sweep_frequency_ratio(red, &axis, &p.opts, exec)?, (1.0, "ω₀₂ = ω₀₁"))
    };
    let header = [table.axis.name(), "u1", "u2", "u_int", "normalized_u_int", "converged", "unstable"];
    let csv = csv_table(
        p.comment(),
        &header,
        table.rows.iter().map(|row| {
            let r = &row.report;
            vec![
                num(row.axis_value),
                num(r.u1.value),
                num(r.u2.value),
                num(r.u_int.value),
                num(r.normalized_u_int),
                r.converged().to_string(),
                r.unstable.to_string(),
            ]
        }),
    )?;
    let mut artifacts = vec![p.file("csv", csv)];
    if p.svg {
        let (title, x_label) = if p.kind == CommandKind::SweepCoupling {
            ("Normalized interaction energy versus coupling", "λ/λ₀")
        } else {
            ("Normalized interaction energy versus frequency ratio", "ω₀₂/ω₀₁")
        };
        let plot = LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: "Ū_int/(Ū₁ + Ū₂)".into(),
            points: table.rows.iter().map(|r| (r.axis_value, r.report.normalized_u_int)).collect(),
            markers: vec![(marker.0, marker.1.into())],
        };
        artifacts.push(p.file("svg", plot.render().into_bytes()));
    }
    let failed = table.rows.iter().filter(|r| !r.report.converged()).count();
    let unstable = table.rows.iter().filter(|r| r.report.unstable).count();
    let summary = format!(
        "{} rows along {}; {failed} non-converged, {unstable} unstable\n",
        table.rows.len(),
        table.axis.name()
    );
    Ok(CommandOutput {
        outcome: if failed == 0 { Outcome::Success } else { Outcome::NonConverged },
        artifacts,
        summary,
    })
}

#[derive(Serialize)]
struct Triple {
    u1: f64,
    u2: f64,
    u_int: f64,
}

#[derive(Serialize)]
struct OracleOut {
    command: &'static str,
    config_sha256: String,
    units: &'static str,
    modes: usize,
    threshold: f64,
    continuum: Triple,
    discrete: Triple,
    relative_deviation: Triple,
    continuum_converged: bool,
    passed: bool,
}

/// `|d − c|/|c|`, or zero when both vanish.
pub fn deviation(discrete: f64, continuum: f64) -> f64 {
    if discrete == continuum {
        0.0
    } else {
        (discrete - continuum).abs() / continuum.abs()
    }
}

fn validate_oracle(p: &Prepared) -> Result<CommandOutput, CliError> {
    let (modes, threshold) = p.config.oracle()?;
    let red = &p.reduced.system;
    let exec = Execution::default();
    let c = energy_report(red, &p.opts)?;
    let b1 = build_bath(&red.bath1, &red.osc1, modes)?;
    let b2 = build_bath(&red.bath2, &red.osc2, modes)?;
    let d = Triple {
        u1: u1_discrete(red, &b1, &b2, exec)?,
        u2: u2_discrete(red, &b1, &b2, exec)?,
        u_int: u_int_discrete(red, &b1, &b2, exec)?,
    };
    let dev = Triple {
        u1: deviation(d.u1, c.u1.value),
        u2: deviation(d.u2, c.u2.value),
        u_int: deviation(d.u_int, c.u_int.value),
    };
    let passed = [dev.u1, dev.u2, dev.u_int].iter().all(|&x| x <= threshold);
    let mut summary = format!("discrete baths of {modes} modes, threshold {threshold:e} (reduced units)\n");
    let _ = writeln!(summary, "{:<6} {:>22} {:>22} {:>12}", "", "continuum", "discrete", "deviation");
    for (name, cv, dv, x) in [
        ("u1", c.u1.value, d.u1, dev.u1),
        ("u2", c.u2.value, d.u2, dev.u2),
        ("u_int", c.u_int.value, d.u_int, dev.u_int),
    ] {
        let mark = if x <= threshold { "" } else { "  MISMATCH" };
        let _ = writeln!(summary, "{name:<6} {cv:>22.15e} {dv:>22.15e} {x:>12.3e}{mark}");
    }
    let out = OracleOut {
        command: "validate_oracle",
        config_sha256: p.hash.clone(),
        units: "reduced",
        modes,
        threshold,
        continuum: Triple {
            u1: c.u1.value,
            u2: c.u2.value,
            u_int: c.u_int.value,
        },
        discrete: d,
        relative_deviation: dev,
        continuum_converged: c.converged(),
        passed,
    };
    let outcome = if !c.converged() {
        Outcome::NonConverged
    } else if passed {
        Outcome::Success
    } else {
        Outcome::OracleMismatch
    };
    Ok(CommandOutput {
        outcome,
        artifacts: vec![p.file("json", json(&out))],
        summary,
    })
}
