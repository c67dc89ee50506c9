//! Finite baths of `N` oscillators and the discrete energy sums they produce.
//!
//! This is the independent check on [`crate::energies`]: each bath is laid out
//! on a midpoint grid and the mode sums are evaluated term by term. With the
//! weights `wⱼ = (mⱼ/m_sel)ωⱼ² = (2/π)ρ(ωⱼ)Δω` the sums converge to the
//! continuum integrals as `N → ∞`. Individual bath masses never appear; only
//! the combined weights do.

use crate::error::{Error, Result};
use crate::model::{validate, BathSpec, OscillatorParams, SystemConfig};
use crate::parallel::Execution;
use crate::response::{beta, mean_energy, rho};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub frequencies: Vec<f64>,
    pub weights: Vec<f64>,
    pub spacing: f64,
    pub source: BathSpec,
}

impl DiscreteBath {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// `Σⱼ wⱼ f(ωⱼ)`.
    pub fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.weights)
            .map(|(&w, &wt)| wt * f(w))
            .sum()
    }
}

/// Lays `n` bath oscillators on the midpoints of a uniform grid spanning the
/// bath's support.
pub fn build_bath(bath: &BathSpec, attached: &OscillatorParams, n: usize) -> Result<DiscreteBath> {
    if n < 2 {
        return Err(Error::TooFewBathModes(n));
    }
    let (lo, hi) = bath.domain(attached);
    if !(hi.is_finite() && hi > lo) {
        return Err(Error::InvalidGrid(format!("bath support [{lo:e}, {hi:e}] is not a finite interval")));
    }
    let spacing = (hi - lo) / n as f64;
    let frequencies: Vec<f64> = (0..n).map(|j| lo + (j as f64 + 0.5) * spacing).collect();
    let weights = frequencies
        .iter()
        .map(|&w| 2.0 / PI * rho(bath, attached, w) * spacing)
        .collect();
    Ok(DiscreteBath {
        frequencies,
        weights,
        spacing,
        source: *bath,
    })
}

fn check(sys: &SystemConfig, bath1: &DiscreteBath, bath2: &DiscreteBath) -> Result<()> {
    validate(sys).into_result()?;
    for b in [bath1, bath2] {
        if b.len() < 2 {
            return Err(Error::TooFewBathModes(b.len()));
        }
    }
    Ok(())
}

/// One mode sum `Σⱼ wⱼ g(ωⱼ)` with `g` evaluated from the pair's response.
fn mode_sum(
    sys: &SystemConfig,
    bath: &DiscreteBath,
    exec: Execution,
    g: impl Fn(f64, f64, num_complex::Complex64, num_complex::Complex64, f64) -> f64 + Sync + Send,
) -> f64 {
    let c = sys.constants();
    let strength = sys.coupling_strength();
    let temperature = bath.source.temperature;
    exec.ordered_sum(bath.len(), |j| {
        let w = bath.frequencies[j];
        let b1 = beta(&sys.osc1, w);
        let b2 = beta(&sys.osc2, w);
        let d2 = (b1 * b2 - strength).norm_sqr();
        bath.weights[j] * g(w, mean_energy(&c, w, temperature), b1, b2, d2)
    })
}

/// `½{c Σₖ wₖ(ωₖ² + ω₀₁²)Θ₂/|D|² + Σⱼ wⱼ(ωⱼ² + ω₀₁²)Θ₁|β₂|²/|D|²}` with
/// `c = λ²/(m₁m₂)`.
pub fn u1_discrete(sys: &SystemConfig, bath1: &DiscreteBath, bath2: &DiscreteBath, exec: Execution) -> Result<f64> {
    check(sys, bath1, bath2)?;
    let w01 = sys.osc1.eigenfrequency.powi(2);
    let strength = sys.coupling_strength();
    let cross = if strength == 0.0 {
        0.0
    } else {
        strength * mode_sum(sys, bath2, exec, |w, th, _, _, d2| (w * w + w01) * th / d2)
    };
    let direct = mode_sum(sys, bath1, exec, |w, th, _, b2, d2| (w * w + w01) * th * b2.norm_sqr() / d2);
    Ok(0.5 * (cross + direct))
}

/// Mirror of [`u1_discrete`] with the indices exchanged.
pub fn u2_discrete(sys: &SystemConfig, bath1: &DiscreteBath, bath2: &DiscreteBath, exec: Execution) -> Result<f64> {
    check(sys, bath1, bath2)?;
    let w02 = sys.osc2.eigenfrequency.powi(2);
    let strength = sys.coupling_strength();
    let cross = if strength == 0.0 {
        0.0
    } else {
        strength * mode_sum(sys, bath1, exec, |w, th, _, _, d2| (w * w + w02) * th / d2)
    };
    let direct = mode_sum(sys, bath2, exec, |w, th, b1, _, d2| (w * w + w02) * th * b1.norm_sqr() / d2);
    Ok(0.5 * (cross + direct))
}

/// `−c{Σⱼ wⱼΘ₁ Re β₂/|D|² + Σₖ wₖΘ₂ Re β₁/|D|²}`.
pub fn u_int_discrete(sys: &SystemConfig, bath1: &DiscreteBath, bath2: &DiscreteBath, exec: Execution) -> Result<f64> {
    check(sys, bath1, bath2)?;
    let strength = sys.coupling_strength();
    if strength == 0.0 {
        return Ok(0.0);
    }
    let from1 = mode_sum(sys, bath1, exec, |_, th, _, b2, d2| th * b2.re / d2);
    let from2 = mode_sum(sys, bath2, exec, |_, th, b1, _, d2| th * b1.re / d2);
    Ok(-strength * (from1 + from2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhysicalConstants, UnitSystem};
    use approx::assert_relative_eq;

    fn osc() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 0.02)
    }

    #[test]
    fn flat_weights_sum_to_density_times_width() {
        let b = build_bath(&BathSpec::flat_ohmic(1.0, 30.0), &osc(), 1000).unwrap();
        assert_relative_eq!(b.weights.iter().sum::<f64>(), 2.0 / PI * 0.04 * 30.0, max_relative = 1e-12);
        assert_eq!(b.frequencies[0], 0.015);
        assert!(b.frequencies.windows(2).all(|w| w[1] > w[0]));
        assert!(*b.frequencies.last().unwrap() <= 30.0);
    }

    #[test]
    fn debye_weights_vanish_at_low_frequency() {
        let b = build_bath(&BathSpec::debye(1.0, 30.0), &osc(), 1000).unwrap();
        let w0 = b.frequencies[0];
        assert_relative_eq!(b.weights[0], 2.0 / PI * 0.04 * w0 * w0 * b.spacing, max_relative = 1e-12);
        assert!(b.weights[0] < 1e-6 * b.weights[500]);
    }

    #[test]
    fn midpoint_sum_is_second_order() {
        // f(ω) = ω against a Debye bath: exact (2/π)·2γ·Ω⁴/4 with ω₀ = 1
        let exact = 2.0 / PI * 0.04 * 30f64.powi(4) / 4.0;
        let err = |n| {
            let b = build_bath(&BathSpec::debye(1.0, 30.0), &osc(), n).unwrap();
            (b.weighted_sum(|w| w) - exact).abs()
        };
        let ratio = err(1000) / err(2000);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn too_few_modes() {
        assert!(matches!(build_bath(&BathSpec::debye(1.0, 30.0), &osc(), 1), Err(Error::TooFewBathModes(1))));
    }

    fn system(coupling: f64) -> SystemConfig {
        SystemConfig {
            units: UnitSystem::Reduced,
            osc1: osc(),
            osc2: OscillatorParams::new(1.0, 1.3, 0.026),
            bath1: BathSpec::debye(3.9, 30.0),
            bath2: BathSpec::debye(9.2, 30.0),
            coupling,
        }
    }

    #[test]
    fn two_line_baths_by_hand() {
        let sys = system(0.2);
        let b1 = build_bath(&sys.bath1, &sys.osc1, 2).unwrap();
        let b2 = build_bath(&sys.bath2, &sys.osc2, 2).unwrap();
        let c = PhysicalConstants::REDUCED;
        let strength = 0.04;
        let parts = |w: f64| {
            let b1 = beta(&sys.osc1, w);
            let b2 = beta(&sys.osc2, w);
            (b1, b2, (b1 * b2 - strength).norm_sqr())
        };
        let mut cross = 0.0;
        let mut direct = 0.0;
        let mut int = 0.0;
        for j in 0..2 {
            let (w, wt) = (b2.frequencies[j], b2.weights[j]);
            let (_, _, d2) = parts(w);
            cross += wt * (w * w + 1.0) * mean_energy(&c, w, 9.2) / d2;
            let (b1r, _, d2) = parts(w);
            int += wt * mean_energy(&c, w, 9.2) * b1r.re / d2;
            let (w, wt) = (b1.frequencies[j], b1.weights[j]);
            let (_, b2r, d2) = parts(w);
            direct += wt * (w * w + 1.0) * mean_energy(&c, w, 3.9) * b2r.norm_sqr() / d2;
            int += wt * mean_energy(&c, w, 3.9) * b2r.re / d2;
        }
        let u1 = u1_discrete(&sys, &b1, &b2, Execution::Sequential).unwrap();
        assert_relative_eq!(u1, 0.5 * (strength * cross + direct), max_relative = 1e-14);
        let ui = u_int_discrete(&sys, &b1, &b2, Execution::Sequential).unwrap();
        assert_relative_eq!(ui, -strength * int, max_relative = 1e-14);
    }

    #[test]
    fn decoupled_sums() {
        let sys = system(0.0);
        let b1 = build_bath(&sys.bath1, &sys.osc1, 500).unwrap();
        let b2 = build_bath(&sys.bath2, &sys.osc2, 500).unwrap();
        let hot = build_bath(&sys.bath2.with_temperature(1e3), &sys.osc2, 500).unwrap();
        let exec = Execution::Parallel;
        assert_eq!(u1_discrete(&sys, &b1, &b2, exec).unwrap(), u1_discrete(&sys, &b1, &hot, exec).unwrap());
        assert_eq!(u_int_discrete(&sys, &b1, &b2, exec).unwrap(), 0.0);
    }

    #[test]
    fn swap_symmetry() {
        let sys = system(0.3);
        let b1 = build_bath(&sys.bath1, &sys.osc1, 3000).unwrap();
        let b2 = build_bath(&sys.bath2, &sys.osc2, 3000).unwrap();
        let exec = Execution::Sequential;
        let sw = sys.swapped();
        assert_eq!(u2_discrete(&sys, &b1, &b2, exec).unwrap(), u1_discrete(&sw, &b2, &b1, exec).unwrap());
        assert_relative_eq!(
            u_int_discrete(&sys, &b1, &b2, exec).unwrap(),
            u_int_discrete(&sw, &b2, &b1, exec).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn execution_strategies_agree_bitwise() {
        let sys = system(0.1);
        let b1 = build_bath(&sys.bath1, &sys.osc1, 20_000).unwrap();
        let b2 = build_bath(&sys.bath2, &sys.osc2, 20_000).unwrap();
        let a = u_int_discrete(&sys, &b1, &b2, Execution::Sequential).unwrap();
        let b = u_int_discrete(&sys, &b1, &b2, Execution::Parallel).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
