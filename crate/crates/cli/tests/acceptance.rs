//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p oscbath-cli --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use oscbath::presets::{coupling_study, oracle_study, spectrum_study, BASE_FREQUENCY, BASE_MASS};
use oscbath::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &'static str, result: Result<(bool, String)>) -> Check {
    match result {
        Ok((pass, detail)) => Check { id, name, pass, detail },
        Err(e) => Check {
            id,
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn single_oscillator(temperature: f64) -> SystemConfig {
    let osc = OscillatorParams::new(BASE_MASS, BASE_FREQUENCY, 1e-3 * BASE_FREQUENCY);
    let bath = BathSpec::flat_ohmic(temperature, 50.0 * BASE_FREQUENCY);
    SystemConfig {
        units: UnitSystem::Cgs,
        osc1: osc,
        osc2: osc,
        bath1: bath,
        bath2: bath,
        coupling: 0.0,
    }
}

fn equilibrium_limit() -> Result<(bool, String)> {
    let c = PhysicalConstants::CGS;
    let opts = QuadratureOptions::default();
    let zero_point = 0.5 * c.hbar * BASE_FREQUENCY;
    let (cold, t_cold) = timed(|| u1_mean(&single_oscillator(0.0), &opts));
    let cold = cold?.value / zero_point;
    let hot_t = 20.0 * c.hbar * BASE_FREQUENCY / c.k_boltzmann;
    let (hot, t_hot) = timed(|| u1_mean(&single_oscillator(hot_t), &opts));
    let hot = hot?.value / (c.k_boltzmann * hot_t);
    let budget = Duration::from_millis(50);
    let pass = (cold - 1.0).abs() <= 0.01 && (hot - 1.0).abs() <= 0.02 && t_cold < budget && t_hot < budget;
    Ok((
        pass,
        format!(
            "T=0: U/(ħω₀/2) = {cold:.5} ({:.1} ms); θ=20: U/k_BT = {hot:.5} ({:.1} ms)",
            ms(t_cold),
            ms(t_hot)
        ),
    ))
}

fn reduction_identity() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = QuadratureOptions::default().with_rel_tol(1e-12);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let gamma = rng.random_range(1e-3..5e-2);
        let theta = rng.random_range(0.0..20.0);
        let cutoff = rng.random_range(5.0..100.0);
        let osc = OscillatorParams::new(1.0, 1.0, gamma);
        let bath = BathSpec::flat_ohmic(theta, cutoff);
        let sys = SystemConfig {
            units: UnitSystem::Reduced,
            osc1: osc,
            osc2: OscillatorParams::new(1.0, rng.random_range(0.5..2.0), gamma),
            bath1: bath,
            bath2: BathSpec::flat_ohmic(rng.random_range(0.0..20.0), cutoff),
            coupling: 0.0,
        };
        let a = u1_mean(&sys, &opts)?.value;
        let b = u_equilibrium_single(&osc, theta, cutoff, UnitSystem::Reduced, &opts)?.value;
        worst = worst.max((a - b).abs() / b.abs());
    }
    Ok((worst <= 1e-10, format!("worst relative difference {worst:.2e} over 20 configurations")))
}

fn fitted_slope(ns: &[f64], errs: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn discrete_energies(sys: &SystemConfig, n: usize) -> Result<[f64; 3]> {
    let b1 = build_bath(&sys.bath1, &sys.osc1, n)?;
    let b2 = build_bath(&sys.bath2, &sys.osc2, n)?;
    let e = Execution::Parallel;
    Ok([
        u1_discrete(sys, &b1, &b2, e)?,
        u2_discrete(sys, &b1, &b2, e)?,
        u_int_discrete(sys, &b1, &b2, e)?,
    ])
}

fn oracle_equivalence() -> Result<(bool, String)> {
    let start = Instant::now();
    let sys = to_reduced(&oracle_study())?.system;
    let r = energy_report(&sys, &QuadratureOptions::default().with_rel_tol(1e-12))?;
    let cont = [r.u1.value, r.u2.value, r.u_int.value];
    let fine = discrete_energies(&sys, 20_000)?;
    let dev: Vec<f64> = fine.iter().zip(&cont).map(|(d, c)| (d - c).abs() / c.abs()).collect();
    let agree = r.converged() && dev.iter().all(|&d| d <= 5e-3);

    let ns = [1e3, 4e3, 1.6e4];
    let mut errs = [[0.0; 3]; 3];
    for (j, &n) in ns.iter().enumerate() {
        let d = discrete_energies(&sys, n as usize)?;
        for q in 0..3 {
            errs[q][j] = (d[q] - cont[q]).abs() / cont[q].abs();
        }
    }
    let slopes: Vec<f64> = errs.iter().map(|e| fitted_slope(&ns, e)).collect();
    let slope_ok = slopes.iter().all(|s| (s + 2.0).abs() <= 0.3);
    let elapsed = start.elapsed();
    let pass = agree && slope_ok && elapsed < Duration::from_secs(5);
    Ok((
        pass,
        format!(
            "N=2e4 deviations u1 {:.1e}, u2 {:.1e}, u_int {:.1e} (limit 5e-3); \
             slopes u1 {:.2}, u2 {:.2}, u_int {:.2} (target -2 ± 0.3); \
             u_int errors at N=1e3/4e3/1.6e4: {:.1e}/{:.1e}/{:.1e}; {:.2} s",
            dev[0],
            dev[1],
            dev[2],
            slopes[0],
            slopes[1],
            slopes[2],
            errs[2][0],
            errs[2][1],
            errs[2][2],
            elapsed.as_secs_f64()
        ),
    ))
}

fn spectrum_peaks(sys: &SystemConfig, lo: f64, hi: f64, step: f64) -> Result<Vec<Peak>> {
    let n = ((hi - lo) / step).round() as usize + 1;
    let grid: Vec<f64> = linspace(lo, hi, n).into_iter().map(|w| w * BASE_FREQUENCY).collect();
    let mut peaks = find_peaks(&sample_spectrum(sys, &grid, Execution::Parallel)?);
    for p in &mut peaks {
        p.frequency /= BASE_FREQUENCY;
    }
    Ok(peaks)
}

fn dominant_pair(peaks: &[Peak]) -> Option<[f64; 2]> {
    let mut f = [peaks.first()?.frequency, peaks.get(1)?.frequency];
    f.sort_by(f64::total_cmp);
    Some(f)
}

fn figure1_peaks() -> Result<(bool, String)> {
    let a = dominant_pair(&spectrum_peaks(&spectrum_study(1.3, 0.01), 0.2, 2.0, 5e-4)?);
    let b = dominant_pair(&spectrum_peaks(&spectrum_study(0.5, 0.01), 0.2, 2.0, 5e-4)?);
    let (Some(a), Some(b)) = (a, b) else {
        return Ok((false, "fewer than two peaks found".into()));
    };
    let pass = (a[0] - 1.0).abs() <= 0.02
        && (a[1] - 1.3).abs() <= 0.03
        && (b[0] - 0.5).abs() <= 0.02
        && (b[1] - 1.0).abs() <= 0.02;
    Ok((
        pass,
        format!(
            "ω₀₂=1.3ω₀₁: peaks at {:.4}, {:.4}; ω₀₂=0.5ω₀₁: peaks at {:.4}, {:.4}",
            a[0], a[1], b[0], b[1]
        ),
    ))
}

fn mode_shift_law() -> Result<(bool, String)> {
    let gamma = 0.02;
    let mut pass = true;
    let mut prev_peaks = [f64::INFINITY, 0.0];
    let mut prev_modes = [f64::INFINITY, 0.0];
    let mut detail = Vec::new();
    for k in [0.1, 0.3, 0.6] {
        let sys = spectrum_study(1.3, k);
        let Some(p) = dominant_pair(&spectrum_peaks(&sys, 0.2, 2.0, 5e-4)?) else {
            return Ok((false, format!("fewer than two peaks at λ/λ₀ = {k}")));
        };
        let modes = normal_modes(&sys).real_modes;
        let m = [modes[0] / BASE_FREQUENCY, modes[modes.len() - 1] / BASE_FREQUENCY];
        let worst = (p[0] - m[0]).abs().max((p[1] - m[1]).abs());
        pass &= worst <= 3.0 * gamma;
        pass &= p[0] < prev_peaks[0] && p[1] > prev_peaks[1];
        pass &= m[0] < prev_modes[0] && m[1] > prev_modes[1];
        prev_peaks = p;
        prev_modes = m;
        detail.push(format!("λ/λ₀={k}: ω₋ {:.4}/{:.4}, ω₊ {:.4}/{:.4}", p[0], m[0], p[1], m[1]));
    }
    Ok((pass, format!("peak/mode: {} (tolerance 3γ = {:.2})", detail.join("; "), 3.0 * gamma)))
}

fn strong_coupling() -> Result<(bool, String)> {
    let peaks = spectrum_peaks(&spectrum_study(1.0, 100.0), 0.01, 29.0, 1e-3)?;
    let Some(top) = peaks.first() else {
        return Ok((false, "no peak found".into()));
    };
    // (λ/√(m₁m₂))^{1/2} = 10 ω₀₁ for λ = 100 λ₀ and equal masses
    let expected = 10.0;
    let dev = (top.frequency - expected).abs() / expected;
    Ok((dev <= 0.05, format!("dominant peak at {:.4} ω₀₁, expected {expected} (deviation {:.2}%)", top.frequency, 100.0 * dev)))
}

fn coupling_sweep(t1: f64, t2: f64, axis: &[f64]) -> Result<SweepTable> {
    sweep_coupling(&coupling_study(t1, t2), axis, &QuadratureOptions::default(), Execution::Parallel)
}

fn jump_at_critical_coupling() -> Result<(bool, String)> {
    let axis = linspace(0.5, 1.5, 200);
    let table = coupling_sweep(300.0, 1000.0, &axis)?;
    let (i, best) = table
        .rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.report.normalized_u_int.abs().total_cmp(&b.1.report.normalized_u_int.abs()))
        .expect("non-empty sweep");
    let crit = critical_coupling(&table.base) / table.base.reference_coupling();
    let at = axis[i];
    let pass = table.converged() && (at - 1.0).abs() <= 0.02 && (at - crit).abs() <= 0.02;
    Ok((
        pass,
        format!(
            "max |normalized u_int| = {:.4} at λ/λ₀ = {at:.4}; λ_crit/λ₀ = {crit:.4}; all rows converged: {}",
            best.report.normalized_u_int.abs(),
            table.converged()
        ),
    ))
}

/// True when the normalized interaction energy changes direction by more than
/// the combined error estimates somewhere inside the sweep.
fn has_interior_extremum(table: &SweepTable) -> (bool, Option<f64>) {
    let rows = &table.rows;
    let mut rising = false;
    let mut falling = false;
    let mut turn = None;
    for w in rows.windows(2) {
        let (a, b) = (&w[0].report, &w[1].report);
        let tol = a.normalized_error + b.normalized_error;
        let d = b.normalized_u_int - a.normalized_u_int;
        if d > tol {
            if falling && turn.is_none() {
                turn = Some(w[0].axis_value);
            }
            rising = true;
        } else if d < -tol {
            if rising && turn.is_none() {
                turn = Some(w[0].axis_value);
            }
            falling = true;
        }
    }
    (rising && falling, turn)
}

fn nonmonotonic_coupling_dependence() -> Result<(bool, String)> {
    let axis = linspace(0.005, 0.9, 180);
    let hot = coupling_sweep(300.0, 1000.0, &axis)?;
    let equal = coupling_sweep(300.0, 300.0, &axis)?;
    let (hot_ext, hot_turn) = has_interior_extremum(&hot);
    let (eq_ext, _) = has_interior_extremum(&equal);
    let n = |t: &SweepTable| {
        let v = t.normalized();
        format!("{:.3e} → {:.3e}", v[0], v[v.len() - 1])
    };
    let pass = hot.converged() && equal.converged() && hot_ext && !eq_ext;
    Ok((
        pass,
        format!(
            "(300, 1000) K: interior extremum {} {}(normalized {}); (300, 300) K: interior extremum {} (normalized {})",
            hot_ext,
            hot_turn.map(|t| format!("at λ/λ₀ = {t:.3} ")).unwrap_or_default(),
            n(&hot),
            eq_ext,
            n(&equal)
        ),
    ))
}

fn coupling_squared_scaling() -> Result<(bool, String)> {
    let opts = QuadratureOptions::default().with_rel_tol(1e-10);
    let mut pass = true;
    let mut detail = Vec::new();
    for (t1, t2) in [(300.0, 1000.0), (0.0, 0.0)] {
        let base = coupling_study(t1, t2);
        let l0 = base.reference_coupling();
        let a = u_int_mean(&base.with_coupling(1e-3 * l0), &opts)?.value;
        let b = u_int_mean(&base.with_coupling(2e-3 * l0), &opts)?.value;
        let ratio = b / a;
        pass &= (ratio - 4.0).abs() <= 0.04;
        detail.push(format!("({t1}, {t2}) K: {ratio:.6}"));
    }
    Ok((pass, format!("u_int(2λ)/u_int(λ) at λ = 1e-3 λ₀: {}", detail.join(", "))))
}

fn random_system(rng: &mut ChaCha8Rng) -> SystemConfig {
    let w2: f64 = rng.random_range(0.4..2.5);
    let m2: f64 = rng.random_range(0.3..3.0);
    let bath = |rng: &mut ChaCha8Rng| {
        let t = rng.random_range(0.0..20.0);
        match rng.random_range(0..3) {
            0 => BathSpec::flat_ohmic(t, rng.random_range(5.0..50.0)),
            1 => BathSpec::debye(t, rng.random_range(5.0..50.0)),
            _ => BathSpec::gauss(t, rng.random_range(0.1..1.0)),
        }
    };
    let bath1 = bath(rng);
    let bath2 = bath(rng);
    SystemConfig {
        units: UnitSystem::Reduced,
        osc1: OscillatorParams::new(1.0, 1.0, rng.random_range(0.005..0.1)),
        osc2: OscillatorParams::new(m2, w2, w2 * rng.random_range(0.005..0.1)),
        bath1,
        bath2,
        coupling: w2 * m2.sqrt() * rng.random_range(0.0..0.95),
    }
}

fn symmetry_suite() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let opts = QuadratureOptions::default();
    let mut swap_failures = 0;
    for _ in 0..50 {
        let sys = random_system(&mut rng);
        let a = energy_report(&sys, &opts)?;
        let b = energy_report(&sys.swapped(), &opts)?;
        let close = |x: EnergyEstimate, y: EnergyEstimate| {
            (x.value - y.value).abs() <= x.error_estimate + y.error_estimate + 4.0 * f64::EPSILON * x.value.abs()
        };
        if !(close(a.u1, b.u2) && close(a.u2, b.u1) && close(a.u_int, b.u_int)) {
            swap_failures += 1;
        }
    }

    let c = PhysicalConstants::REDUCED;
    let mut invariant_failures = [0; 3];
    for _ in 0..10_000 {
        let w: f64 = rng.random_range(1e-3..50.0);
        let t: f64 = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..50.0) };
        let th = theta_in(&c, w, t)?;
        let th_hotter = theta_in(&c, w, t + 1.0)?;
        let theta_ok = th.is_finite() && th >= 0.5 * w * (1.0 - 1e-15) && th >= t * (1.0 - 1e-15) && th_hotter >= th;

        let osc = OscillatorParams::new(1.0, rng.random_range(0.2..3.0), rng.random_range(1e-3..0.2));
        let b = beta(&osc, w);
        let b_neg = beta(&osc, -w);
        let beta_ok = b.im < 0.0 && b_neg == b.conj() && b.re == osc.eigenfrequency.powi(2) - w * w;

        let sys = random_system(&mut rng);
        let d = big_d(&sys, w);
        let d_ok = big_d(&sys, -w) == d.conj() && d.norm_sqr() > 0.0 && d.is_finite();
        for (count, ok) in invariant_failures.iter_mut().zip([theta_ok, beta_ok, d_ok]) {
            *count += usize::from(!ok);
        }
    }
    let elapsed = start.elapsed();
    let pass = swap_failures == 0 && invariant_failures == [0; 3] && elapsed < Duration::from_secs(10);
    Ok((
        pass,
        format!(
            "swap violations {swap_failures}/50; invariant violations in 10000 samples: Θ {}, β {}, D {}; {:.2} s",
            invariant_failures[0],
            invariant_failures[1],
            invariant_failures[2],
            elapsed.as_secs_f64()
        ),
    ))
}

fn command_for(config: &Path) -> Option<&'static str> {
    let text = std::fs::read_to_string(config).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    [
        ("energy", "energy"),
        ("spectrum", "spectrum"),
        ("sweep_coupling", "sweep-coupling"),
        ("sweep_ratio", "sweep-ratio"),
        ("validate_oracle", "validate-oracle"),
    ]
    .into_iter()
    .find(|(block, _)| v.get(block).is_some())
    .map(|(_, cmd)| cmd)
}

fn determinism() -> Result<(bool, String)> {
    let bin = env!("CARGO_BIN_EXE_oscbath");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<_> = std::fs::read_dir(&configs)
        .expect("configs directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    let mut commands = 0;
    for path in &paths {
        let Some(cmd) = command_for(path) else {
            return Ok((false, format!("{} has no command block", path.display())));
        };
        for dir in &dirs {
            let status = Command::new(bin)
                .args([cmd, "--config"])
                .arg(path)
                .arg("--out")
                .arg(dir.path())
                .arg("--svg")
                .output()
                .expect("binary runs")
                .status;
            if !status.success() {
                return Ok((false, format!("{cmd} on {} exited with {status}", path.display())));
            }
        }
        commands += 1;
    }
    let mut files: Vec<_> = std::fs::read_dir(dirs[0].path())
        .expect("output directory")
        .filter_map(|e| e.ok().map(|e| e.file_name()))
        .collect();
    files.sort();
    let mut differing = Vec::new();
    for f in &files {
        let a = std::fs::read(dirs[0].path().join(f)).expect("first run output");
        let b = std::fs::read(dirs[1].path().join(f)).unwrap_or_default();
        if a != b {
            differing.push(f.to_string_lossy().into_owned());
        }
    }
    Ok((
        differing.is_empty() && !files.is_empty(),
        format!(
            "{commands} configs run twice, {} output files compared, differing: {}",
            files.len(),
            if differing.is_empty() { "none".into() } else { differing.join(", ") }
        ),
    ))
}

fn main() -> ExitCode {
    let checks = [
        check(1, "equilibrium limit", equilibrium_limit()),
        check(2, "reduction identity", reduction_identity()),
        check(3, "discrete/continuum oracle", oracle_equivalence()),
        check(4, "spectral peak positions", figure1_peaks()),
        check(5, "mode-shift law", mode_shift_law()),
        check(6, "strong coupling peak", strong_coupling()),
        check(7, "jump at critical coupling", jump_at_critical_coupling()),
        check(8, "non-monotonic coupling dependence", nonmonotonic_coupling_dependence()),
        check(9, "coupling-squared scaling", coupling_squared_scaling()),
        check(10, "symmetry suite", symmetry_suite()),
        check(11, "CLI determinism", determinism()),
    ];
    for c in &checks {
        println!("{} {:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
