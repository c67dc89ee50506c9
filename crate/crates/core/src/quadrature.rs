//! Adaptive Gauss–Kronrod integration with caller-supplied breakpoints.
//!
//! The domain is cut at every breakpoint, each piece gets a 10/21-point
//! Gauss–Kronrod estimate, and the panel with the largest error estimate is
//! bisected until the summed error meets the tolerance. A semi-infinite upper
//! limit is handled by mapping the last piece onto `[0, 1)` with
//! `ω = c + t/(1 − t)`.

// The Kronrod tables below are quoted at their published precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::analysis::normal_modes;
use crate::error::{Error, Result};
use crate::model::SystemConfig;

// 21-point Kronrod abscissae on [-1, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub(crate) fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// An integrand over `[lower, upper]`; `upper` may be `+∞`.
pub struct IntegrandSpec<F> {
    pub integrand: F,
    pub lower: f64,
    pub upper: f64,
    pub breakpoints: Vec<f64>,
    pub options: QuadratureOptions,
}

impl<F: Fn(f64) -> f64> IntegrandSpec<F> {
    pub fn new(integrand: F, lower: f64, upper: f64) -> Self {
        Self {
            integrand,
            lower,
            upper,
            breakpoints: Vec::new(),
            options: QuadratureOptions::default(),
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints = breakpoints.into_iter().collect();
        self
    }

    pub fn with_options(mut self, options: QuadratureOptions) -> Self {
        self.options = options;
        self
    }

    /// Breakpoints strictly inside the domain, sorted and deduplicated.
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&p| p > self.lower && p < self.upper && p.is_finite())
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Panel lives in the `t` coordinate of a mapped semi-infinite tail.
    mapped: bool,
    /// Insertion sequence, used to break ties deterministically.
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Evaluator<'a, F> {
    f: &'a F,
    tail_start: f64,
    evaluations: usize,
}

impl<F: Fn(f64) -> f64> Evaluator<'_, F> {
    #[inline]
    fn eval(&mut self, x: f64, mapped: bool) -> f64 {
        self.evaluations += 1;
        if mapped {
            let s = 1.0 - x;
            (self.f)(self.tail_start + x / s) / (s * s)
        } else {
            (self.f)(x)
        }
    }

    /// Kronrod value and rescaled error estimate on `[a, b]`.
    fn gauss_kronrod(&mut self, a: f64, b: f64, mapped: bool) -> (f64, f64) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let f_center = self.eval(center, mapped);
        let mut res_g = 0.0;
        let mut res_k = WGK[10] * f_center;
        let mut res_abs = res_k.abs();
        let mut fv1 = [0.0; 10];
        let mut fv2 = [0.0; 10];
        for j in 0..10 {
            let dx = half * XGK[j];
            let f1 = self.eval(center - dx, mapped);
            let f2 = self.eval(center + dx, mapped);
            fv1[j] = f1;
            fv2[j] = f2;
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[10] * (f_center - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
        }
        let scale = half.abs();
        let value = res_k * half;
        res_abs *= scale;
        res_asc *= scale;
        let mut err = ((res_k - res_g) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs);
        }
        (value, err)
    }
}

/// Integrates `spec.integrand` adaptively. A non-converged result is still
/// returned (with `converged = false`) when the subdivision budget runs out
/// or panels shrink to machine resolution.
pub fn integrate<F: Fn(f64) -> f64>(spec: &IntegrandSpec<F>) -> Result<IntegrationResult> {
    let (lower, upper) = (spec.lower, spec.upper);
    if !lower.is_finite() || upper.is_nan() || upper <= lower || upper == f64::NEG_INFINITY {
        return Err(Error::InvalidDomain { lower, upper });
    }
    let opts = &spec.options;
    let mut cuts = vec![lower];
    cuts.extend(spec.interior_breakpoints());
    let tail = upper.is_infinite();
    if !tail {
        cuts.push(upper);
    }

    let mut ev = Evaluator {
        f: &spec.integrand,
        tail_start: *cuts.last().unwrap(),
        evaluations: 0,
    };
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut seq = 0;
    let mut push = |heap: &mut BinaryHeap<Panel>, a, b, mapped, ev: &mut Evaluator<F>| {
        let (value, error) = ev.gauss_kronrod(a, b, mapped);
        heap.push(Panel {
            a,
            b,
            value,
            error,
            mapped,
            seq,
        });
        seq += 1;
        (value, error)
    };
    for w in cuts.windows(2) {
        push(&mut heap, w[0], w[1], false, &mut ev);
    }
    if tail {
        push(&mut heap, 0.0, 1.0, true, &mut ev);
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut panels: Vec<&Panel> = heap.iter().chain(frozen.iter()).collect();
        panels.sort_by(|p, q| p.mapped.cmp(&q.mapped).then(p.a.total_cmp(&q.a)));
        panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    // Running sums drive the loop; the ordered sum is recomputed whenever the
    // running totals claim convergence.
    let (mut value, mut error) = totals(&heap, &frozen);
    let mut converged = false;
    loop {
        if error <= opts.tolerance(value) {
            (value, error) = totals(&heap, &frozen);
            if error <= opts.tolerance(value) {
                converged = true;
                break;
            }
        }
        if heap.len() + frozen.len() >= opts.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = push(&mut heap, worst.a, mid, worst.mapped, &mut ev);
        let (v2, e2) = push(&mut heap, mid, worst.b, worst.mapped, &mut ev);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
    }
    let (value, error_estimate) = totals(&heap, &frozen);
    Ok(IntegrationResult {
        value,
        error_estimate,
        evaluations: ev.evaluations,
        converged,
    })
}

/// Resonance frequencies that should seed the panel grid: the real normal
/// modes of the coupled pair plus both bare eigenfrequencies.
pub fn auto_breakpoints(sys: &SystemConfig) -> Vec<f64> {
    let mut pts = normal_modes(sys).real_modes;
    pts.push(sys.osc1.eigenfrequency);
    pts.push(sys.osc2.eigenfrequency);
    pts.sort_by(f64::total_cmp);
    let scale = sys.osc1.eigenfrequency;
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    pts
}
