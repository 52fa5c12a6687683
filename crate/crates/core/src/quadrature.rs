//! Numerical integration rules used throughout the engine.
//!
//! * Gauss–Legendre rules of order 2^k, cached, for smooth finite integrals
//!   with order escalation ([`gauss_legendre_escalating`]).
//! * Adaptive Gauss–Kronrod (7, 15) with global bisection of the worst
//!   interval ([`adaptive_gk15`]). The rule is open: endpoints are never
//!   evaluated.
//! * Semi-infinite integrals on geometrically growing panels
//!   ([`semi_infinite`]), each panel handled by the adaptive rule.

use std::sync::OnceLock;

use crate::error::{CasimirError, Result};

/// Nodes and weights of a Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the n-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const CACHED_LEVELS: usize = 9;
static GL_CACHE: [OnceLock<GaussLegendre>; CACHED_LEVELS] =
    [const { OnceLock::new() }; CACHED_LEVELS];

/// Cached rule of order 8·2^level (8, 16, …, 2048).
pub fn gauss_legendre_level(level: usize) -> &'static GaussLegendre {
    assert!(
        level < CACHED_LEVELS,
        "Gauss-Legendre level {level} not cached"
    );
    GL_CACHE[level].get_or_init(|| GaussLegendre::new(8 << level))
}

/// Integrates a smooth `f` over [a, b], doubling the Gauss–Legendre order
/// from 16 until two successive orders agree to `rel_tol` (or `abs_tol`).
pub fn gauss_legendre_escalating<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    mut f: F,
) -> Result<QuadResult> {
    let mut prev = gauss_legendre_level(1).integrate(a, b, &mut f);
    let mut evals = 16;
    for level in 2..CACHED_LEVELS {
        let rule = gauss_legendre_level(level);
        let next = rule.integrate(a, b, &mut f);
        evals += rule.nodes.len();
        let diff = (next - prev).abs();
        if diff <= abs_tol.max(rel_tol * next.abs()) {
            return Ok(QuadResult {
                value: next,
                error: diff,
                evaluations: evals,
            });
        }
        prev = next;
    }
    Err(CasimirError::Integration {
        value: prev,
        error: f64::NAN,
    })
}

/// Value, error estimate and evaluation count of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> Result<f64>>(a: f64, b: f64, f: &mut F) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(CasimirError::Integration {
            value,
            error: f64::INFINITY,
        });
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive Gauss–Kronrod (7, 15) on [a, b] with global error control:
/// the interval with the largest error is bisected until the summed error
/// drops below `max(abs_tol, rel_tol·|I|)` or `max_segments` is reached.
pub fn adaptive_gk15<F: FnMut(f64) -> Result<f64>>(
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
    mut f: F,
) -> Result<QuadResult> {
    let first = gk15(a, b, &mut f)?;
    let mut segments = vec![first];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= max_segments {
            return Err(CasimirError::Integration { value, error });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at machine resolution
            return Err(CasimirError::Integration { value, error });
        }
        segments.push(gk15(s.a, mid, &mut f)?);
        segments.push(gk15(mid, s.b, &mut f)?);
        evaluations += 30;
    }
}

/// Descriptor of the semi-infinite open rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteRule {
    /// Width of the first panel; panel k spans [w·2^(k-1), w·2^k].
    pub first_panel: f64,
    /// Subdivision budget per panel.
    pub max_segments: usize,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for SemiInfiniteRule {
    fn default() -> Self {
        Self {
            first_panel: 0.5,
            max_segments: 200,
            max_panels: 64,
        }
    }
}

/// Integrates `f` over (0, ∞) for integrands with exponential decay on a
/// unit scale. Panels grow geometrically; integration stops after two
/// consecutive panels contribute less than the requested tolerance.
pub fn semi_infinite<F: FnMut(f64) -> Result<f64>>(
    rule: &SemiInfiniteRule,
    rel_tol: f64,
    abs_tol: f64,
    mut f: F,
) -> Result<QuadResult> {
    let mut total = 0.0f64;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut lo = 0.0;
    let mut hi = rule.first_panel;
    let mut quiet = 0;
    for panel in 0..rule.max_panels {
        let tol_abs = if panel == 0 {
            abs_tol
        } else {
            abs_tol.max(0.25 * rel_tol * total.abs())
        };
        let r = adaptive_gk15(lo, hi, rel_tol, tol_abs, rule.max_segments, &mut f)?;
        total += r.value;
        error += r.error;
        evaluations += r.evaluations;
        if panel > 0 && r.value.abs() <= abs_tol.max(0.1 * rel_tol * total.abs()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(QuadResult {
                    value: total,
                    error: error + r.value.abs(),
                    evaluations,
                });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(CasimirError::Integration {
        value: total,
        error,
    })
}
