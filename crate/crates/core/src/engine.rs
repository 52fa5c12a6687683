//! Casimir pressure between two plate stacks: the Matsubara sum at T > 0 and
//! the continuous-frequency double integral at T = 0.
//!
//! Dimensionless variables: ζ = 2aξ/c, y = 2a·q, τ = 4πak_BT/(ħc), ζ_l = τl.

use rayon::prelude::*;

use crate::error::{CasimirError, Result};
use crate::graphene::DimensionlessContext;
use crate::quadrature::{semi_infinite, SemiInfiniteRule};
use crate::reflection::{PlateStack, StackAtFrequency, TensorPolicy};
use crate::units;

/// Two plate stacks across a vacuum gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Gap width in meters.
    pub separation: f64,
    /// Kelvin; 0 selects the continuous-frequency path.
    pub temperature: f64,
    pub side1: PlateStack,
    pub side2: PlateStack,
}

impl Scenario {
    pub fn new(separation: f64, temperature: f64, side1: PlateStack, side2: PlateStack) -> Self {
        Self {
            separation,
            temperature,
            side1,
            side2,
        }
    }

    /// Both sides the same stack.
    pub fn symmetric(separation: f64, temperature: f64, side: PlateStack) -> Self {
        Self::new(separation, temperature, side.clone(), side)
    }

    pub fn validate(&self) -> Result<()> {
        self.context()?;
        self.side1.validate()?;
        self.side2.validate()
    }

    fn context(&self) -> Result<DimensionlessContext> {
        DimensionlessContext::new(self.separation, self.temperature, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target relative accuracy of the pressure.
    pub rel_tol: f64,
    /// Absolute floor in Pa, useful when the pressure vanishes.
    pub abs_tol: f64,
    pub max_matsubara: usize,
    /// Rule for the y-integral of each frequency.
    pub y_rule: SemiInfiniteRule,
    /// Rule for the outer frequency integral at T = 0.
    pub zeta_rule: SemiInfiniteRule,
    /// Keep every Matsubara term in the result.
    pub trace: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-300,
            max_matsubara: 1_000_000,
            y_rule: SemiInfiniteRule::default(),
            zeta_rule: SemiInfiniteRule::default(),
            trace: false,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CasimirError::Config(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(CasimirError::Config(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_matsubara == 0 {
            return Err(CasimirError::Config("max_matsubara must be >= 1".into()));
        }
        Ok(())
    }

    /// Tolerance handed to each inner integral.
    fn inner_rel_tol(&self) -> f64 {
        (0.01 * self.rel_tol).max(1e-13)
    }
}

/// One Matsubara contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraTerm {
    pub l: usize,
    pub zeta: f64,
    /// Contribution to the pressure in Pa, weight included.
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureResult {
    /// Pa; negative means attraction.
    pub pressure: f64,
    /// 0 on the continuous-frequency path.
    pub matsubara_terms_used: usize,
    /// Pa, always ≥ 0.
    pub estimated_error: f64,
    pub per_term_trace: Option<Vec<MatsubaraTerm>>,
}

/// y²·Σ_pol r₁r₂/(e^y − r₁r₂) at one (ζ, y).
pub fn integrand(y: f64, side1: &StackAtFrequency, side2: &StackAtFrequency) -> Result<f64> {
    let r1 = side1.reflect(y)?;
    let r2 = side2.reflect(y)?;
    let decay = (-y).exp();
    let mut sum = 0.0;
    for prod in [r1.r_tm * r2.r_tm, r1.r_te * r2.r_te] {
        if prod == 0.0 {
            continue;
        }
        let denom = 1.0 - prod * decay;
        if !(denom > 0.0) {
            return Err(CasimirError::ModeSingularity {
                zeta: side1.zeta(),
                y,
            });
        }
        sum += prod * decay / denom;
    }
    Ok(y * y * sum)
}

/// ∫_ζ^∞ integrand dy at one frequency, evaluated as ∫_0^∞ dt with y = ζ + t.
fn frequency_integral(
    scenario: &Scenario,
    ctx: &DimensionlessContext,
    zeta: f64,
    policy: TensorPolicy,
    rule: &SemiInfiniteRule,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if scenario.side1.is_vacuum() || scenario.side2.is_vacuum() {
        return Ok((0.0, 0.0));
    }
    let s1 = StackAtFrequency::new(&scenario.side1, zeta, ctx, policy)?;
    let s2 = StackAtFrequency::new(&scenario.side2, zeta, ctx, policy)?;
    let r = semi_infinite(rule, rel_tol, f64::MIN_POSITIVE, |t| {
        integrand(zeta + t, &s1, &s2)
    })?;
    Ok((r.value, r.error))
}

/// −k_BT/(8πa³): converts a weighted dimensionless term into Pa.
fn matsubara_prefactor(ctx: &DimensionlessContext) -> f64 {
    -units::K_B * ctx.temperature / (8.0 * std::f64::consts::PI * ctx.separation.powi(3))
}

/// Pa-valued term and its quadrature error.
fn term_with_error(
    l: usize,
    scenario: &Scenario,
    ctx: &DimensionlessContext,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let zeta = ctx.tau * l as f64;
    let weight = if l == 0 { 0.5 } else { 1.0 };
    let (value, error) = frequency_integral(
        scenario,
        ctx,
        zeta,
        TensorPolicy::Matsubara,
        &cfg.y_rule,
        cfg.inner_rel_tol(),
    )?;
    let pre = matsubara_prefactor(ctx) * weight;
    Ok((pre * value, pre.abs() * error))
}

/// The l-th weighted Matsubara term in Pa (the l = 0 term carries weight ½).
pub fn matsubara_term(l: usize, scenario: &Scenario, cfg: &QuadratureConfig) -> Result<f64> {
    scenario.validate()?;
    if scenario.temperature == 0.0 {
        return Err(CasimirError::domain(
            "matsubara_term",
            "Matsubara terms need T > 0",
        ));
    }
    if l > cfg.max_matsubara {
        return Err(CasimirError::domain(
            "matsubara_term",
            format!("l = {l} exceeds max_matsubara = {}", cfg.max_matsubara),
        ));
    }
    let ctx = scenario.context()?;
    term_with_error(l, scenario, &ctx, cfg).map(|(v, _)| v)
}

/// Geometric tail Σ_{m>l} t_m estimated from the last two terms.
fn tail_estimate(prev: f64, last: f64) -> f64 {
    if last == 0.0 {
        return 0.0;
    }
    let q = last / prev;
    if !(q > 0.0 && q < 1.0) {
        return f64::INFINITY;
    }
    (last * q / (1.0 - q)).abs()
}

/// Pressure at the scenario's temperature; T = 0 dispatches to [`pressure_t0`].
///
/// Terms are summed in order until three consecutive terms each leave a
/// geometric tail below `rel_tol·|sum|`; that tail goes into the error.
/// Terms are evaluated in parallel chunks and reduced in order, so the
/// truncation point does not depend on scheduling.
pub fn pressure(scenario: &Scenario, cfg: &QuadratureConfig) -> Result<PressureResult> {
    scenario.validate()?;
    cfg.validate()?;
    if scenario.temperature == 0.0 {
        return pressure_t0(scenario, cfg);
    }
    let ctx = scenario.context()?;
    let mut sum = 0.0;
    let mut quad_error = 0.0;
    let mut quiet = 0;
    let mut prev = f64::NAN;
    let mut trace = cfg.trace.then(Vec::new);
    let mut next = 0usize;
    let mut chunk = 32usize;
    let limit = cfg.max_matsubara;

    while next <= limit {
        let end = (next + chunk).min(limit + 1);
        let terms: Vec<Result<(f64, f64)>> = (next..end)
            .into_par_iter()
            .map(|l| term_with_error(l, scenario, &ctx, cfg))
            .collect();
        for (offset, term) in terms.into_iter().enumerate() {
            let l = next + offset;
            let (value, error) = term?;
            sum += value;
            quad_error += error;
            if let Some(t) = trace.as_mut() {
                t.push(MatsubaraTerm {
                    l,
                    zeta: ctx.tau * l as f64,
                    pressure: value,
                });
            }
            let tail = if l == 0 {
                f64::INFINITY
            } else {
                tail_estimate(prev, value)
            };
            prev = value;
            if tail <= cfg.abs_tol.max(cfg.rel_tol * sum.abs()) {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 3 {
                return Ok(PressureResult {
                    pressure: sum,
                    matsubara_terms_used: l + 1,
                    estimated_error: quad_error + tail,
                    per_term_trace: trace,
                });
            }
        }
        next = end;
        chunk = (chunk * 2).min(4096);
    }
    Err(CasimirError::Convergence {
        terms: limit + 1,
        partial: sum,
        last_term: prev,
    })
}

/// −ħc/(32π²a⁴): converts the dimensionless double integral into Pa.
fn continuous_prefactor(separation: f64) -> f64 {
    -units::HBAR_C / (32.0 * std::f64::consts::PI.powi(2) * separation.powi(4))
}

/// Zero-temperature pressure: k_BT Σ'_l is replaced by (ħc/4πa)∫dζ and the
/// graphene response is the T = 0 tensor at every ζ > 0.
pub fn pressure_t0(scenario: &Scenario, cfg: &QuadratureConfig) -> Result<PressureResult> {
    let zero = Scenario {
        temperature: 0.0,
        ..scenario.clone()
    };
    zero.validate()?;
    cfg.validate()?;
    let ctx = zero.context()?;
    let inner_tol = cfg.inner_rel_tol();
    let mut inner_error = 0.0f64;
    let outer = semi_infinite(
        &cfg.zeta_rule,
        0.1 * cfg.rel_tol,
        f64::MIN_POSITIVE,
        |zeta| {
            let (v, e) = frequency_integral(
                &zero,
                &ctx,
                zeta,
                TensorPolicy::ZeroTemperature,
                &cfg.y_rule,
                inner_tol,
            )?;
            inner_error = inner_error.max(e);
            Ok(v)
        },
    )?;
    let pre = continuous_prefactor(zero.separation);
    Ok(PressureResult {
        pressure: pre * outer.value,
        matsubara_terms_used: 0,
        estimated_error: pre.abs() * (outer.error + inner_error),
        per_term_trace: None,
    })
}
