//! Polarization tensor of a gapped graphene sheet in the Dirac model,
//! in the dimensionless normalization Π̃ = (2a/ħ)Π.
//!
//! At nonzero Matsubara frequencies the zero-temperature tensor is used
//! with the discrete ζ_l substituted; only the ζ = 0 term carries the
//! explicit temperature dependence through τ.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{CasimirError, Result};
use crate::quadrature::gauss_legendre_escalating;
use crate::reflection::SpectralPoint;
use crate::units;

/// Soft upper bound on the mass gap, eV.
pub const GAP_SOFT_LIMIT: f64 = 0.1;

/// Relative target for the ζ = 0 x-integrals.
const X_INTEGRAL_TOL: f64 = 1e-11;

/// A graphene sheet: mass gap Δ (eV) and v_F/c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrapheneSheet {
    pub delta: f64,
    pub v_f_ratio: f64,
}

impl Default for GrapheneSheet {
    fn default() -> Self {
        Self::pristine()
    }
}

impl GrapheneSheet {
    pub fn new(delta: f64, v_f_ratio: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(CasimirError::Config(format!(
                "gap must be >= 0 eV, got {delta}"
            )));
        }
        if !(v_f_ratio > 0.0 && v_f_ratio < 1.0) {
            return Err(CasimirError::Config(format!(
                "Fermi velocity ratio must lie in (0, 1), got {v_f_ratio}"
            )));
        }
        Ok(Self { delta, v_f_ratio })
    }

    /// Gapless graphene with v_F = 9×10⁵ m/s.
    pub fn pristine() -> Self {
        Self {
            delta: 0.0,
            v_f_ratio: units::FERMI_VELOCITY / units::C_LIGHT,
        }
    }

    pub fn with_gap(self, delta: f64) -> Result<Self> {
        Self::new(delta, self.v_f_ratio)
    }

    /// Warning text when the gap is at or above the physically allowed range.
    pub fn gap_warning(&self) -> Option<String> {
        (self.delta >= GAP_SOFT_LIMIT).then(|| {
            format!(
                "graphene gap {} eV is outside the expected range Δ < {GAP_SOFT_LIMIT} eV",
                self.delta
            )
        })
    }
}

/// Π̃₀₀ and the TE combination Π̃_tr − y²Π̃₀₀/(y² − ζ²) (Π̃_tr − Π̃₀₀ at ζ = 0).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationComponents {
    pub pi00: f64,
    pub pi_combo: f64,
}

/// Dimensionless parameters at a given separation and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessContext {
    pub tau: f64,
    pub delta_tilde: f64,
    pub separation: f64,
    pub temperature: f64,
    /// Coupling constant; the fine-structure constant except in tests.
    pub alpha: f64,
}

impl DimensionlessContext {
    /// τ = 4πak_BT/(ħc) and Δ̃ = 2aΔ/(ħc) for gap `delta` in eV.
    pub fn new(separation: f64, temperature: f64, delta: f64) -> Result<Self> {
        if !(separation > 0.0 && separation.is_finite()) {
            return Err(CasimirError::Config(format!(
                "separation must be > 0 m, got {separation}"
            )));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(CasimirError::Config(format!(
                "temperature must be >= 0 K, got {temperature}"
            )));
        }
        Ok(Self {
            tau: units::tau(separation, temperature),
            delta_tilde: units::ev_to_dimensionless(delta, separation),
            separation,
            temperature,
            alpha: units::ALPHA,
        })
    }

    pub fn for_sheet(separation: f64, temperature: f64, sheet: &GrapheneSheet) -> Result<Self> {
        Self::new(separation, temperature, sheet.delta)
    }
}

/// f = [ṽ_F² y² + (1 − ṽ_F²) ζ²]^{1/2}.
pub fn f_func(zeta: f64, y: f64, v_f_ratio: f64) -> f64 {
    let v2 = v_f_ratio * v_f_ratio;
    (v2 * y * y + (1.0 - v2) * zeta * zeta).sqrt()
}

/// Φ = 4Δ̃ + 2f[1 − 4Δ̃²/f²] arctan(f/(2Δ̃)).
pub fn phi_func(zeta: f64, y: f64, delta_tilde: f64, v_f_ratio: f64) -> Result<f64> {
    phi_from_f(f_func(zeta, y, v_f_ratio), delta_tilde)
}

fn phi_from_f(f: f64, delta_tilde: f64) -> Result<f64> {
    if f == 0.0 && delta_tilde == 0.0 {
        return Err(CasimirError::DegeneratePoint);
    }
    if delta_tilde < 1e-12 * f {
        return Ok(PI * f);
    }
    // Φ = 4Δ̃ [1 + (u − 1/u) arctan u] with u = f/(2Δ̃)
    let u = f / (2.0 * delta_tilde);
    let g = if u < 0.1 {
        // Σ_{m≥1} (−1)^{m−1} 4m u^{2m} / (4m² − 1)
        let u2 = u * u;
        let mut term = u2;
        let mut sum = 0.0;
        for m in 1..=12 {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * 4.0 * mf * term / (4.0 * mf * mf - 1.0);
            term *= u2;
        }
        sum
    } else {
        1.0 + (u - 1.0 / u) * u.atan()
    };
    Ok(4.0 * delta_tilde * g)
}

/// Components at a nonzero frequency ζ > 0, from the T = 0 tensor.
pub fn polarization_nonzero(
    point: SpectralPoint,
    ctx: &DimensionlessContext,
    sheet: &GrapheneSheet,
) -> Result<PolarizationComponents> {
    let (zeta, y) = (point.zeta, point.y);
    if !(zeta > 0.0) {
        return Err(CasimirError::domain(
            "polarization_nonzero",
            "zeta = 0 requires polarization_zero",
        ));
    }
    let f = f_func(zeta, y, sheet.v_f_ratio);
    let phi = phi_from_f(f, ctx.delta_tilde)?;
    let combo = ctx.alpha * phi;
    Ok(PolarizationComponents {
        pi00: combo * (y - zeta) * (y + zeta) / (f * f),
        pi_combo: combo,
    })
}

/// Which part of the symmetric x-range the ζ = 0 integrals cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XRange {
    /// [0, 1/2], doubled (θ(x) = θ(1 − x)).
    Folded,
    /// The full [0, 1].
    Full,
}

/// The two x-integrals entering the ζ = 0 tensor:
/// `pi00_bracket` = (τ/π)∫ln(2cosh(πθ/τ))dx − Δ̃²∫tanh(πθ/τ)/θ dx and
/// `combo_integral` = ∫x(1−x)tanh(πθ/τ)/θ dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XIntegrals {
    pub pi00_bracket: f64,
    pub combo_integral: f64,
}

/// Evaluates the ζ = 0 x-integrals with x = (1 − cos φ)/2, which makes
/// every integrand analytic in φ, and with the bracket rearranged as
///
/// x(1−x)ṽ²y²/θ + (τ/π)ln(1 + e^{−2πθ/τ}) + 2Δ̃²/[θ(e^{2πθ/τ} + 1)]
///
/// so that no two large terms cancel.
pub fn x_integrals(
    y: f64,
    tau: f64,
    delta_tilde: f64,
    v_f_ratio: f64,
    range: XRange,
) -> Result<XIntegrals> {
    if !(tau > 0.0) {
        return Err(CasimirError::domain(
            "polarization_zero",
            format!("tau = {tau}"),
        ));
    }
    let s = PI / tau;
    let vy = v_f_ratio * y;
    let d2 = delta_tilde * delta_tilde;
    let (upper, factor) = match range {
        XRange::Folded => (FRAC_PI_2, 2.0),
        XRange::Full => (PI, 1.0),
    };
    // pieces as functions of φ, including the Jacobian dx = sin φ/2 dφ
    let pieces = |phi: f64| -> (f64, f64) {
        let sin = phi.sin();
        let xx = 0.25 * sin * sin;
        let theta = (d2 + xx * vy * vy).sqrt();
        let jac = 0.5 * sin;
        if theta == 0.0 {
            return (jac * ((2f64).ln() / s), jac * xx * s);
        }
        let z = s * theta;
        let e = (-2.0 * z).exp();
        let tanh_over_theta = if z < 1e-8 {
            s
        } else {
            -(-2.0 * z).exp_m1() / ((1.0 + e) * theta)
        };
        let bracket = xx * vy * vy / theta + e.ln_1p() / s + 2.0 * d2 * e / ((1.0 + e) * theta);
        (jac * bracket, jac * xx * tanh_over_theta)
    };
    let first = gauss_legendre_escalating(0.0, upper, X_INTEGRAL_TOL, 0.0, |p| pieces(p).0)?;
    let second = gauss_legendre_escalating(0.0, upper, X_INTEGRAL_TOL, 0.0, |p| pieces(p).1)?;
    Ok(XIntegrals {
        pi00_bracket: factor * first.value,
        combo_integral: factor * second.value,
    })
}

/// Components at ζ = 0 with the explicit temperature dependence.
pub fn polarization_zero(
    y: f64,
    ctx: &DimensionlessContext,
    sheet: &GrapheneSheet,
) -> Result<PolarizationComponents> {
    if !(y >= 0.0) {
        return Err(CasimirError::domain(
            "polarization_zero",
            format!("y = {y}"),
        ));
    }
    let v = sheet.v_f_ratio;
    let xi = x_integrals(y, ctx.tau, ctx.delta_tilde, v, XRange::Folded)?;
    Ok(PolarizationComponents {
        pi00: 8.0 * ctx.alpha / (v * v) * xi.pi00_bracket,
        pi_combo: 8.0 * ctx.alpha * v * v * y * y * xi.combo_integral,
    })
}
