//! Kramers–Kronig transform of tabulated absorption to the imaginary axis:
//!
//! ε(iξ) = 1 + (2/π) ∫₀^∞ ω Im ε(ω) / (ω² + ξ²) dω
//!
//! The table is integrated segment by segment with log-log interpolation of
//! Im ε (linear where a node is zero). Below the table a free-carrier
//! continuation may be attached; above it Im ε falls off as ω⁻³.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{eps_plasma, Extrapolation, FreeCarriers};
use crate::error::{CasimirError, Result};
use crate::quadrature::gauss_legendre_level;

/// Tabulated imaginary part of the permittivity.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    energies: Vec<f64>,
    im_eps: Vec<f64>,
    pub provenance_label: String,
    pub warnings: Vec<String>,
}

impl OpticalTable {
    pub fn new(rows: Vec<(f64, f64)>, provenance_label: impl Into<String>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(CasimirError::Config(
                "optical table needs at least 2 rows".into(),
            ));
        }
        for (i, &(e, im)) in rows.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(CasimirError::Config(format!(
                    "optical table row {i}: energy must be > 0, got {e}"
                )));
            }
            if !(im >= 0.0 && im.is_finite()) {
                return Err(CasimirError::Config(format!(
                    "optical table row {i}: Im eps must be >= 0, got {im}"
                )));
            }
            if i > 0 && e <= rows[i - 1].0 {
                return Err(CasimirError::Config(format!(
                    "optical table row {i}: energies must be strictly increasing"
                )));
            }
        }
        let (energies, im_eps): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        let mut warnings = Vec::new();
        let span = energies[energies.len() - 1] / energies[0];
        if span < 10.0 {
            warnings.push(format!(
                "table spans less than one decade ({:.3} to {:.3} eV)",
                energies[0],
                energies[energies.len() - 1]
            ));
        }
        Ok(Self {
            energies,
            im_eps,
            provenance_label: provenance_label.into(),
            warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (self.energies[0], self.energies[self.energies.len() - 1])
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies
            .iter()
            .copied()
            .zip(self.im_eps.iter().copied())
    }

    /// Static permittivity of an insulating table (no free carriers).
    pub fn static_eps(&self) -> f64 {
        1.0 + (2.0 / PI) * (self.table_integral(0.0, None) + self.high_tail(0.0, None))
    }

    /// ∫ ω g(ω)/(ω²+ξ²) dω over the tabulated range, where g is Im ε minus
    /// the optional Drude absorption `strip`, clamped at zero.
    fn table_integral(&self, xi: f64, strip: Option<&FreeCarriers>) -> f64 {
        let rule = gauss_legendre_level(0);
        let xi2 = xi * xi;
        let absorption = |w: f64, v: f64| match strip {
            Some(c) => (v - drude_im_eps(w, c.omega_p, c.gamma)).max(0.0),
            None => v,
        };
        self.energies
            .windows(2)
            .zip(self.im_eps.windows(2))
            .map(|(e, v)| {
                let (w0, w1) = (e[0], e[1]);
                let (v0, v1) = (v[0], v[1]);
                if v0 > 0.0 && v1 > 0.0 {
                    // log-log: Im ε = v0 (ω/w0)^p, integrate in u = ln ω
                    let (u0, u1) = (w0.ln(), w1.ln());
                    let p = (v1 / v0).ln() / (u1 - u0);
                    rule.integrate(u0, u1, |u| {
                        let w = u.exp();
                        let val = v0 * ((u - u0) * p).exp();
                        w * w * absorption(w, val) / (w * w + xi2)
                    })
                } else {
                    rule.integrate(w0, w1, |w| {
                        let val = v0 + (v1 - v0) * (w - w0) / (w1 - w0);
                        w * absorption(w, val) / (w * w + xi2)
                    })
                }
            })
            .sum()
    }

    /// ∫_{ω_max}^∞ ω · v_max (ω_max/ω)³ / (ω² + ξ²) dω.
    fn high_tail(&self, xi: f64, strip: Option<&FreeCarriers>) -> f64 {
        let (_, w) = self.energy_range();
        let mut v = self.im_eps[self.im_eps.len() - 1];
        if let Some(c) = strip {
            v = (v - drude_im_eps(w, c.omega_p, c.gamma)).max(0.0);
        }
        let ratio = xi / w;
        // v w³ [1/w - atan(ξ/w)/ξ] / ξ², expanded for small ξ/w
        let bracket = if ratio < 1e-3 {
            let r2 = ratio * ratio;
            (1.0 / 3.0 - r2 / 5.0 + r2 * r2 / 7.0) / w.powi(3)
        } else {
            (1.0 / w - ratio.atan() / xi) / (xi * xi)
        };
        v * w.powi(3) * bracket
    }
}

/// Drude absorption Im ε(ω) = ω_p² γ / [ω(ω² + γ²)].
fn drude_im_eps(w: f64, omega_p: f64, gamma: f64) -> f64 {
    omega_p * omega_p * gamma / (w * (w * w + gamma * gamma))
}

/// ∫₀^W ω Im ε_Drude(ω)/(ω² + ξ²) dω in closed form.
fn drude_low_tail(xi: f64, w: f64, omega_p: f64, gamma: f64) -> f64 {
    let wp2 = omega_p * omega_p;
    if gamma == 0.0 {
        // absorption collapses onto ω = 0; its full weight is π ω_p²/(2ξ²)
        return FRAC_PI_2 * wp2 / (xi * xi);
    }
    let g2 = gamma * gamma;
    let x2 = xi * xi;
    if (x2 - g2).abs() < 1e-6 * x2 {
        // ∫₀^W dω/(ω²+γ²)²
        let i = w / (2.0 * g2 * (w * w + g2)) + (w / gamma).atan() / (2.0 * g2 * gamma);
        return wp2 * gamma * i;
    }
    wp2 * gamma * ((w / gamma).atan() / gamma - (w / xi).atan() / xi) / (x2 - g2)
}

/// ε(iξ) from a table via the Kramers–Kronig relation.
///
/// With a Drude continuation the Drude absorption below the first node is
/// added analytically. With a plasma continuation the relaxation absorption
/// is removed from the table and replaced by ω_p²/ξ².
pub fn eps_tabulated(
    xi: f64,
    table: &OpticalTable,
    extension: Option<&FreeCarriers>,
) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(CasimirError::domain("eps_tabulated", format!("xi = {xi}")));
    }
    let (w_min, _) = table.energy_range();
    let integral = match extension {
        None => table.table_integral(xi, None) + table.high_tail(xi, None),
        Some(c) if c.kind == Extrapolation::Drude => {
            table.table_integral(xi, None)
                + table.high_tail(xi, None)
                + drude_low_tail(xi, w_min, c.omega_p, c.gamma)
        }
        Some(c) => {
            let free = eps_plasma(xi, c.omega_p)? - 1.0;
            return Ok(1.0
                + free
                + (2.0 / PI) * (table.table_integral(xi, Some(c)) + table.high_tail(xi, Some(c))));
        }
    };
    Ok(1.0 + (2.0 / PI) * integral)
}
