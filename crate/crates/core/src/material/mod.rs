//! Dielectric permittivity ε(iξ) on the imaginary frequency axis.
//!
//! All photon energies are in eV. Zero frequency is never evaluated through
//! [`MaterialModel::eps`] for conductors; it is classified by
//! [`MaterialModel::zero_frequency`] instead, which the reflection layer
//! turns into the appropriate static limit.

mod kramers_kronig;
mod registry;

pub use kramers_kronig::{eps_tabulated, OpticalTable};
pub use registry::{
    load_material, parse_material, LoadedMaterial, MaterialProvenance, BUILTIN_MATERIALS,
    MATERIAL_PATH_ENV,
};

use std::sync::Arc;

use crate::error::{CasimirError, Result};

/// ε(iξ) = 1 + ω_p² / [ξ(ξ + γ)].
pub fn eps_drude(xi: f64, omega_p: f64, gamma: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(CasimirError::domain(
            "eps_drude",
            format!("xi = {xi}; zero frequency must go through the zero-frequency class"),
        ));
    }
    Ok(1.0 + omega_p * omega_p / (xi * (xi + gamma)))
}

/// ε(iξ) = 1 + ω_p² / ξ².
pub fn eps_plasma(xi: f64, omega_p: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(CasimirError::domain(
            "eps_plasma",
            format!("xi = {xi}; zero frequency must go through the zero-frequency class"),
        ));
    }
    Ok(1.0 + (omega_p / xi).powi(2))
}

/// One Lorentz term C ω_j² / (ω_j² + ξ² + γ_j ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub resonance: f64,
    pub width: f64,
}

/// Ninham–Parsegian oscillator representation of a dielectric.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSet {
    pub eps_infinity: f64,
    pub terms: Vec<Oscillator>,
}

impl OscillatorSet {
    pub fn new(eps_infinity: f64, terms: Vec<Oscillator>) -> Result<Self> {
        if !(eps_infinity >= 1.0) || !eps_infinity.is_finite() {
            return Err(CasimirError::Config(format!(
                "eps_infinity must be >= 1, got {eps_infinity}"
            )));
        }
        for t in &terms {
            if !(t.strength >= 0.0 && t.resonance > 0.0 && t.width >= 0.0)
                || !(t.strength.is_finite() && t.resonance.is_finite() && t.width.is_finite())
            {
                return Err(CasimirError::Config(format!(
                    "invalid oscillator term {t:?}: need C >= 0, omega > 0, gamma >= 0"
                )));
            }
        }
        Ok(Self {
            eps_infinity,
            terms,
        })
    }

    /// Static permittivity ε∞ + Σ C_j.
    pub fn static_eps(&self) -> f64 {
        self.eps_infinity + self.terms.iter().map(|t| t.strength).sum::<f64>()
    }
}

/// ε(iξ) = ε∞ + Σ_j C_j ω_j² / (ω_j² + ξ² + γ_j ξ), valid for ξ >= 0.
pub fn eps_oscillator(xi: f64, model: &OscillatorSet) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(CasimirError::domain("eps_oscillator", format!("xi = {xi}")));
    }
    if xi == 0.0 {
        return Ok(model.static_eps());
    }
    Ok(model.eps_infinity
        + model
            .terms
            .iter()
            .map(|t| {
                let w2 = t.resonance * t.resonance;
                t.strength * w2 / (w2 + xi * xi + t.width * xi)
            })
            .sum::<f64>())
}

/// How free carriers are continued to zero frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extrapolation {
    Drude,
    Plasma,
}

/// Free-carrier (intraband) response.
///
/// `gamma` is kept for the plasma variant too: for tabulated data it
/// identifies the relaxation absorption that the plasma continuation strips
/// from the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeCarriers {
    pub omega_p: f64,
    pub gamma: f64,
    pub kind: Extrapolation,
}

impl FreeCarriers {
    pub fn new(omega_p: f64, gamma: f64, kind: Extrapolation) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) || !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(CasimirError::Config(format!(
                "free carriers need omega_p > 0 and gamma >= 0, got ({omega_p}, {gamma})"
            )));
        }
        Ok(Self {
            omega_p,
            gamma,
            kind,
        })
    }

    fn eps_minus_one(&self, xi: f64) -> Result<f64> {
        match self.kind {
            Extrapolation::Drude => eps_drude(xi, self.omega_p, self.gamma).map(|e| e - 1.0),
            Extrapolation::Plasma => eps_plasma(xi, self.omega_p).map(|e| e - 1.0),
        }
    }

    fn zero_frequency(&self) -> ZeroFrequency {
        match self.kind {
            Extrapolation::Drude => ZeroFrequency::DrudeLike,
            Extrapolation::Plasma => ZeroFrequency::PlasmaLike {
                omega_p: self.omega_p,
            },
        }
    }
}

/// Behaviour of a material at ξ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroFrequency {
    /// Finite static permittivity.
    FiniteStatic { eps0: f64 },
    /// ε ~ 1/ξ: TM reflects fully, TE sees k = y.
    DrudeLike,
    /// ε ~ ω_p²/ξ²: TM reflects fully, TE sees k = √(y² + ω̃_p²).
    PlasmaLike { omega_p: f64 },
    /// r_TM = 1 and r_TE = -1 at every frequency.
    PerfectConductor,
}

/// Permittivity model of one material.
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialModel {
    Drude {
        omega_p: f64,
        gamma: f64,
    },
    Plasma {
        omega_p: f64,
    },
    Oscillators(OscillatorSet),
    /// Kramers–Kronig transform of tabulated Im ε with an optional
    /// free-carrier continuation below the table.
    Tabulated {
        table: Arc<OpticalTable>,
        extension: Option<FreeCarriers>,
    },
    /// Dielectric background plus free carriers (doped semiconductor).
    Doped {
        core: OscillatorSet,
        carriers: FreeCarriers,
    },
    PerfectConductor,
}

impl MaterialModel {
    pub fn vacuum() -> Self {
        MaterialModel::Oscillators(OscillatorSet {
            eps_infinity: 1.0,
            terms: Vec::new(),
        })
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self> {
        FreeCarriers::new(omega_p, gamma, Extrapolation::Drude)?;
        Ok(MaterialModel::Drude { omega_p, gamma })
    }

    pub fn plasma(omega_p: f64) -> Result<Self> {
        FreeCarriers::new(omega_p, 0.0, Extrapolation::Plasma)?;
        Ok(MaterialModel::Plasma { omega_p })
    }

    /// ε(iξ) for ξ > 0 (ξ = 0 is accepted only for finite-static models).
    pub fn eps(&self, xi: f64) -> Result<f64> {
        match self {
            MaterialModel::Drude { omega_p, gamma } => eps_drude(xi, *omega_p, *gamma),
            MaterialModel::Plasma { omega_p } => eps_plasma(xi, *omega_p),
            MaterialModel::Oscillators(set) => eps_oscillator(xi, set),
            MaterialModel::Tabulated { table, extension } => {
                eps_tabulated(xi, table, extension.as_ref())
            }
            MaterialModel::Doped { core, carriers } => {
                Ok(eps_oscillator(xi, core)? + carriers.eps_minus_one(xi)?)
            }
            MaterialModel::PerfectConductor => {
                if xi > 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Err(CasimirError::domain("eps", "perfect conductor at xi = 0"))
                }
            }
        }
    }

    pub fn zero_frequency(&self) -> ZeroFrequency {
        match self {
            MaterialModel::Drude { .. } => ZeroFrequency::DrudeLike,
            MaterialModel::Plasma { omega_p } => ZeroFrequency::PlasmaLike { omega_p: *omega_p },
            MaterialModel::Oscillators(set) => ZeroFrequency::FiniteStatic {
                eps0: set.static_eps(),
            },
            MaterialModel::Tabulated { table, extension } => match extension {
                Some(c) => c.zero_frequency(),
                None => ZeroFrequency::FiniteStatic {
                    eps0: table.static_eps(),
                },
            },
            MaterialModel::Doped { carriers, .. } => carriers.zero_frequency(),
            MaterialModel::PerfectConductor => ZeroFrequency::PerfectConductor,
        }
    }

    /// Same material with its free carriers continued by `kind`.
    /// Models without free carriers are returned unchanged.
    pub fn with_extrapolation(&self, kind: Extrapolation) -> Self {
        match self {
            MaterialModel::Drude { omega_p, .. } if kind == Extrapolation::Plasma => {
                MaterialModel::Plasma { omega_p: *omega_p }
            }
            MaterialModel::Tabulated {
                table,
                extension: Some(c),
            } => MaterialModel::Tabulated {
                table: Arc::clone(table),
                extension: Some(FreeCarriers { kind, ..*c }),
            },
            MaterialModel::Doped { core, carriers } => MaterialModel::Doped {
                core: core.clone(),
                carriers: FreeCarriers { kind, ..*carriers },
            },
            _ => self.clone(),
        }
    }

    /// Same material with the free-carrier plasma frequency replaced.
    pub fn with_plasma_frequency(&self, omega_p: f64) -> Self {
        match self {
            MaterialModel::Drude { gamma, .. } => MaterialModel::Drude {
                omega_p,
                gamma: *gamma,
            },
            MaterialModel::Plasma { .. } => MaterialModel::Plasma { omega_p },
            MaterialModel::Tabulated {
                table,
                extension: Some(c),
            } => MaterialModel::Tabulated {
                table: Arc::clone(table),
                extension: Some(FreeCarriers { omega_p, ..*c }),
            },
            MaterialModel::Doped { core, carriers } => MaterialModel::Doped {
                core: core.clone(),
                carriers: FreeCarriers {
                    omega_p,
                    ..*carriers
                },
            },
            _ => self.clone(),
        }
    }

    /// Free-carrier parameters, when the model has any.
    pub fn free_carriers(&self) -> Option<FreeCarriers> {
        match self {
            MaterialModel::Drude { omega_p, gamma } => Some(FreeCarriers {
                omega_p: *omega_p,
                gamma: *gamma,
                kind: Extrapolation::Drude,
            }),
            MaterialModel::Plasma { omega_p } => Some(FreeCarriers {
                omega_p: *omega_p,
                gamma: 0.0,
                kind: Extrapolation::Plasma,
            }),
            MaterialModel::Tabulated { extension, .. } => *extension,
            MaterialModel::Doped { carriers, .. } => Some(*carriers),
            _ => None,
        }
    }
}
