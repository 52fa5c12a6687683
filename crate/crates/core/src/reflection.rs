//! TM/TE reflection coefficients on the imaginary frequency axis for bare,
//! graphene-coated and graphene/film/substrate plates.
//!
//! Coefficients are functions of the dimensionless pair (ζ, y) with
//! y ≥ ζ ≥ 0, where ζ = 2aξ/c and y = 2a·q.

use crate::error::{CasimirError, Result};
use crate::graphene::{
    polarization_nonzero, polarization_zero, DimensionlessContext, GrapheneSheet,
    PolarizationComponents,
};
use crate::material::{MaterialModel, ZeroFrequency};
use crate::units;

/// A point (ζ, y) of the Lifshitz integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub zeta: f64,
    pub y: f64,
}

impl SpectralPoint {
    pub fn new(zeta: f64, y: f64) -> Result<Self> {
        if !(zeta >= 0.0 && y >= zeta && y.is_finite()) {
            return Err(CasimirError::domain(
                "SpectralPoint",
                format!("need y >= zeta >= 0, got zeta = {zeta}, y = {y}"),
            ));
        }
        Ok(Self { zeta, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_tm: f64,
    pub r_te: f64,
}

impl ReflectionPair {
    pub const ZERO: ReflectionPair = ReflectionPair {
        r_tm: 0.0,
        r_te: 0.0,
    };
}

/// How the coated film and the film/substrate boundary are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilmRecursion {
    /// R = (R₁ + r e^{−x}) / (1 + R₁ r e^{−x}) with R₁ the graphene-dressed
    /// coefficient of the film half-space.
    #[default]
    Simplified,
    /// Full interface scattering with the sheet's current entering the
    /// transmission as well; reduces to graphene-on-substrate as D → 0.
    Exact,
}

/// A film layer between the coating and the substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct Film {
    pub material: MaterialModel,
    /// Thickness in meters.
    pub thickness: f64,
    pub recursion: FilmRecursion,
}

/// One side of the gap, listed from the vacuum gap inward.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateStack {
    pub coating: Option<GrapheneSheet>,
    pub film: Option<Film>,
    pub substrate: MaterialModel,
}

impl PlateStack {
    pub fn half_space(substrate: MaterialModel) -> Self {
        Self {
            coating: None,
            film: None,
            substrate,
        }
    }

    pub fn coated(substrate: MaterialModel, sheet: GrapheneSheet) -> Self {
        Self {
            coating: Some(sheet),
            film: None,
            substrate,
        }
    }

    pub fn with_film(mut self, material: MaterialModel, thickness: f64) -> Self {
        self.film = Some(Film {
            material,
            thickness,
            recursion: FilmRecursion::default(),
        });
        self
    }

    pub fn with_film_recursion(mut self, recursion: FilmRecursion) -> Self {
        if let Some(film) = &mut self.film {
            film.recursion = recursion;
        }
        self
    }

    pub fn with_coating(mut self, sheet: Option<GrapheneSheet>) -> Self {
        self.coating = sheet;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(film) = &self.film {
            if !(film.thickness > 0.0 && film.thickness.is_finite()) {
                return Err(CasimirError::Config(format!(
                    "film thickness must be > 0 m, got {}",
                    film.thickness
                )));
            }
        }
        Ok(())
    }

    /// True when the stack reflects nothing (bare vacuum).
    pub fn is_vacuum(&self) -> bool {
        self.coating.is_none() && self.film.is_none() && self.substrate == MaterialModel::vacuum()
    }
}

/// k = √(y² + (ε − 1)ζ²).
pub fn k_n(point: SpectralPoint, eps: f64) -> f64 {
    (point.y * point.y + (eps - 1.0) * point.zeta * point.zeta).sqrt()
}

fn tm_coefficient(eps: f64, k: f64, y: f64, screening: f64) -> f64 {
    if eps.is_infinite() {
        return 1.0;
    }
    (eps * y + k * (screening - 1.0)) / (eps * y + k * (screening + 1.0))
}

fn te_coefficient(y: f64, k: f64, combo: f64) -> f64 {
    if k.is_infinite() {
        return -1.0;
    }
    (y - k - combo) / (y + k + combo)
}

/// Uncoated half-space.
pub fn r_bare(point: SpectralPoint, eps: f64) -> ReflectionPair {
    let k = k_n(point, eps);
    ReflectionPair {
        r_tm: tm_coefficient(eps, k, point.y, 0.0),
        r_te: te_coefficient(point.y, k, 0.0),
    }
}

/// yΠ̃₀₀/(y² − ζ²), or its ζ = 0 form Π̃₀₀(0, y)/y.
fn tm_screening(point: SpectralPoint, pol: &PolarizationComponents) -> Result<f64> {
    let (zeta, y) = (point.zeta, point.y);
    if pol.pi00 == 0.0 {
        return Ok(0.0);
    }
    if zeta == 0.0 {
        return Ok(pol.pi00 / y);
    }
    if y == zeta {
        return Err(CasimirError::SingularPoint { zeta });
    }
    Ok(y * pol.pi00 / ((y - zeta) * (y + zeta)))
}

/// Half-space of permittivity `eps` under a graphene sheet.
pub fn r_graphene_coated(
    point: SpectralPoint,
    eps: f64,
    pol: &PolarizationComponents,
) -> Result<ReflectionPair> {
    let k = k_n(point, eps);
    let g = tm_screening(point, pol)?;
    Ok(ReflectionPair {
        r_tm: tm_coefficient(eps, k, point.y, g),
        r_te: te_coefficient(point.y, k, pol.pi_combo),
    })
}

fn interface(eps_f: f64, k_f: f64, eps_s: f64, k_s: f64) -> ReflectionPair {
    let r_tm = match (eps_f.is_infinite(), eps_s.is_infinite()) {
        (false, false) => (eps_s * k_f - eps_f * k_s) / (eps_s * k_f + eps_f * k_s),
        (false, true) => 1.0,
        (true, false) => -1.0,
        // conducting film: the coefficient above it is 1 in TM, so any value is inert
        (true, true) => 0.0,
    };
    let r_te = match (k_f.is_infinite(), k_s.is_infinite()) {
        (false, false) => (k_f - k_s) / (k_f + k_s),
        (false, true) => -1.0,
        (true, false) => 1.0,
        (true, true) => 0.0,
    };
    ReflectionPair { r_tm, r_te }
}

/// Fresnel coefficients of the film/substrate boundary.
pub fn r_fresnel_interface(point: SpectralPoint, eps_f: f64, eps_s: f64) -> ReflectionPair {
    interface(eps_f, k_n(point, eps_f), eps_s, k_n(point, eps_s))
}

/// Two-layer recursion R = (R₁ + r e^{−x}) / (1 + R₁ r e^{−x}).
fn combine(top: f64, interface: f64, attenuation: f64) -> f64 {
    let t = interface * attenuation;
    (top + t) / (1.0 + top * t)
}

/// Sheet-aware TE recursion; `combo` is the sheet term, `t` = r_fs e^{−x}.
fn combine_exact_te(y: f64, k_f: f64, combo: f64, t: f64) -> f64 {
    ((y - k_f - combo) + (y + k_f - combo) * t) / ((y + k_f + combo) + (y - k_f + combo) * t)
}

/// Sheet-aware TM recursion with q = ε_f y / k_f and screening g.
fn combine_exact_tm(q: f64, g: f64, t: f64) -> f64 {
    ((q + g - 1.0) + (1.0 + q - g) * t) / ((1.0 + q + g) - (1.0 - q + g) * t)
}

/// A material evaluated at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Medium {
    Finite(f64),
    /// Zero-frequency conductor with k = y.
    DrudeStatic,
    /// Zero-frequency plasma conductor with k = √(y² + ω̃_p²).
    PlasmaStatic(f64),
    Perfect,
}

impl Medium {
    fn at(material: &MaterialModel, zeta: f64, separation: f64) -> Result<Self> {
        if zeta > 0.0 {
            let eps = material.eps(units::dimensionless_to_ev(zeta, separation))?;
            return Ok(if eps.is_infinite() {
                Medium::Perfect
            } else {
                Medium::Finite(eps)
            });
        }
        Ok(match material.zero_frequency() {
            ZeroFrequency::FiniteStatic { eps0 } => Medium::Finite(eps0),
            ZeroFrequency::DrudeLike => Medium::DrudeStatic,
            ZeroFrequency::PlasmaLike { omega_p } => {
                Medium::PlasmaStatic(units::ev_to_dimensionless(omega_p, separation))
            }
            ZeroFrequency::PerfectConductor => Medium::Perfect,
        })
    }

    /// (ε, k) at transverse variable y.
    fn eps_k(&self, zeta: f64, y: f64) -> (f64, f64) {
        match *self {
            Medium::Finite(eps) => (eps, (y * y + (eps - 1.0) * zeta * zeta).sqrt()),
            Medium::DrudeStatic => (f64::INFINITY, y),
            Medium::PlasmaStatic(w) => (f64::INFINITY, y.hypot(w)),
            Medium::Perfect => (f64::INFINITY, f64::INFINITY),
        }
    }
}

/// How the graphene tensor is chosen at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorPolicy {
    /// ζ = 0 uses the explicit-temperature tensor; ζ > 0 the T = 0 tensor.
    Matsubara,
    /// Continuous-frequency (T = 0) integration; ζ > 0 always.
    ZeroTemperature,
}

/// A plate stack with every material evaluated at one frequency ζ; cheap to
/// evaluate for many y.
#[derive(Debug, Clone)]
pub struct StackAtFrequency {
    zeta: f64,
    film: Option<(Medium, f64, FilmRecursion)>,
    substrate: Medium,
    coating: Option<(GrapheneSheet, DimensionlessContext)>,
    policy: TensorPolicy,
    vacuum: bool,
}

impl StackAtFrequency {
    pub fn new(
        stack: &PlateStack,
        zeta: f64,
        ctx: &DimensionlessContext,
        policy: TensorPolicy,
    ) -> Result<Self> {
        stack.validate()?;
        if !(zeta >= 0.0) {
            return Err(CasimirError::domain(
                "StackAtFrequency",
                format!("zeta = {zeta}"),
            ));
        }
        if zeta == 0.0 && policy == TensorPolicy::ZeroTemperature {
            return Err(CasimirError::domain(
                "StackAtFrequency",
                "continuous-frequency integration never evaluates zeta = 0",
            ));
        }
        let a = ctx.separation;
        let film = stack
            .film
            .as_ref()
            .map(|f| {
                Ok::<_, CasimirError>((
                    Medium::at(&f.material, zeta, a)?,
                    f.thickness / a,
                    f.recursion,
                ))
            })
            .transpose()?;
        let substrate = Medium::at(&stack.substrate, zeta, a)?;
        let coating = stack.coating.map(|sheet| {
            let mut gctx = *ctx;
            gctx.delta_tilde = units::ev_to_dimensionless(sheet.delta, a);
            (sheet, gctx)
        });
        Ok(Self {
            zeta,
            film,
            substrate,
            coating,
            policy,
            vacuum: stack.is_vacuum(),
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn reflect(&self, y: f64) -> Result<ReflectionPair> {
        if self.vacuum {
            return Ok(ReflectionPair::ZERO);
        }
        let point = SpectralPoint::new(self.zeta, y)?;
        let pol = match &self.coating {
            None => PolarizationComponents::default(),
            Some((sheet, gctx)) if self.zeta == 0.0 => polarization_zero(y, gctx, sheet)?,
            Some((sheet, gctx)) => polarization_nonzero(point, gctx, sheet)?,
        };
        let g = tm_screening(point, &pol)?;
        let top_medium = self.film.map(|(m, _, _)| m).unwrap_or(self.substrate);
        let (eps_top, k_top) = top_medium.eps_k(self.zeta, y);
        let top = ReflectionPair {
            r_tm: tm_coefficient(eps_top, k_top, y, g),
            r_te: te_coefficient(y, k_top, pol.pi_combo),
        };
        let Some((_, d_over_a, recursion)) = self.film else {
            return Ok(top);
        };
        let (eps_s, k_s) = self.substrate.eps_k(self.zeta, y);
        let r_fs = interface(eps_top, k_top, eps_s, k_s);
        let attenuation = if k_top.is_infinite() {
            0.0
        } else {
            (-d_over_a * k_top).exp()
        };
        match recursion {
            FilmRecursion::Simplified => Ok(ReflectionPair {
                r_tm: combine(top.r_tm, r_fs.r_tm, attenuation),
                r_te: combine(top.r_te, r_fs.r_te, attenuation),
            }),
            FilmRecursion::Exact => {
                let r_tm = if eps_top.is_infinite() {
                    1.0
                } else {
                    combine_exact_tm(eps_top * y / k_top, g, r_fs.r_tm * attenuation)
                };
                let r_te = if k_top.is_infinite() {
                    -1.0
                } else {
                    combine_exact_te(y, k_top, pol.pi_combo, r_fs.r_te * attenuation)
                };
                Ok(ReflectionPair { r_tm, r_te })
            }
        }
    }

    pub fn policy(&self) -> TensorPolicy {
        self.policy
    }
}

/// Reflection coefficients of a full stack at one spectral point.
///
/// `ctx` supplies separation and temperature; the coating's own gap sets Δ̃.
pub fn r_stack(
    point: SpectralPoint,
    stack: &PlateStack,
    ctx: &DimensionlessContext,
    policy: TensorPolicy,
) -> Result<ReflectionPair> {
    StackAtFrequency::new(stack, point.zeta, ctx, policy)?.reflect(point.y)
}
