//! Sphere-plate force gradients in the proximity force approximation,
//! thermal corrections and model-uncertainty bands.
//!
//! F'_sp/R = −2πP(a, T): the gradient normalized by the sphere radius is the
//! plate-plate pressure up to a factor −2π.

use rayon::prelude::*;

use crate::engine::{pressure, pressure_t0, QuadratureConfig, Scenario};
use crate::error::{CasimirError, Result};
use crate::graphene::GrapheneSheet;
use crate::material::{Extrapolation, MaterialModel};
use crate::reflection::PlateStack;

/// Above this a/R the PFA error is no longer negligible.
pub const PFA_WARNING_RATIO: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereExperiment {
    /// Sphere radius in meters.
    pub radius: f64,
    /// The sphere's material seen as a half-space.
    pub sphere: PlateStack,
    pub plate: PlateStack,
    /// Laboratory temperature in kelvin.
    pub temperature: f64,
    /// Total error of F'/R in Pa.
    pub total_error: f64,
}

impl SphereExperiment {
    pub const DEFAULT_RADIUS: f64 = 54.1e-6;
    pub const DEFAULT_TEMPERATURE: f64 = 300.0;
    pub const DEFAULT_TOTAL_ERROR: f64 = 0.012;

    pub fn new(sphere: PlateStack, plate: PlateStack) -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
            sphere,
            plate,
            temperature: Self::DEFAULT_TEMPERATURE,
            total_error: Self::DEFAULT_TOTAL_ERROR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(CasimirError::Config(format!(
                "sphere radius must be > 0 m, got {}",
                self.radius
            )));
        }
        if !(self.total_error >= 0.0) {
            return Err(CasimirError::Config(format!(
                "total error must be >= 0 Pa, got {}",
                self.total_error
            )));
        }
        self.sphere.validate()?;
        self.plate.validate()
    }

    /// Warning text when the separation is too large for PFA.
    pub fn pfa_warning(&self, separation: f64) -> Option<String> {
        let ratio = separation / self.radius;
        (ratio > PFA_WARNING_RATIO).then(|| {
            format!("a/R = {ratio:.3e} exceeds {PFA_WARNING_RATIO}; PFA corrections may matter")
        })
    }

    fn scenario(&self, separation: f64, temperature: f64) -> Scenario {
        Scenario::new(
            separation,
            temperature,
            self.plate.clone(),
            self.sphere.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// At the experiment's temperature.
    Thermal,
    ZeroTemperature,
}

/// A value in Pa with its propagated numerical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// F'_sp/R = −2πP; positive for attraction.
pub fn normalized_gradient(
    separation: f64,
    exp: &SphereExperiment,
    cfg: &QuadratureConfig,
    mode: Mode,
) -> Result<Estimate> {
    exp.validate()?;
    let p = match mode {
        Mode::Thermal => pressure(&exp.scenario(separation, exp.temperature), cfg)?,
        Mode::ZeroTemperature => pressure_t0(&exp.scenario(separation, 0.0), cfg)?,
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(Estimate {
        value: -two_pi * p.pressure,
        error: two_pi * p.estimated_error,
    })
}

/// Δ_T F'/R = F'/R(T) − F'/R(0).
pub fn thermal_correction(
    separation: f64,
    exp: &SphereExperiment,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let hot = normalized_gradient(separation, exp, cfg, Mode::Thermal)?;
    let cold = normalized_gradient(separation, exp, cfg, Mode::ZeroTemperature)?;
    Ok(Estimate {
        value: hot.value - cold.value,
        error: hot.error + cold.error,
    })
}

/// Δ_T F'/F'(T).
pub fn relative_thermal_correction(
    separation: f64,
    exp: &SphereExperiment,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let hot = normalized_gradient(separation, exp, cfg, Mode::Thermal)?;
    let cold = normalized_gradient(separation, exp, cfg, Mode::ZeroTemperature)?;
    relative_from(hot.value, cold.value)
}

/// (hot − cold)/hot, rejecting a vanishing denominator.
pub fn relative_from(hot: f64, cold: f64) -> Result<f64> {
    if hot == 0.0 {
        return Err(CasimirError::domain(
            "relative_thermal_correction",
            "gradient at the laboratory temperature is zero",
        ));
    }
    Ok((hot - cold) / hot)
}

/// The parameter box whose corners bound the theoretical band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    /// Graphene gap endpoints in eV.
    pub gaps: Vec<f64>,
    /// Low-frequency continuations applied to every metallic material.
    pub extrapolations: Vec<Extrapolation>,
    /// Plasma-frequency endpoints (eV) for the plate substrate's free
    /// carriers; empty keeps the material's own value.
    pub substrate_plasma_frequencies: Vec<f64>,
}

impl Default for BandSpec {
    fn default() -> Self {
        Self {
            gaps: vec![0.0, 0.1],
            extrapolations: vec![Extrapolation::Drude, Extrapolation::Plasma],
            substrate_plasma_frequencies: Vec::new(),
        }
    }
}

impl BandSpec {
    /// A band with a single corner: the experiment as given.
    pub fn single() -> Self {
        Self {
            gaps: Vec::new(),
            extrapolations: Vec::new(),
            substrate_plasma_frequencies: Vec::new(),
        }
    }

    /// Every corner of the box applied to `exp`.
    pub fn variants(&self, exp: &SphereExperiment) -> Result<Vec<SphereExperiment>> {
        let mut out = vec![exp.clone()];
        if !self.gaps.is_empty() {
            out = out
                .iter()
                .flat_map(|e| self.gaps.iter().map(move |&gap| with_gap(e, gap)))
                .collect::<Result<_>>()?;
        }
        if !self.extrapolations.is_empty() {
            out = out
                .iter()
                .flat_map(|e| {
                    self.extrapolations.iter().map(move |&kind| {
                        let mut v = e.clone();
                        map_materials(&mut v.sphere, |m| m.with_extrapolation(kind));
                        map_materials(&mut v.plate, |m| m.with_extrapolation(kind));
                        v
                    })
                })
                .collect();
        }
        if !self.substrate_plasma_frequencies.is_empty() {
            if exp.plate.substrate.free_carriers().is_none() {
                return Err(CasimirError::Config(
                    "plasma-frequency band needs a plate substrate with free carriers".into(),
                ));
            }
            out = out
                .iter()
                .flat_map(|e| {
                    self.substrate_plasma_frequencies.iter().map(move |&wp| {
                        let mut v = e.clone();
                        v.plate.substrate = v.plate.substrate.with_plasma_frequency(wp);
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

fn with_gap(exp: &SphereExperiment, gap: f64) -> Result<SphereExperiment> {
    let mut v = exp.clone();
    for stack in [&mut v.sphere, &mut v.plate] {
        if let Some(sheet) = stack.coating {
            stack.coating = Some(GrapheneSheet::with_gap(sheet, gap)?);
        }
    }
    Ok(v)
}

fn map_materials(stack: &mut PlateStack, f: impl Fn(&MaterialModel) -> MaterialModel) {
    stack.substrate = f(&stack.substrate);
    if let Some(film) = &mut stack.film {
        film.material = f(&film.material);
    }
}

/// Pointwise envelope of the gradient over the band's corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub separation: f64,
    pub min: f64,
    pub max: f64,
    /// Largest numerical error among the corners.
    pub error: f64,
}

/// Envelope of F'/R over every band corner at each grid separation.
pub fn model_band(
    grid: &[f64],
    exp: &SphereExperiment,
    band: &BandSpec,
    cfg: &QuadratureConfig,
    mode: Mode,
) -> Result<Vec<BandPoint>> {
    let variants = band.variants(exp)?;
    grid.par_iter()
        .map(|&a| {
            let values = variants
                .par_iter()
                .map(|v| normalized_gradient(a, v, cfg, mode))
                .collect::<Result<Vec<_>>>()?;
            let mut point = BandPoint {
                separation: a,
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                error: 0.0,
            };
            for e in values {
                point.min = point.min.min(e.value);
                point.max = point.max.max(e.value);
                point.error = point.error.max(e.error);
            }
            Ok(point)
        })
        .collect()
}

/// First separation where `values` crosses `level`, by linear interpolation
/// between grid points.
pub fn find_crossing(grid: &[f64], values: &[f64], level: f64) -> Option<f64> {
    grid.windows(2)
        .zip(values.windows(2))
        .find_map(|(a, v)| {
            let (d0, d1) = (v[0] - level, v[1] - level);
            if d0 == 0.0 {
                Some(a[0])
            } else if d0 * d1 < 0.0 {
                Some(a[0] + (a[1] - a[0]) * d0 / (d0 - d1))
            } else {
                None
            }
        })
        .or_else(|| (values.last() == Some(&level)).then(|| *grid.last().expect("non-empty")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units;

    fn ideal() -> SphereExperiment {
        let p = PlateStack::half_space(MaterialModel::PerfectConductor);
        SphereExperiment::new(p.clone(), p)
    }

    #[test]
    fn ideal_metal_gradient() {
        let g = normalized_gradient(
            1e-6,
            &ideal(),
            &QuadratureConfig::default(),
            Mode::ZeroTemperature,
        )
        .unwrap();
        let expect = -2.0 * std::f64::consts::PI * units::ideal_metal_pressure_t0(1e-6);
        assert!(((g.value - expect) / expect).abs() < 1e-6);
        assert!((g.value - 8.168e-3).abs() < 1e-6);
    }

    #[test]
    fn vacuum_plate_has_no_gradient() {
        let mut exp = ideal();
        exp.plate = PlateStack::half_space(MaterialModel::vacuum());
        let g =
            normalized_gradient(1e-6, &exp, &QuadratureConfig::default(), Mode::Thermal).unwrap();
        assert_eq!(g.value, 0.0);
        assert!(relative_thermal_correction(1e-6, &exp, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn zero_temperature_experiment_has_no_correction() {
        let mut exp = ideal();
        exp.temperature = 0.0;
        let c = thermal_correction(1e-6, &exp, &QuadratureConfig::default()).unwrap();
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn pfa_warning_threshold() {
        let exp = ideal();
        assert!(exp.pfa_warning(500e-9).is_none());
        assert!(exp.pfa_warning(1e-6).is_some());
    }

    #[test]
    fn single_variant_band_has_zero_width() {
        let band = model_band(
            &[1e-6],
            &ideal(),
            &BandSpec::single(),
            &QuadratureConfig::default(),
            Mode::ZeroTemperature,
        )
        .unwrap();
        assert_eq!(band[0].min, band[0].max);
    }

    #[test]
    fn corner_count() {
        let exp = SphereExperiment::new(
            PlateStack::half_space(MaterialModel::drude(9.0, 0.035).unwrap()),
            PlateStack::coated(
                MaterialModel::drude(0.3, 0.05).unwrap(),
                GrapheneSheet::pristine(),
            ),
        );
        let band = BandSpec {
            substrate_plasma_frequencies: vec![0.25, 0.35],
            ..Default::default()
        };
        let v = band.variants(&exp).unwrap();
        assert_eq!(v.len(), 8);
        assert!(v
            .iter()
            .any(|e| e.plate.substrate == MaterialModel::Plasma { omega_p: 0.35 }));
    }

    #[test]
    fn crossing_interpolates() {
        let grid = [1.0, 2.0, 3.0];
        let vals = [5.0, 3.0, 1.0];
        assert_eq!(find_crossing(&grid, &vals, 2.0), Some(2.5));
        assert_eq!(find_crossing(&grid, &vals, 9.0), None);
    }
}
