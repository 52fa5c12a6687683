//! Run configuration: a TOML file with `[geometry]`, `[side1]`, `[side2]`,
//! `[sphere]`, `[band]`, `[spectrum]`, `[quadrature]` and `[output]`
//! sections, overridden by command-line flags.
//!
//! Lengths accept either a number in meters or a string with a unit suffix
//! (`"300nm"`, `"2um"`, `"54.1μm"`, `"1e-6m"`).

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

/// A length in meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Length(pub f64);

impl Length {
    pub fn meters(self) -> f64 {
        self.0
    }
}

impl std::str::FromStr for Length {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        // divisors keep "300nm" exactly equal to 3e-7
        let units: [(&str, f64); 7] = [
            ("nm", 1e9),
            ("um", 1e6),
            ("μm", 1e6),
            ("µm", 1e6),
            ("mm", 1e3),
            ("cm", 1e2),
            ("m", 1.0),
        ];
        let (number, scale) = units
            .iter()
            .find_map(|&(suffix, scale)| s.strip_suffix(suffix).map(|n| (n.trim(), scale)))
            .unwrap_or((s, 1.0));
        number
            .parse::<f64>()
            .map(|v| Length(v / scale))
            .map_err(|_| format!("cannot read '{s}' as a length (use e.g. 300nm, 2um or meters)"))
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}m", self.0)
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Length(v)),
            Raw::Int(v) => Ok(Length(v as f64)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolation {
    Drude,
    Plasma,
}

impl From<Extrapolation> for cge_core::material::Extrapolation {
    fn from(e: Extrapolation) -> Self {
        match e {
            Extrapolation::Drude => Self::Drude,
            Extrapolation::Plasma => Self::Plasma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Recursion {
    Simplified,
    Exact,
}

/// Which sides carry a graphene sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Coated {
    None,
    One,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub a_min: Option<Length>,
    pub a_max: Option<Length>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
    /// Kelvin.
    pub temperature: Option<f64>,
}

/// A film between the coating and the substrate, written `NAME:THICKNESS`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilmSpec {
    pub material: String,
    pub thickness: Length,
}

impl std::str::FromStr for FilmSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, thickness) = s
            .rsplit_once(':')
            .ok_or_else(|| format!("film '{s}' must look like NAME:THICKNESS"))?;
        if name.is_empty() {
            return Err(format!("film '{s}' has no material name"));
        }
        Ok(FilmSpec {
            material: name.to_string(),
            thickness: thickness.parse()?,
        })
    }
}

impl Serialize for FilmSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{}:{}", self.material, self.thickness))
    }
}

impl<'de> Deserialize<'de> for FilmSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SideSpec {
    /// Registry name or path of the substrate material.
    pub substrate: String,
    pub coated: bool,
    /// Graphene gap in eV.
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub film: Option<FilmSpec>,
    pub film_recursion: Recursion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<Extrapolation>,
    /// Overrides the free-carrier plasma frequency (eV) of the substrate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plasma_frequency: Option<f64>,
}

impl Default for SideSpec {
    fn default() -> Self {
        Self {
            substrate: "fused-silica".into(),
            coated: false,
            gap: 0.0,
            film: None,
            film_recursion: Recursion::Simplified,
            extrapolation: None,
            plasma_frequency: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereSpec {
    pub radius: Length,
    pub material: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<Extrapolation>,
    /// Total error of F'/R in Pa.
    pub total_error: f64,
}

impl Default for SphereSpec {
    fn default() -> Self {
        Self {
            radius: Length(cge_core::sphere_plate::SphereExperiment::DEFAULT_RADIUS),
            material: "gold".into(),
            extrapolation: None,
            total_error: cge_core::sphere_plate::SphereExperiment::DEFAULT_TOTAL_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    /// Graphene gap endpoints in eV.
    pub gaps: Vec<f64>,
    pub extrapolations: Vec<Extrapolation>,
    /// Plasma-frequency endpoints (eV) of the plate substrate's carriers.
    pub substrate_plasma_frequencies: Vec<f64>,
    /// Measurement overlay CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlay: Option<PathBuf>,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            gaps: vec![0.0, 0.1],
            extrapolations: vec![Extrapolation::Drude, Extrapolation::Plasma],
            substrate_plasma_frequencies: Vec::new(),
            overlay: None,
        }
    }
}

/// Grids for the dump commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSpec {
    /// Imaginary-frequency range in eV for `dump-eps`.
    pub xi_min: f64,
    pub xi_max: f64,
    /// Transverse range (dimensionless y − ζ) for `dump-reflection`.
    pub y_min: f64,
    pub y_max: f64,
    pub points: usize,
    /// Highest Matsubara index dumped by `dump-reflection`.
    pub matsubara_max: usize,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            xi_min: 1e-3,
            xi_max: 100.0,
            y_min: 1e-3,
            y_max: 30.0,
            points: 50,
            matsubara_max: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_matsubara: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        let q = cge_core::QuadratureConfig::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_matsubara: q.max_matsubara,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// `-` or absent means standard output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
    pub trace: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Csv,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub side1: SideSpec,
    pub side2: SideSpec,
    pub sphere: SphereSpec,
    pub band: BandConfig,
    pub spectrum: SpectrumSpec,
    pub quadrature: QuadratureSpec,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::default(),
            side1: SideSpec {
                coated: true,
                ..SideSpec::default()
            },
            side2: SideSpec::default(),
            sphere: SphereSpec::default(),
            band: BandConfig::default(),
            spectrum: SpectrumSpec::default(),
            quadrature: QuadratureSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

/// Grid family a command scans by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Log-spaced, 60 points over [100 nm, 6 μm].
    Wide,
    /// Linear, 50 points over [200 nm, 600 nm].
    Short,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Fills every unset geometry value with the command's default.
    pub fn resolve(&mut self, kind: GridKind) {
        let g = &mut self.geometry;
        let (lo, hi, n, spacing) = match kind {
            GridKind::Wide => (100e-9, 6e-6, 60, Spacing::Log),
            GridKind::Short => (200e-9, 600e-9, 50, Spacing::Linear),
        };
        g.a_min.get_or_insert(Length(lo));
        g.a_max.get_or_insert(Length(hi));
        g.points.get_or_insert(n);
        g.spacing.get_or_insert(spacing);
        g.temperature.get_or_insert(300.0);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.geometry;
        let bad = |m: String| Err(CliError::Config(m));
        if let (Some(lo), Some(hi)) = (g.a_min, g.a_max) {
            if !(lo.0 > 0.0) {
                return bad(format!("a_min must be > 0, got {lo}"));
            }
            if hi.0 < lo.0 {
                return bad(format!("a_max ({hi}) is below a_min ({lo})"));
            }
        }
        if g.points == Some(0) {
            return bad("points must be >= 1".into());
        }
        if let Some(t) = g.temperature {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("temperature must be >= 0 K, got {t}"));
            }
        }
        for side in [&self.side1, &self.side2] {
            if !(side.gap >= 0.0) {
                return bad(format!("graphene gap must be >= 0 eV, got {}", side.gap));
            }
            if let Some(f) = &side.film {
                if !(f.thickness.0 > 0.0) {
                    return bad(format!("film thickness must be > 0, got {}", f.thickness));
                }
            }
        }
        if !(self.sphere.radius.0 > 0.0) {
            return bad(format!(
                "sphere radius must be > 0, got {}",
                self.sphere.radius
            ));
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.rel_tol < 1.0) || !(q.abs_tol > 0.0) || q.max_matsubara == 0 {
            return bad("quadrature needs 0 < rel_tol < 1, abs_tol > 0, max_matsubara >= 1".into());
        }
        let s = &self.spectrum;
        if !(s.xi_min > 0.0 && s.xi_max >= s.xi_min && s.y_min > 0.0 && s.y_max >= s.y_min)
            || s.points == 0
        {
            return bad("spectrum ranges must be positive and ordered, points >= 1".into());
        }
        Ok(())
    }

    /// Separation grid in meters (after [`RunConfig::resolve`]).
    pub fn separations(&self) -> Vec<f64> {
        let g = &self.geometry;
        let lo = g.a_min.expect("resolved").0;
        let hi = g.a_max.expect("resolved").0;
        grid(
            lo,
            hi,
            g.points.expect("resolved"),
            g.spacing.expect("resolved"),
        )
    }

    pub fn temperature(&self) -> f64 {
        self.geometry.temperature.unwrap_or(300.0)
    }

    pub fn apply_coated(&mut self, coated: Coated) {
        let (one, two) = match coated {
            Coated::None => (false, false),
            Coated::One => (true, false),
            Coated::Both => (true, true),
        };
        self.side1.coated = one;
        self.side2.coated = two;
    }
}

/// `n` points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    (0..n)
        .map(|i| match spacing {
            Spacing::Linear => lo + (hi - lo) * step(i),
            Spacing::Log => lo * (hi / lo).powf(step(i)),
        })
        .map(|x| x.clamp(lo, hi))
        .collect()
}
