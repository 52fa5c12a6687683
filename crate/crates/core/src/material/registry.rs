//! Material data files and the built-in registry.
//!
//! File format (UTF-8, `#` starts a comment line):
//!
//! ```text
//! # provenance comments
//! drude OMEGA_P GAMMA        optional free carriers, Drude continuation
//! plasma OMEGA_P [GAMMA]     optional free carriers, plasma continuation
//! oscillator                 then: eps_infinity, then "C omega gamma" per line
//! table                      then: "energy_eV im_eps" per line
//! sensitive NOTE             results depend strongly on uncertain parameters
//! ```
//!
//! Energies are in eV. A file holds at most one `oscillator` or `table`
//! block; a bare free-carrier line describes a pure Drude/plasma metal.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::{Extrapolation, FreeCarriers, MaterialModel, OpticalTable, Oscillator, OscillatorSet};
use crate::error::{CasimirError, Result};

/// Environment variable holding extra material search directories
/// (platform path-list syntax), searched before the built-in registry.
pub const MATERIAL_PATH_ENV: &str = "CGE_MATERIAL_PATH";

/// Names resolvable without any file on disk.
pub const BUILTIN_MATERIALS: [&str; 6] = [
    "gold",
    "silicon",
    "silicon-doped",
    "sapphire",
    "mica",
    "fused-silica",
];

fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "gold" => include_str!("../../data/gold.dat"),
        "silicon" => include_str!("../../data/silicon.dat"),
        "silicon-doped" => include_str!("../../data/silicon-doped.dat"),
        "sapphire" => include_str!("../../data/sapphire.dat"),
        "mica" => include_str!("../../data/mica.dat"),
        "fused-silica" => include_str!("../../data/fused-silica.dat"),
        _ => return None,
    })
}

/// Where a material came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialProvenance {
    pub name: String,
    /// `builtin:<name>` or the file path.
    pub source: String,
    /// SHA-256 of the file contents, lowercase hex.
    pub sha256: String,
    /// Comment lines of the file, in order.
    pub comments: Vec<String>,
    pub warnings: Vec<String>,
    /// Set by a `sensitive` line: results using this material should be
    /// reported as a band rather than a single number.
    pub sensitivity: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMaterial {
    pub model: MaterialModel,
    pub provenance: MaterialProvenance,
}

enum Block {
    None,
    Oscillator {
        eps_inf: Option<f64>,
        terms: Vec<Oscillator>,
    },
    Table(Vec<(f64, f64)>),
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| CasimirError::MaterialData {
                line: lineno,
                message: format!("not a number: '{s}'"),
            })
        })
        .collect()
}

/// Parses the text of a material file.
pub fn parse_material(name: &str, source: &str, text: &str) -> Result<LoadedMaterial> {
    let mut comments = Vec::new();
    let mut carriers: Option<FreeCarriers> = None;
    let mut block = Block::None;
    let mut sensitivity = None;
    let data_err = |line: usize, message: String| CasimirError::MaterialData { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or_default();
        match head {
            "sensitive" => {
                let note = line[head.len()..].trim();
                if note.is_empty() {
                    return Err(data_err(lineno, "'sensitive' needs a note".into()));
                }
                sensitivity = Some(note.to_string());
            }
            "drude" | "plasma" => {
                let nums = parse_numbers(&line[head.len()..], lineno)?;
                let (kind, ok) = if head == "drude" {
                    (Extrapolation::Drude, nums.len() == 2)
                } else {
                    (Extrapolation::Plasma, nums.len() == 1 || nums.len() == 2)
                };
                if !ok {
                    return Err(data_err(lineno, format!("bad '{head}' line")));
                }
                if carriers.is_some() {
                    return Err(data_err(lineno, "duplicate free-carrier line".into()));
                }
                let gamma = nums.get(1).copied().unwrap_or(0.0);
                carriers = Some(
                    FreeCarriers::new(nums[0], gamma, kind)
                        .map_err(|e| data_err(lineno, e.to_string()))?,
                );
            }
            "oscillator" | "table" => {
                if !matches!(block, Block::None) {
                    return Err(data_err(lineno, "only one data block per file".into()));
                }
                block = if head == "oscillator" {
                    Block::Oscillator {
                        eps_inf: None,
                        terms: Vec::new(),
                    }
                } else {
                    Block::Table(Vec::new())
                };
            }
            _ => {
                let nums = parse_numbers(line, lineno)?;
                match &mut block {
                    Block::None => {
                        return Err(data_err(lineno, format!("unexpected line '{line}'")))
                    }
                    Block::Oscillator { eps_inf, terms } => match (eps_inf.is_some(), nums.len()) {
                        (false, 1) => *eps_inf = Some(nums[0]),
                        (true, 3) => terms.push(Oscillator {
                            strength: nums[0],
                            resonance: nums[1],
                            width: nums[2],
                        }),
                        _ => {
                            return Err(data_err(
                                lineno,
                                "expected eps_infinity, then 'C omega gamma' triples".into(),
                            ))
                        }
                    },
                    Block::Table(rows) => {
                        if nums.len() != 2 {
                            return Err(data_err(lineno, "expected 'energy im_eps'".into()));
                        }
                        rows.push((nums[0], nums[1]));
                    }
                }
            }
        }
    }

    let mut warnings = Vec::new();
    let model = match (block, carriers) {
        (Block::None, None) => return Err(data_err(0, "no material data".into())),
        (Block::None, Some(c)) => match c.kind {
            Extrapolation::Drude => MaterialModel::Drude {
                omega_p: c.omega_p,
                gamma: c.gamma,
            },
            Extrapolation::Plasma => MaterialModel::Plasma { omega_p: c.omega_p },
        },
        (Block::Oscillator { eps_inf, terms }, carriers) => {
            let eps_inf = eps_inf
                .ok_or_else(|| data_err(0, "oscillator block without eps_infinity".into()))?;
            let core =
                OscillatorSet::new(eps_inf, terms).map_err(|e| data_err(0, e.to_string()))?;
            match carriers {
                Some(c) => MaterialModel::Doped { core, carriers: c },
                None => MaterialModel::Oscillators(core),
            }
        }
        (Block::Table(rows), carriers) => {
            let table = OpticalTable::new(rows, format!("{name} ({source})"))
                .map_err(|e| data_err(0, e.to_string()))?;
            warnings.extend(table.warnings.iter().cloned());
            MaterialModel::Tabulated {
                table: Arc::new(table),
                extension: carriers,
            }
        }
    };

    let digest = Sha256::digest(text.as_bytes());
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedMaterial {
        model,
        provenance: MaterialProvenance {
            name: name.to_string(),
            source: source.to_string(),
            sha256,
            comments,
            warnings,
            sensitivity,
        },
    })
}

fn search_dirs() -> Vec<PathBuf> {
    std::env::var_os(MATERIAL_PATH_ENV)
        .map(|v| std::env::split_paths(&v).collect())
        .unwrap_or_default()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CasimirError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Resolves a material by name or path.
///
/// Order: an explicit path (anything containing a path separator or ending
/// in `.dat`), then `<dir>/<name>.dat` for each directory in
/// `CGE_MATERIAL_PATH`, then the built-in registry.
pub fn load_material(name: &str) -> Result<LoadedMaterial> {
    let looks_like_path = name.contains(std::path::MAIN_SEPARATOR) || name.ends_with(".dat");
    if looks_like_path {
        let path = Path::new(name);
        let text = read_file(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| name.to_string());
        return parse_material(&stem, &path.display().to_string(), &text);
    }
    for dir in search_dirs() {
        let candidate = dir.join(format!("{name}.dat"));
        if candidate.is_file() {
            let text = read_file(&candidate)?;
            return parse_material(name, &candidate.display().to_string(), &text);
        }
    }
    match builtin_source(name) {
        Some(text) => parse_material(name, &format!("builtin:{name}"), text),
        None => Err(CasimirError::UnknownMaterial(name.to_string())),
    }
}
