//! `cge`: scans of plate-plate pressure, sphere-plate force gradients and
//! thermal corrections for graphene-coated plates.
//!
//! Exit codes: 0 success, 2 configuration error, 3 a quadrature or Matsubara
//! sum failed to converge (partial results are still written), 4 input error.

// NaN-rejecting checks read naturally as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod overlay;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{
    Coated, Extrapolation, FilmSpec, Format, GridKind, Length, Recursion, RunConfig, Spacing,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Input(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cge",
    version,
    about = "Casimir pressure and force-gradient scans for graphene-coated plates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// |P| for uncoated, one-side and two-side coated plates, plus the ideal-metal reference.
    PressureScan(Common),
    /// P_g/P and P_gg/P with propagated quadrature errors.
    RatioScan(Common),
    /// Sphere-plate gradient F'/R at the configured temperature and at T = 0.
    GradientScan(Common),
    /// Thermal correction to F'/R compared with the experimental error.
    ThermalCorrection(Common),
    /// Model band at T and at T = 0, optionally against measured data.
    BandCompare(Common),
    /// Dielectric function of the side-1 substrate along imaginary frequency.
    DumpEps(Common),
    /// Side-1 reflection coefficients at the first Matsubara frequencies.
    DumpReflection(Common),
    /// Print the effective configuration as TOML.
    ShowConfig(Common),
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Smallest separation, e.g. 200nm.
    #[arg(long)]
    pub a_min: Option<Length>,
    #[arg(long)]
    pub a_max: Option<Length>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Temperature in K.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Substrate material for both plates.
    #[arg(long)]
    pub substrate: Option<String>,
    /// Which plates carry graphene.
    #[arg(long, value_enum)]
    pub coated: Option<Coated>,
    /// Graphene gap in eV on coated plates.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Film between graphene and the side-1 substrate, NAME:THICKNESS.
    #[arg(long)]
    pub film: Option<FilmSpec>,
    #[arg(long, value_enum)]
    pub film_recursion: Option<Recursion>,
    /// Low-frequency treatment for metals and doped semiconductors.
    #[arg(long, value_enum)]
    pub extrapolation: Option<Extrapolation>,
    /// Sphere material for gradient scans.
    #[arg(long)]
    pub sphere: Option<String>,
    /// Measured gradients to compare with (band-compare).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_matsubara: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write per-Matsubara-term contributions.
    #[arg(long)]
    pub trace: bool,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PressureScan(_) => "pressure-scan",
            Command::RatioScan(_) => "ratio-scan",
            Command::GradientScan(_) => "gradient-scan",
            Command::ThermalCorrection(_) => "thermal-correction",
            Command::BandCompare(_) => "band-compare",
            Command::DumpEps(_) => "dump-eps",
            Command::DumpReflection(_) => "dump-reflection",
            Command::ShowConfig(_) => "show-config",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::PressureScan(c)
            | Command::RatioScan(c)
            | Command::GradientScan(c)
            | Command::ThermalCorrection(c)
            | Command::BandCompare(c)
            | Command::DumpEps(c)
            | Command::DumpReflection(c)
            | Command::ShowConfig(c) => c,
        }
    }

    fn grid_kind(&self) -> GridKind {
        match self {
            Command::PressureScan(_) | Command::DumpEps(_) | Command::DumpReflection(_) => {
                GridKind::Wide
            }
            _ => GridKind::Short,
        }
    }
}

/// The config file (if any) with command-line overrides applied, resolved
/// against the command's default grid and validated.
pub fn effective_config(command: &Command) -> Result<RunConfig, CliError> {
    let c = command.common();
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let g = &mut cfg.geometry;
    g.a_min = c.a_min.or(g.a_min);
    g.a_max = c.a_max.or(g.a_max);
    if matches!(command, Command::DumpEps(_) | Command::DumpReflection(_)) {
        // the dumps sample the spectrum, not a separation grid
        if let Some(n) = c.points {
            cfg.spectrum.points = n;
        }
    } else {
        cfg.geometry.points = c.points.or(cfg.geometry.points);
    }
    let g = &mut cfg.geometry;
    g.spacing = c.spacing.or(g.spacing);
    g.temperature = c.temperature.or(g.temperature);
    if let Some(s) = &c.substrate {
        cfg.side1.substrate = s.clone();
        cfg.side2.substrate = s.clone();
    }
    if let Some(coated) = c.coated {
        cfg.apply_coated(coated);
    }
    for side in [&mut cfg.side1, &mut cfg.side2] {
        if let Some(gap) = c.gap {
            side.gap = gap;
        }
        if let Some(e) = c.extrapolation {
            side.extrapolation = Some(e);
        }
        if let Some(r) = c.film_recursion {
            side.film_recursion = r;
        }
    }
    if let Some(f) = &c.film {
        cfg.side1.film = Some(f.clone());
    }
    if let Some(s) = &c.sphere {
        cfg.sphere.material = s.clone();
    }
    if let Some(e) = c.extrapolation {
        cfg.sphere.extrapolation = Some(e);
    }
    if let Some(o) = &c.overlay {
        cfg.band.overlay = Some(o.clone());
    }
    if let Some(r) = c.rel_tol {
        cfg.quadrature.rel_tol = r;
    }
    if let Some(m) = c.max_matsubara {
        cfg.quadrature.max_matsubara = m;
    }
    if let Some(o) = &c.output {
        cfg.output.path = Some(o.clone());
    }
    if let Some(f) = c.format {
        cfg.output.format = f;
    }
    cfg.output.trace |= c.trace;
    cfg.resolve(command.grid_kind());
    cfg.validate()?;
    Ok(cfg)
}

/// Result of a finished command.
#[derive(Debug)]
pub struct Outcome {
    /// Main output text (table or TOML).
    pub text: String,
    /// Destination from the flags or config; stdout when absent.
    pub path: Option<PathBuf>,
    pub trace: Option<String>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

fn metadata(command: &str, config: &RunConfig, report: &commands::Report) -> Value {
    let materials: Vec<Value> = report
        .materials
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "source": p.source,
                "sha256": p.sha256,
                "sensitivity": p.sensitivity,
            })
        })
        .collect();
    let mut meta = json!({
        "command": command,
        "engine_version": cge_core::VERSION,
        "config": serde_json::to_value(config).expect("config encodes"),
        "materials": materials,
        "warnings": report.warnings,
        "failed_rows": report.failed_rows,
    });
    if let (Value::Object(m), Value::Object(extra)) = (&mut meta, &report.extra) {
        m.extend(extra.clone());
    }
    meta
}

/// Runs a parsed command without touching the filesystem for output.
pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let config = effective_config(command)?;
    let report = match command {
        Command::ShowConfig(_) => {
            return Ok(Outcome {
                text: config.to_toml(),
                path: None,
                trace: None,
                warnings: Vec::new(),
                exit_code: 0,
            })
        }
        Command::PressureScan(_) => commands::pressure_scan(&config)?,
        Command::RatioScan(_) => commands::ratio_scan(&config)?,
        Command::GradientScan(_) => commands::gradient_scan(&config)?,
        Command::ThermalCorrection(_) => commands::thermal_correction(&config)?,
        Command::BandCompare(_) => commands::band_compare(&config)?,
        Command::DumpEps(_) => commands::dump_eps(&config)?,
        Command::DumpReflection(_) => commands::dump_reflection(&config)?,
    };
    let text = match config.output.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report
            .table
            .to_json(metadata(command.name(), &config, &report)),
    };
    let mut warnings = report.warnings.clone();
    if report.failed_rows > 0 {
        warnings.push(format!(
            "{} row(s) failed; see the status column",
            report.failed_rows
        ));
    }
    Ok(Outcome {
        text,
        path: config.output.path.clone(),
        trace: report.trace.as_ref().map(|t| t.to_csv()),
        warnings,
        exit_code: if report.failed_rows > 0 { 3 } else { 0 },
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args`, runs the command and writes its outputs. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli.command).and_then(|outcome| {
        match &outcome.path {
            Some(path) => {
                write_file(path, &outcome.text)?;
                if let Some(trace) = &outcome.trace {
                    let mut name = path.clone().into_os_string();
                    name.push(".trace.csv");
                    write_file(Path::new(&name), trace)?;
                }
            }
            None => {
                let _ = std::io::stdout().write_all(outcome.text.as_bytes());
                if let Some(trace) = &outcome.trace {
                    let _ = std::io::stderr().write_all(trace.as_bytes());
                }
            }
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
