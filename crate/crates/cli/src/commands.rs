//! The scans behind each subcommand.

use rayon::prelude::*;
use serde_json::{json, Value};

use cge_core::engine::{pressure, pressure_t0, PressureResult, QuadratureConfig, Scenario};
use cge_core::graphene::{DimensionlessContext, GrapheneSheet};
use cge_core::material::{load_material, MaterialModel, MaterialProvenance};
use cge_core::reflection::{FilmRecursion, PlateStack, StackAtFrequency, TensorPolicy};
use cge_core::sphere_plate::{
    find_crossing, model_band, normalized_gradient, relative_from, BandSpec, Mode, SphereExperiment,
};
use cge_core::{CasimirError, Result as CoreResult};

use crate::config::{grid, Recursion, RunConfig, SideSpec, Spacing};
use crate::overlay::{band_residual, load_overlay};
use crate::table::{Cell, Table};
use crate::CliError;

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    /// Command-specific metadata merged into the JSON metadata object.
    pub extra: Value,
    pub materials: Vec<MaterialProvenance>,
    pub warnings: Vec<String>,
    /// Rows whose evaluation failed.
    pub failed_rows: usize,
    pub trace: Option<Table>,
}

/// Collects material provenance while stacks are built.
#[derive(Default)]
struct Materials {
    seen: Vec<MaterialProvenance>,
}

impl Materials {
    fn load(&mut self, name: &str) -> Result<MaterialModel, CliError> {
        match name {
            "vacuum" => return Ok(MaterialModel::vacuum()),
            "ideal-metal" => return Ok(MaterialModel::PerfectConductor),
            _ => {}
        }
        let loaded = load_material(name)?;
        if !self
            .seen
            .iter()
            .any(|p| p.source == loaded.provenance.source)
        {
            self.seen.push(loaded.provenance);
        }
        Ok(loaded.model)
    }

    fn sensitive(&self) -> bool {
        self.seen.iter().any(|p| p.sensitivity.is_some())
    }

    fn warnings(&self) -> Vec<String> {
        self.seen
            .iter()
            .flat_map(|p| {
                p.warnings
                    .iter()
                    .map(move |w| format!("{}: {w}", p.name))
                    .chain(
                        p.sensitivity
                            .iter()
                            .map(move |s| format!("{}: parameter-sensitive ({s})", p.name)),
                    )
            })
            .collect()
    }
}

fn build_side(spec: &SideSpec, materials: &mut Materials) -> Result<PlateStack, CliError> {
    let extrapolate = |m: MaterialModel| match spec.extrapolation {
        Some(kind) => m.with_extrapolation(kind.into()),
        None => m,
    };
    let mut substrate = extrapolate(materials.load(&spec.substrate)?);
    if let Some(wp) = spec.plasma_frequency {
        if substrate.free_carriers().is_none() {
            return Err(CliError::Config(format!(
                "plasma_frequency set but '{}' has no free carriers",
                spec.substrate
            )));
        }
        substrate = substrate.with_plasma_frequency(wp);
    }
    let coating = if spec.coated {
        Some(GrapheneSheet::pristine().with_gap(spec.gap)?)
    } else {
        None
    };
    let mut stack = PlateStack::half_space(substrate).with_coating(coating);
    if let Some(film) = &spec.film {
        let material = extrapolate(materials.load(&film.material)?);
        stack = stack
            .with_film(material, film.thickness.meters())
            .with_film_recursion(match spec.film_recursion {
                Recursion::Simplified => FilmRecursion::Simplified,
                Recursion::Exact => FilmRecursion::Exact,
            });
    }
    stack.validate()?;
    Ok(stack)
}

fn quadrature(config: &RunConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: config.quadrature.rel_tol,
        abs_tol: config.quadrature.abs_tol,
        max_matsubara: config.quadrature.max_matsubara,
        trace: config.output.trace,
        ..Default::default()
    }
}

fn experiment(config: &RunConfig, materials: &mut Materials) -> Result<SphereExperiment, CliError> {
    let mut sphere = materials.load(&config.sphere.material)?;
    if let Some(kind) = config.sphere.extrapolation {
        sphere = sphere.with_extrapolation(kind.into());
    }
    let plate = build_side(&config.side1, materials)?;
    let mut exp = SphereExperiment::new(PlateStack::half_space(sphere), plate);
    exp.radius = config.sphere.radius.meters();
    exp.total_error = config.sphere.total_error;
    exp.temperature = config.temperature();
    exp.validate()?;
    Ok(exp)
}

/// Per-term rows (a, pairing, l, ζ_l, term) for the trace output.
fn trace_rows(label: &str, a: f64, result: &PressureResult) -> Vec<Vec<Cell>> {
    result
        .per_term_trace
        .iter()
        .flatten()
        .map(|t| {
            vec![
                a.into(),
                label.into(),
                t.l.into(),
                t.zeta.into(),
                t.pressure.into(),
            ]
        })
        .collect()
}

fn trace_table() -> Table {
    Table::new(["a_m", "pairing", "l", "zeta_l", "term_Pa"])
}

type TraceRows = Vec<Vec<Cell>>;

/// One row of a scan: its cells plus any trace rows, or an error message.
type RowOutcome = (CoreResult<Vec<Cell>>, TraceRows);

fn assemble(
    mut table: Table,
    grid: &[f64],
    outcomes: Vec<RowOutcome>,
    trace: bool,
) -> (Table, usize, Option<Table>) {
    let width = table.columns.len();
    let mut failed = 0;
    let mut trace_out = trace.then(trace_table);
    for (&a, (row, terms)) in grid.iter().zip(outcomes) {
        match row {
            Ok(cells) => table.push(cells),
            Err(e) => {
                failed += 1;
                let mut cells = vec![Cell::Num(a)];
                cells.resize(width - 1, Cell::Num(f64::NAN));
                cells.push(Cell::Text(e.to_string()));
                table.push(cells);
            }
        }
        if let Some(t) = trace_out.as_mut() {
            for r in terms {
                t.push(r);
            }
        }
    }
    (table, failed, trace_out)
}

fn ratio_error(num: &PressureResult, den: &PressureResult) -> f64 {
    let r = num.pressure / den.pressure;
    (r * (num.estimated_error / num.pressure.abs() + den.estimated_error / den.pressure.abs()))
        .abs()
}

/// The three pairings: uncoated, side 1 coated, both coated.
fn pairings(
    config: &RunConfig,
    materials: &mut Materials,
) -> Result<[(PlateStack, PlateStack); 3], CliError> {
    let bare = |s: &SideSpec| SideSpec {
        coated: false,
        ..s.clone()
    };
    let coated = |s: &SideSpec| SideSpec {
        coated: true,
        ..s.clone()
    };
    let (s1, s2) = (&config.side1, &config.side2);
    Ok([
        (
            build_side(&bare(s1), materials)?,
            build_side(&bare(s2), materials)?,
        ),
        (
            build_side(&coated(s1), materials)?,
            build_side(&bare(s2), materials)?,
        ),
        (
            build_side(&coated(s1), materials)?,
            build_side(&coated(s2), materials)?,
        ),
    ])
}

const PAIRING_LABELS: [&str; 3] = ["P", "P_g", "P_gg"];

fn evaluate_pairings(
    a: f64,
    t: f64,
    pairs: &[(PlateStack, PlateStack); 3],
    cfg: &QuadratureConfig,
) -> (CoreResult<[PressureResult; 3]>, Vec<Vec<Cell>>) {
    let mut results = Vec::with_capacity(3);
    let mut terms = Vec::new();
    for ((s1, s2), label) in pairs.iter().zip(PAIRING_LABELS) {
        match pressure(&Scenario::new(a, t, s1.clone(), s2.clone()), cfg) {
            Ok(r) => {
                terms.extend(trace_rows(label, a, &r));
                results.push(r);
            }
            Err(e) => return (Err(e), terms),
        }
    }
    let arr: [PressureResult; 3] = results.try_into().expect("three pairings");
    (Ok(arr), terms)
}

pub fn ratio_scan(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let pairs = pairings(config, &mut materials)?;
    let cfg = quadrature(config);
    let t = config.temperature();
    let flag = materials.sensitive();
    let grid = config.separations();
    let outcomes: Vec<RowOutcome> = grid
        .par_iter()
        .map(|&a| {
            let (res, terms) = evaluate_pairings(a, t, &pairs, &cfg);
            let row = res.map(|[p, pg, pgg]| {
                vec![
                    a.into(),
                    p.pressure.into(),
                    p.estimated_error.into(),
                    pg.pressure.into(),
                    pg.estimated_error.into(),
                    pgg.pressure.into(),
                    pgg.estimated_error.into(),
                    (pg.pressure / p.pressure).into(),
                    ratio_error(&pg, &p).into(),
                    (pgg.pressure / p.pressure).into(),
                    ratio_error(&pgg, &p).into(),
                    flag.into(),
                    "ok".into(),
                ]
            });
            (row, terms)
        })
        .collect();
    let table = Table::new([
        "a_m",
        "P_Pa",
        "P_err_Pa",
        "P_g_Pa",
        "P_g_err_Pa",
        "P_gg_Pa",
        "P_gg_err_Pa",
        "ratio_g",
        "ratio_g_err",
        "ratio_gg",
        "ratio_gg_err",
        "band_flag",
        "status",
    ]);
    let (table, failed_rows, trace) = assemble(table, &grid, outcomes, cfg.trace);
    Ok(Report {
        table,
        extra: json!({ "band_flag": flag }),
        warnings: materials.warnings(),
        materials: materials.seen,
        failed_rows,
        trace,
    })
}

pub fn pressure_scan(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let pairs = pairings(config, &mut materials)?;
    let cfg = quadrature(config);
    let t = config.temperature();
    let ideal = PlateStack::half_space(MaterialModel::PerfectConductor);
    let grid = config.separations();
    let outcomes: Vec<RowOutcome> = grid
        .par_iter()
        .map(|&a| {
            let (res, terms) = evaluate_pairings(a, t, &pairs, &cfg);
            let row = res.and_then(|[p, pg, pgg]| {
                let reference = pressure_t0(&Scenario::symmetric(a, 0.0, ideal.clone()), &cfg)?;
                Ok(vec![
                    a.into(),
                    p.pressure.abs().into(),
                    p.estimated_error.into(),
                    pg.pressure.abs().into(),
                    pg.estimated_error.into(),
                    pgg.pressure.abs().into(),
                    pgg.estimated_error.into(),
                    reference.pressure.abs().into(),
                    reference.estimated_error.into(),
                    "ok".into(),
                ])
            });
            (row, terms)
        })
        .collect();
    let table = Table::new([
        "a_m",
        "abs_P_Pa",
        "abs_P_err_Pa",
        "abs_P_g_Pa",
        "abs_P_g_err_Pa",
        "abs_P_gg_Pa",
        "abs_P_gg_err_Pa",
        "abs_P_ideal_T0_Pa",
        "abs_P_ideal_T0_err_Pa",
        "status",
    ]);
    let (table, failed_rows, trace) = assemble(table, &grid, outcomes, cfg.trace);
    Ok(Report {
        table,
        extra: json!({}),
        warnings: materials.warnings(),
        materials: materials.seen,
        failed_rows,
        trace,
    })
}

fn pfa_warnings(exp: &SphereExperiment, grid: &[f64]) -> Vec<String> {
    grid.iter()
        .filter_map(|&a| exp.pfa_warning(a))
        .take(1)
        .collect()
}

/// Gradient at both temperatures, with trace rows from the thermal sum.
fn gradients(
    a: f64,
    exp: &SphereExperiment,
    cfg: &QuadratureConfig,
) -> (CoreResult<[(f64, f64); 2]>, TraceRows) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let scenario = Scenario::new(a, exp.temperature, exp.plate.clone(), exp.sphere.clone());
    let hot = match pressure(&scenario, cfg) {
        Ok(r) => r,
        Err(e) => return (Err(e), Vec::new()),
    };
    let terms = trace_rows("F_T", a, &hot);
    let cold = match normalized_gradient(a, exp, cfg, Mode::ZeroTemperature) {
        Ok(c) => c,
        Err(e) => return (Err(e), terms),
    };
    let hot = (-two_pi * hot.pressure, two_pi * hot.estimated_error);
    (Ok([hot, (cold.value, cold.error)]), terms)
}

pub fn gradient_scan(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let exp = experiment(config, &mut materials)?;
    let cfg = quadrature(config);
    let grid = config.separations();
    let outcomes: Vec<RowOutcome> = grid
        .par_iter()
        .map(|&a| {
            let (res, terms) = gradients(a, &exp, &cfg);
            let row = res.map(|[(hot, hot_err), (cold, cold_err)]| {
                vec![
                    a.into(),
                    hot.into(),
                    hot_err.into(),
                    cold.into(),
                    cold_err.into(),
                    exp.pfa_warning(a).is_some().into(),
                    "ok".into(),
                ]
            });
            (row, terms)
        })
        .collect();
    let table = Table::new([
        "a_m",
        "grad_T_Pa",
        "grad_T_err_Pa",
        "grad_T0_Pa",
        "grad_T0_err_Pa",
        "pfa_warning",
        "status",
    ]);
    let (table, failed_rows, trace) = assemble(table, &grid, outcomes, cfg.trace);
    let mut warnings = materials.warnings();
    warnings.extend(pfa_warnings(&exp, &grid));
    Ok(Report {
        table,
        extra: json!({ "temperature_K": exp.temperature, "radius_m": exp.radius }),
        warnings,
        materials: materials.seen,
        failed_rows,
        trace,
    })
}

pub fn thermal_correction(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let exp = experiment(config, &mut materials)?;
    let cfg = quadrature(config);
    let grid = config.separations();
    let err = exp.total_error;
    let outcomes: Vec<RowOutcome> = grid
        .par_iter()
        .map(|&a| {
            let (res, terms) = gradients(a, &exp, &cfg);
            let row = res.and_then(|[(hot, hot_err), (cold, cold_err)]| {
                let delta = hot - cold;
                Ok(vec![
                    a.into(),
                    hot.into(),
                    cold.into(),
                    delta.into(),
                    (hot_err + cold_err).into(),
                    relative_from(hot, cold)?.into(),
                    err.into(),
                    (err / hot).into(),
                    (delta > err).into(),
                    "ok".into(),
                ])
            });
            (row, terms)
        })
        .collect();
    let table = Table::new([
        "a_m",
        "grad_T_Pa",
        "grad_T0_Pa",
        "delta_T_Pa",
        "delta_T_err_Pa",
        "rel_delta_T",
        "error_Pa",
        "rel_error",
        "above_error",
        "status",
    ]);
    let (table, failed_rows, trace) = assemble(table, &grid, outcomes, cfg.trace);
    let column = |name: &str| -> Vec<f64> {
        let i = table.column(name).expect("column exists");
        table
            .rows
            .iter()
            .map(|r| match r[i] {
                Cell::Num(v) => v,
                _ => f64::NAN,
            })
            .collect()
    };
    let deltas = column("delta_T_Pa");
    let crossing = find_crossing(&grid, &deltas, err);
    let max_ratio = deltas.iter().copied().fold(f64::NAN, f64::max) / err;
    let mut warnings = materials.warnings();
    warnings.extend(pfa_warnings(&exp, &grid));
    Ok(Report {
        extra: json!({
            "temperature_K": exp.temperature,
            "radius_m": exp.radius,
            "total_error_Pa": err,
            "crossover_m": crossing,
            "max_correction_over_error": if max_ratio.is_finite() { Some(max_ratio) } else { None },
        }),
        table,
        warnings,
        materials: materials.seen,
        failed_rows,
        trace,
    })
}

fn band_spec(config: &RunConfig) -> BandSpec {
    BandSpec {
        gaps: config.band.gaps.clone(),
        extrapolations: config
            .band
            .extrapolations
            .iter()
            .map(|&e| e.into())
            .collect(),
        substrate_plasma_frequencies: config.band.substrate_plasma_frequencies.clone(),
    }
}

pub fn band_compare(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let exp = experiment(config, &mut materials)?;
    let cfg = QuadratureConfig {
        trace: false,
        ..quadrature(config)
    };
    let band = band_spec(config);
    let overlay = config
        .band
        .overlay
        .as_deref()
        .map(load_overlay)
        .transpose()?;
    let grid: Vec<f64> = match &overlay {
        Some(points) => points.iter().map(|p| p.separation).collect(),
        None => config.separations(),
    };
    let hot = model_band(&grid, &exp, &band, &cfg, Mode::Thermal);
    let cold = model_band(&grid, &exp, &band, &cfg, Mode::ZeroTemperature);
    let (hot, cold) = match (hot, cold) {
        (Ok(h), Ok(c)) => (h, c),
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    let mut table = match overlay {
        Some(_) => Table::new([
            "a_m",
            "a_err_m",
            "grad_Pa",
            "grad_err_Pa",
            "band_T_min_Pa",
            "band_T_max_Pa",
            "band_T0_min_Pa",
            "band_T0_max_Pa",
            "band_err_Pa",
            "residual_T",
            "residual_T0",
        ]),
        None => Table::new([
            "a_m",
            "band_T_min_Pa",
            "band_T_max_Pa",
            "band_T0_min_Pa",
            "band_T0_max_Pa",
            "band_err_Pa",
        ]),
    };
    for (i, (h, c)) in hot.iter().zip(&cold).enumerate() {
        let err = h.error.max(c.error);
        let row = match &overlay {
            Some(points) => {
                let p = &points[i];
                vec![
                    p.separation.into(),
                    p.separation_error.into(),
                    p.gradient.into(),
                    p.gradient_error.into(),
                    h.min.into(),
                    h.max.into(),
                    c.min.into(),
                    c.max.into(),
                    err.into(),
                    band_residual(p, h.min, h.max).into(),
                    band_residual(p, c.min, c.max).into(),
                ]
            }
            None => vec![
                h.separation.into(),
                h.min.into(),
                h.max.into(),
                c.min.into(),
                c.max.into(),
                err.into(),
            ],
        };
        table.push(row);
    }
    let mut warnings = materials.warnings();
    warnings.extend(pfa_warnings(&exp, &grid));
    Ok(Report {
        table,
        extra: json!({ "band_corners": band.variants(&exp)?.len() }),
        warnings,
        materials: materials.seen,
        failed_rows: 0,
        trace: None,
    })
}

pub fn dump_eps(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let side = build_side(&config.side1, &mut materials)?;
    let s = &config.spectrum;
    let mut table = Table::new(["xi_eV", "eps"]);
    for xi in grid(s.xi_min, s.xi_max, s.points, Spacing::Log) {
        table.push(vec![xi.into(), side.substrate.eps(xi)?.into()]);
    }
    Ok(Report {
        table,
        extra: json!({ "material": config.side1.substrate }),
        warnings: materials.warnings(),
        materials: materials.seen,
        failed_rows: 0,
        trace: None,
    })
}

pub fn dump_reflection(config: &RunConfig) -> Result<Report, CliError> {
    let mut materials = Materials::default();
    let side = build_side(&config.side1, &mut materials)?;
    let a = config.separations()[0];
    let t = config.temperature();
    let ctx = DimensionlessContext::new(a, t, 0.0)?;
    let s = &config.spectrum;
    let offsets = grid(s.y_min, s.y_max, s.points, Spacing::Log);
    let (policy, frequencies): (TensorPolicy, Vec<(usize, f64)>) = if t == 0.0 {
        (
            TensorPolicy::ZeroTemperature,
            (1..=s.matsubara_max.max(1))
                .map(|l| (l, l as f64))
                .collect(),
        )
    } else {
        (
            TensorPolicy::Matsubara,
            (0..=s.matsubara_max)
                .map(|l| (l, ctx.tau * l as f64))
                .collect(),
        )
    };
    let mut table = Table::new(["l", "zeta", "y", "r_tm", "r_te"]);
    for (l, zeta) in frequencies {
        let at = StackAtFrequency::new(&side, zeta, &ctx, policy)?;
        for &dy in &offsets {
            let r = at.reflect(zeta + dy)?;
            table.push(vec![
                l.into(),
                zeta.into(),
                (zeta + dy).into(),
                r.r_tm.into(),
                r.r_te.into(),
            ]);
        }
    }
    Ok(Report {
        table,
        extra: json!({ "separation_m": a, "temperature_K": t, "zero_temperature_frequencies": t == 0.0 }),
        warnings: materials.warnings(),
        materials: materials.seen,
        failed_rows: 0,
        trace: None,
    })
}

impl From<CasimirError> for CliError {
    fn from(e: CasimirError) -> Self {
        match e {
            CasimirError::Convergence { .. } | CasimirError::Integration { .. } => {
                CliError::Convergence(e.to_string())
            }
            CasimirError::MaterialData { .. } | CasimirError::Io { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}
