use proptest::prelude::*;

use cge_core::engine::{pressure, QuadratureConfig, Scenario};
use cge_core::graphene::{
    f_func, phi_func, x_integrals, DimensionlessContext, GrapheneSheet, XRange,
};
use cge_core::material::{load_material, Extrapolation, MaterialModel, OscillatorSet};
use cge_core::reflection::{r_stack, FilmRecursion, PlateStack, SpectralPoint, TensorPolicy};
use cge_core::sphere_plate::{
    find_crossing, model_band, normalized_gradient, relative_thermal_correction,
    thermal_correction, BandSpec, Mode, SphereExperiment,
};

const V: f64 = 0.003;

fn constant(eps: f64) -> MaterialModel {
    MaterialModel::Oscillators(OscillatorSet::new(eps, Vec::new()).unwrap())
}

fn stacks(eps: f64, delta: f64) -> Vec<PlateStack> {
    let sheet = GrapheneSheet::new(delta, V).unwrap();
    let gold = load_material("gold").unwrap().model;
    vec![
        PlateStack::half_space(constant(eps)),
        PlateStack::coated(constant(eps), sheet),
        PlateStack::coated(gold.clone(), sheet),
        PlateStack::coated(gold.with_extrapolation(Extrapolation::Plasma), sheet),
        PlateStack::coated(load_material("silicon-doped").unwrap().model, sheet)
            .with_film(constant(eps), 300e-9),
        PlateStack::coated(load_material("silicon-doped").unwrap().model, sheet)
            .with_film(constant(eps), 300e-9)
            .with_film_recursion(FilmRecursion::Exact),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_coefficients_are_bounded(
        zeta in prop_oneof![Just(0.0), 1e-4f64..40.0],
        dy in 1e-6f64..40.0,
        eps in 1.0f64..50.0,
        delta in 0.0f64..0.1,
        a in 50e-9f64..6e-6,
    ) {
        let ctx = DimensionlessContext::new(a, 300.0, 0.0).unwrap();
        let point = SpectralPoint::new(zeta, zeta + dy).unwrap();
        for stack in stacks(eps, delta) {
            let r = r_stack(point, &stack, &ctx, TensorPolicy::Matsubara).unwrap();
            prop_assert!(r.r_tm.abs() <= 1.0 + 1e-12 && r.r_te.abs() <= 1.0 + 1e-12, "{r:?}");
        }
    }

    #[test]
    fn permittivity_decreases_along_imaginary_axis(lo in -3.0f64..2.0, step in 0.01f64..1.0) {
        let (x1, x2) = (10f64.powf(lo), 10f64.powf(lo + step));
        for name in ["gold", "silicon", "silicon-doped", "fused-silica", "sapphire", "mica"] {
            for kind in [Extrapolation::Drude, Extrapolation::Plasma] {
                let m = load_material(name).unwrap().model.with_extrapolation(kind);
                let (e1, e2) = (m.eps(x1).unwrap(), m.eps(x2).unwrap());
                prop_assert!(e2 <= e1 && e2 >= 1.0, "{name} {kind:?}: {e1} -> {e2}");
            }
        }
    }

    #[test]
    fn folded_x_range_equals_full_range(
        y in 1e-3f64..100.0,
        tau in 1e-3f64..20.0,
        dt in 0.0f64..1.0,
    ) {
        let folded = x_integrals(y, tau, dt, V, XRange::Folded).unwrap();
        let full = x_integrals(y, tau, dt, V, XRange::Full).unwrap();
        let rel = |p: f64, q: f64| ((p - q) / q).abs();
        prop_assert!(rel(folded.pi00_bracket, full.pi00_bracket) < 1e-12);
        prop_assert!(rel(folded.combo_integral, full.combo_integral) < 1e-12);
    }

    #[test]
    fn gapless_phi_is_pi_f(zeta in 1e-6f64..100.0, dy in 0.0f64..100.0) {
        let f = f_func(zeta, zeta + dy, V);
        let phi = phi_func(zeta, zeta + dy, 0.0, V).unwrap();
        prop_assert!((phi - std::f64::consts::PI * f).abs() <= 1e-12 * phi);
    }

    #[test]
    fn phi_grows_toward_gapless_value(zeta in 1e-3f64..50.0, dt in 1e-6f64..5.0) {
        let f = f_func(zeta, 2.0 * zeta, V);
        let phi = phi_func(zeta, 2.0 * zeta, dt, V).unwrap();
        prop_assert!(phi > 0.0 && phi <= std::f64::consts::PI * f * (1.0 + 1e-12));
    }
}

fn pressures(m: &MaterialModel, a: f64, cfg: &QuadratureConfig) -> (f64, f64, f64) {
    let sheet = GrapheneSheet::pristine();
    let bare = PlateStack::half_space(m.clone());
    let coated = PlateStack::coated(m.clone(), sheet);
    let p = pressure(&Scenario::symmetric(a, 300.0, bare.clone()), cfg).unwrap();
    let pg = pressure(&Scenario::new(a, 300.0, coated.clone(), bare), cfg).unwrap();
    let pgg = pressure(&Scenario::symmetric(a, 300.0, coated), cfg).unwrap();
    (p.pressure, pg.pressure, pgg.pressure)
}

#[test]
fn coating_strengthens_attraction_for_dielectrics() {
    let cfg = QuadratureConfig::default();
    for name in ["silicon", "sapphire", "mica", "fused-silica"] {
        let m = load_material(name).unwrap().model;
        let mut last = f64::INFINITY;
        for a in [100e-9, 300e-9, 1e-6, 3e-6] {
            let (p, pg, pgg) = pressures(&m, a, &cfg);
            assert!(p < 0.0, "{name} at {a}");
            assert!(
                pgg.abs() >= pg.abs() && pg.abs() >= p.abs(),
                "{name} at {a}"
            );
            assert!(p.abs() < last, "{name}: |P| not decreasing at {a}");
            last = p.abs();
        }
    }
}

#[test]
fn coating_effect_grows_as_static_permittivity_falls() {
    let cfg = QuadratureConfig::default();
    let ratio = |name: &str| {
        let (p, pg, _) = pressures(&load_material(name).unwrap().model, 1e-6, &cfg);
        pg / p
    };
    let r: Vec<f64> = ["silicon", "sapphire", "mica", "fused-silica"]
        .iter()
        .map(|n| ratio(n))
        .collect();
    assert!(r.windows(2).all(|w| w[0] < w[1]), "{r:?}");
}

#[test]
fn truncation_and_quadrature_errors_are_sound() {
    let gold = load_material("gold").unwrap().model;
    let s = Scenario::new(
        300e-9,
        300.0,
        PlateStack::coated(
            load_material("fused-silica").unwrap().model,
            GrapheneSheet::pristine(),
        ),
        PlateStack::half_space(gold),
    );
    let coarse = pressure(&s, &QuadratureConfig::default()).unwrap();
    let fine = pressure(
        &s,
        &QuadratureConfig {
            rel_tol: 1e-10,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(fine.matsubara_terms_used > coarse.matsubara_terms_used);
    assert!((fine.pressure - coarse.pressure).abs() <= coarse.estimated_error);
    assert!(coarse.estimated_error <= 1e-7 * coarse.pressure.abs());
}

#[test]
fn pressure_is_deterministic_across_runs() {
    let s = Scenario::symmetric(
        200e-9,
        300.0,
        PlateStack::coated(
            load_material("fused-silica").unwrap().model,
            GrapheneSheet::pristine(),
        ),
    );
    let cfg = QuadratureConfig::default();
    let a = pressure(&s, &cfg).unwrap();
    let b = pressure(&s, &cfg).unwrap();
    assert_eq!(a, b);
}

fn silica_experiment() -> SphereExperiment {
    SphereExperiment::new(
        PlateStack::half_space(load_material("gold").unwrap().model),
        PlateStack::coated(
            load_material("fused-silica").unwrap().model,
            GrapheneSheet::pristine(),
        ),
    )
}

#[test]
fn graphene_on_silica_has_positive_decreasing_thermal_correction() {
    let exp = silica_experiment();
    let cfg = QuadratureConfig::default();
    let grid: Vec<f64> = (0..9).map(|k| 200e-9 + 100e-9 * k as f64).collect();
    let mut last = f64::INFINITY;
    for &a in &grid {
        let c = thermal_correction(a, &exp, &cfg).unwrap();
        assert!(c.value > 0.0 && c.value < last, "at {a}: {c:?}");
        last = c.value;
        let rel = relative_thermal_correction(a, &exp, &cfg).unwrap();
        assert!(rel > 0.0 && rel < 1.0);
    }
    let hot: Vec<f64> = grid
        .iter()
        .map(|&a| {
            normalized_gradient(a, &exp, &cfg, Mode::Thermal)
                .unwrap()
                .value
        })
        .collect();
    assert!(hot.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn relative_crossing_coincides_with_absolute_crossing() {
    let exp = silica_experiment();
    let cfg = QuadratureConfig::default();
    let grid: Vec<f64> = (0..9).map(|k| 200e-9 + 50e-9 * k as f64).collect();
    let mut abs = Vec::new();
    let mut rel = Vec::new();
    let mut err_line = Vec::new();
    for &a in &grid {
        let hot = normalized_gradient(a, &exp, &cfg, Mode::Thermal)
            .unwrap()
            .value;
        let cold = normalized_gradient(a, &exp, &cfg, Mode::ZeroTemperature)
            .unwrap()
            .value;
        abs.push(hot - cold);
        rel.push((hot - cold) / hot);
        err_line.push(exp.total_error / hot);
    }
    let diff: Vec<f64> = rel.iter().zip(&err_line).map(|(r, e)| r - e).collect();
    let relative = find_crossing(&grid, &diff, 0.0).unwrap();
    let absolute = find_crossing(&grid, &abs, exp.total_error).unwrap();
    assert!(
        (relative - absolute).abs() < 10e-9,
        "{relative} vs {absolute}"
    );
}

#[test]
fn thicker_film_moves_toward_half_space() {
    let gold = load_material("gold").unwrap().model;
    let silica = load_material("fused-silica").unwrap().model;
    let si = load_material("silicon-doped").unwrap().model;
    let cfg = QuadratureConfig::default();
    let half = silica_experiment();
    let with_film = |d: f64| {
        SphereExperiment::new(
            PlateStack::half_space(gold.clone()),
            PlateStack::coated(si.clone(), GrapheneSheet::pristine()).with_film(silica.clone(), d),
        )
    };
    for a in [250e-9, 400e-9] {
        let target = thermal_correction(a, &half, &cfg).unwrap().value;
        let gaps: Vec<f64> = [300e-9, 600e-9, 1e-6, 2e-6]
            .iter()
            .map(|&d| (thermal_correction(a, &with_film(d), &cfg).unwrap().value - target).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "at {a}: {gaps:?}");
    }
}

#[test]
fn band_contains_central_curve_and_widens_at_zero_temperature() {
    let gold = load_material("gold").unwrap().model;
    let silica = load_material("fused-silica").unwrap().model;
    let si = load_material("silicon-doped").unwrap().model;
    let exp = SphereExperiment::new(
        PlateStack::half_space(gold),
        PlateStack::coated(si, GrapheneSheet::pristine()).with_film(silica, 300e-9),
    );
    let band = BandSpec {
        substrate_plasma_frequencies: vec![0.2, 0.3],
        ..Default::default()
    };
    let cfg = QuadratureConfig::default();
    let grid = [250e-9, 400e-9];
    let hot = model_band(&grid, &exp, &band, &cfg, Mode::Thermal).unwrap();
    let cold = model_band(&grid, &exp, &band, &cfg, Mode::ZeroTemperature).unwrap();
    for (i, &a) in grid.iter().enumerate() {
        let central = normalized_gradient(a, &exp, &cfg, Mode::Thermal)
            .unwrap()
            .value;
        assert!(hot[i].min <= central && central <= hot[i].max);
        assert!(cold[i].max < hot[i].min, "T = 0 band must lie below at {a}");
        assert!(cold[i].max - cold[i].min > hot[i].max - hot[i].min);
    }
}

#[test]
fn gap_band_is_narrow_at_room_temperature() {
    let exp = silica_experiment();
    let band = BandSpec {
        extrapolations: Vec::new(),
        ..Default::default()
    };
    let b = model_band(
        &[300e-9],
        &exp,
        &band,
        &QuadratureConfig::default(),
        Mode::Thermal,
    )
    .unwrap();
    assert!((b[0].max - b[0].min) / b[0].max < 0.03, "{:?}", b[0]);
}
