//! Values computed offline at 30 digits and frozen here.

use std::f64::consts::{FRAC_PI_2, PI};

use mcf_lab::barriers::{pancake_margin, pancake_radius, PancakeConstants};
use mcf_lab::diagnostics::{entropy_estimate, phi_of_state, CurveSample};
use mcf_lab::experiments::suites::PANCAKE_REFERENCE;
use mcf_lab::experiments::{prepare, ScenarioConfig};
use mcf_lab::translators::{tilt_angle, tilted_grim_reaper, TranslatorProfile};

const GRIM_BUMP: &str = r#"
name = "frozen"
kind = "grim_reaper_1d"
c0_budget = 0.2
[geometry]
h = 0.0025
a = 1.45
[perturbation]
type = "bump"
amplitude = 0.2
center = [0.0]
width = 0.6
[solver]
t_end = 1.0
"#;

#[test]
fn pancake_table_spot_values() {
    let spots = [
        (2, 0.1, 7.0, 1.0, -0.7, 237.09795700078840234, 110.99986999567329366),
        (3, 0.25, 7.0, 0.5, -0.7, 94.016015325834288779, 45.202932750409756932),
        (5, 0.5, 2.5, 2.0, 2.0, 29.020408817182103744, 9.7365240345850894697),
    ];
    for (n, lambda, t, t0, c, r, q) in spots {
        let pc = PancakeConstants { t0, c };
        assert!((pancake_radius(n, lambda, t, pc).unwrap() / r - 1.0).abs() < 1e-12);
        assert!((pancake_margin(n, lambda, t).unwrap() / q - 1.0).abs() < 1e-12);
    }
    for &(n, lambda, t, t0, c, r, q) in &PANCAKE_REFERENCE {
        let pc = PancakeConstants { t0, c };
        assert!((pancake_radius(n, lambda, t, pc).unwrap() / r - 1.0).abs() < 1e-12, "R at n={n} lambda={lambda}");
        assert!((pancake_margin(n, lambda, t).unwrap() / q - 1.0).abs() < 1e-12, "Q at n={n} lambda={lambda}");
    }
}

#[test]
fn tilt_of_the_wing_slab() {
    let theta = tilt_angle(FRAC_PI_2 + 0.3).unwrap();
    assert!((theta - 0.574175368152480537).abs() < 1e-14);
    assert!((theta.tan() - 0.646875173068027402).abs() < 1e-14);
    assert!((tilt_angle(0.9 * PI).unwrap().tan() - 1.49666295470957655).abs() < 1e-13);
}

#[test]
fn tilted_plane_value() {
    let jet = tilted_grim_reaper(0.5, 0.3, 0.9 * PI).unwrap();
    assert!((jet.u - 0.793541367029471512).abs() < 1e-14);
}

#[test]
fn vertical_shift_target_of_the_reference_bump() {
    let cfg = ScenarioConfig::from_toml(GRIM_BUMP).unwrap();
    let prep = prepare(&cfg).unwrap();
    let phi = phi_of_state(&prep.initial, &TranslatorProfile::GrimReaper).unwrap();
    // the cosine-squared bump integrates to amplitude * width
    assert!((phi - 0.0381971863420548806).abs() < 1e-12, "phi(0) = {phi}");
}

#[test]
fn circle_shrinker_entropy() {
    let circle = CurveSample::circle([0.0, 0.0], 2f64.sqrt(), 512).unwrap();
    let e = entropy_estimate(&circle).unwrap();
    assert!((e.value - 1.52034690106628081).abs() < 1e-6, "{}", e.value);
    assert!((e.t - 1.0).abs() < 1e-3 && e.x0[0].hypot(e.x0[1]) < 1e-3);
}
