use std::path::Path;

use mcf_lab::diagnostics::phi_of_state;
use mcf_lab::experiments::{prepare, run_scenario, sweep, Overrides, ScenarioConfig, ScenarioKind};
use mcf_lab::translators::TranslatorProfile;
use mcf_lab::Error;

fn one_d(perturbation: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml(&format!(
        r#"
name = "t"
kind = "grim_reaper_1d"
c0_budget = 0.3
[geometry]
h = 0.01
{perturbation}
[solver]
dt_safety = 0.9
t_end = 0.3
snapshots = 6
"#
    ))
    .unwrap()
}

fn phi0(cfg: &ScenarioConfig) -> f64 {
    phi_of_state(&prepare(cfg).unwrap().initial, &TranslatorProfile::GrimReaper).unwrap()
}

#[test]
fn bundled_scenarios_load_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            let cfg = ScenarioConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            cfg.validate().unwrap();
            assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

#[test]
fn shift_targets_add_over_bumps() {
    let a = "[[perturbation]]\ntype = \"bump\"\namplitude = 0.1\ncenter = [-0.5]\nwidth = 0.3\n";
    let b = "[[perturbation]]\ntype = \"bump\"\namplitude = 0.08\ncenter = [0.4]\nwidth = 0.4\n";
    let both = phi0(&one_d(&format!("{a}{b}")));
    assert!((both - phi0(&one_d(a)) - phi0(&one_d(b))).abs() < 1e-14);
    assert!((both - (0.1 * 0.3 + 0.08 * 0.4) / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn antisymmetric_data_has_zero_target_and_small_shift() {
    let pair = "[[perturbation]]\ntype = \"bump\"\namplitude = 0.1\ncenter = [-0.5]\nwidth = 0.3\n\
                [[perturbation]]\ntype = \"bump\"\namplitude = -0.1\ncenter = [0.5]\nwidth = 0.3\n";
    let mut cfg = one_d(pair);
    cfg.solver.t_end = 4.0;
    assert!(phi0(&cfg).abs() < 1e-15);
    let bundle = run_scenario(&cfg).unwrap();
    assert!(bundle.passed(), "{}", bundle.summary());
    // the limit shift is phi(0) = 0; 5 h^2 as in the c0 check
    assert!(bundle.final_fit.unwrap().c0.abs() <= 5e-4);
}

#[test]
fn budget_overrun_is_a_config_error() {
    let cfg = one_d("[perturbation]\ntype = \"bump\"\namplitude = 0.5\nwidth = 0.3\n");
    assert!(matches!(prepare(&cfg), Err(Error::Config(_))));
}

#[test]
fn overrides_apply_and_seed_changes_the_ripple() {
    let mut cfg = one_d("[perturbation]\ntype = \"fourier\"\nseed = 1\nn_modes = 4\namplitude = 0.1\n");
    let before = prepare(&cfg).unwrap().initial.field;
    cfg.apply(&Overrides { seed: Some(2), h: Some(0.01), t_end: Some(0.2), out: None }).unwrap();
    assert_eq!(cfg.solver.t_end, 0.2);
    let after = prepare(&cfg).unwrap().initial.field;
    assert_ne!(before.values(), after.values());
}

#[test]
fn sweeps_need_distinct_outputs() {
    let mut a = one_d("");
    a.output = Some("/tmp/same".into());
    let b = a.clone();
    assert!(matches!(sweep(&[a, b]), Err(Error::Config(_))));
}

#[test]
fn kinds_round_trip_by_name() {
    for k in [ScenarioKind::GrimReaper1d, ScenarioKind::Slab2dPlane, ScenarioKind::RadialBowl, ScenarioKind::DeltaWingExtract] {
        let text = format!("name = \"x\"\nkind = \"{}\"\n", k.as_str());
        let err = ScenarioConfig::from_toml(&text).unwrap_err().to_string();
        assert!(!err.contains("unknown variant"), "{err}");
    }
}
