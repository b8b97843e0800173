use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::barriers::{pancake_margin, pancake_radius, sphere_window, CheckOutcome, PancakeConstants};
use crate::diagnostics::{bowl_asymptotic_check, fit_translation, FitWindow, TranslationFit};
use crate::grid::{d1, d2, hessian, observed_order, Field, Geometry, Grid1D, Grid2D};
use crate::translators::{bowl_profile, load_profile, read_table, translator_residual, TranslatorProfile};
use crate::{Error, Result};

use super::config::{Overrides, ScenarioConfig};
use super::scenario::run_scenario;

/// `(n, lambda, T, T0, C, R, Q)` evaluated independently at 20 significant digits.
pub const PANCAKE_REFERENCE: [(usize, f64, f64, f64, f64, f64, f64); 20] = [
    (1, 0.1, 0.0, 1.0, 0.0, 16.707963267948966192, 1.0),
    (1, 0.25, 0.5, 0.5, 1.2, 10.615763892479654118, 4.1415926535897932385),
    (1, 0.5, 1.0, 2.0, 0.3, 13.661863580214310155, 4.1415926535897932385),
    (1, 0.75, 2.5, 1.5, 2.0, 15.568497824107142715, 6.2359877559829887308),
    (2, 0.1, 7.0, 1.0, -0.7, 237.09795700078840234, 110.99986999567329366),
    (2, 0.25, 0.0, 0.5, 0.0, 4.6162892933420252922, 1.1103178000763257967),
    (2, 0.5, 0.5, 2.0, 1.2, 11.885206656107800813, 2.7914319269475482126),
    (2, 0.75, 1.0, 1.5, 0.3, 9.7777184258219267309, 3.4253485026221728824),
    (3, 0.1, 2.5, 1.0, 2.0, 96.304580533976943895, 40.358162409933476118),
    (3, 0.25, 7.0, 0.5, -0.7, 94.016015325834288779, 45.202932750409756932),
    (3, 0.5, 0.0, 2.0, 0.0, 9.1819718661885146919, 1.4412712003053031868),
    (3, 0.75, 0.5, 1.5, 1.2, 9.0958304704111740365, 2.7091043516545525263),
    (4, 0.1, 1.0, 1.0, 0.3, 49.404822494640780769, 16.840344628040557148),
    (4, 0.25, 2.5, 0.5, 2.0, 38.444829651975860973, 17.038916668177943582),
    (4, 0.5, 7.0, 2.0, -0.7, 55.876565776995295008, 23.653055375586507449),
    (4, 0.75, 0.0, 1.5, 0.0, 6.8402162248126127212, 1.9928602006869321703),
    (5, 0.1, 0.5, 1.0, 1.2, 34.071515530148455268, 9.0304901140966043709),
    (5, 0.25, 1.0, 0.5, 0.3, 19.679096307339015303, 7.7244565074848896637),
    (5, 0.5, 2.5, 2.0, 2.0, 29.020408817182103744, 9.7365240345850894697),
    (5, 0.75, 7.0, 1.5, -0.7, 41.187301010133179662, 16.984579317668278007),
];

pub const SUITES: [&str; 3] = ["formulas", "operators", "profiles"];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn order_check(name: &str, coarse: f64, fine: f64) -> CheckOutcome {
    let p = observed_order(coarse, fine);
    let status = if (1.9..=2.1).contains(&p) {
        crate::barriers::CheckStatus::Pass
    } else {
        crate::barriers::CheckStatus::Fail
    };
    CheckOutcome::new(name, status, p, 2.0, format!("errors {coarse:.3e} -> {fine:.3e}"))
}

fn formulas() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for &(n, lambda, t, t0, c, r, q) in &PANCAKE_REFERENCE {
        let pc = PancakeConstants { t0, c };
        worst = worst.max(rel(pancake_radius(n, lambda, t, pc)?, r));
        worst = worst.max(rel(pancake_margin(n, lambda, t)?, q));
    }
    out.push(CheckOutcome::at_most("pancake_reference_table", worst, 1e-12, "20 points, relative error of R and Q"));
    let mut n1 = 0.0f64;
    for &(lambda, t) in &[(0.1, 0.0), (0.3, 1.0), (0.9, 5.0)] {
        let pc = PancakeConstants::default();
        let closed = PI * (2.0 * t + pc.t0) / (2.0 * lambda) + 1.0;
        n1 = n1.max((pancake_radius(1, lambda, t, pc)? - closed).abs());
        n1 = n1.max((pancake_margin(1, lambda, t)? - (PI * t / (2.0 * lambda) + 1.0)).abs());
    }
    out.push(CheckOutcome::at_most("pancake_n1_log_term", n1, 0.0, "n = 1 drops the logarithmic terms"));
    let w = sphere_window(0.5, 0.2, 2)?;
    out.push(CheckOutcome::at_most("sphere_window", (w - 0.005).abs(), 1e-15, "delta^2/(4n) at delta=0.2, n=2"));
    Ok(out)
}

fn operators() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let g = Grid1D::new(-1.0, 1.0, 40)?;
    let q = Field::sample_interval(g, |x| 3.0 * x * x - x + 2.0)?;
    let e1 = d1(&q, 0)?.values().iter().zip(g.nodes()).map(|(v, x)| (v - (6.0 * x - 1.0)).abs()).fold(0.0, f64::max);
    let e2 = d2(&q, 0)?.values().iter().map(|v| (v - 6.0).abs()).fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("quadratic_exactness_1d", e1.max(e2), 1e-10, "first and second differences"));
    let slab = Grid2D::new(Grid1D::new(-1.0, 1.0, 20)?, Grid1D::new(-0.5, 0.5, 10)?);
    let f = Field::sample_slab(slab, |x, y| x * x + 3.0 * x * y - 2.0 * y * y + x - y)?;
    let (a11, a12, a22) = hessian(&f)?;
    let e = a11.values().iter().map(|v| (v - 2.0).abs())
        .chain(a12.values().iter().map(|v| (v - 3.0).abs()))
        .chain(a22.values().iter().map(|v| (v + 4.0).abs()))
        .fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("quadratic_exactness_2d", e, 1e-9, "Hessian of a quadratic"));
    let errs: Vec<f64> = [100, 200]
        .iter()
        .map(|&n| {
            let g = Grid1D::new(0.0, 1.0, n)?;
            let f = Field::sample_interval(g, |x| (3.0 * x).sin())?;
            let d = d2(&f, 0)?;
            Ok((1..n).map(|i| (d.values()[i] + 9.0 * (3.0 * g.node(i)).sin()).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    out.push(order_check("second_difference_order", errs[0], errs[1]));
    Ok(out)
}

fn profiles() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let grim: Vec<f64> = [0.005, 0.0025]
        .iter()
        .map(|&h| {
            let f = TranslatorProfile::GrimReaper.sample_on(&Geometry::Interval(Grid1D::with_spacing(-1.3, 1.3, h)?))?;
            Ok(translator_residual(&f)?.sup_abs())
        })
        .collect::<Result<_>>()?;
    out.push(order_check("grim_reaper_residual_order", grim[0], grim[1]));
    let plane = TranslatorProfile::grim_reaper_plane(0.9 * PI)?;
    let tilted: Vec<f64> = [0.0125, 0.00625]
        .iter()
        .map(|&h| {
            let f = plane.sample_on(&Geometry::Slab(Grid2D::slab(0.9 * PI, 0.4, 2.0, h)?))?;
            Ok(translator_residual(&f)?.sup_abs())
        })
        .collect::<Result<_>>()?;
    out.push(order_check("tilted_plane_residual_order", tilted[0], tilted[1]));
    let bowl = bowl_profile(2, 20.0, 0.0025)?;
    out.push(CheckOutcome::at_most(
        "bowl_table_residual",
        bowl.residual_sup().unwrap_or(f64::INFINITY),
        1e-6,
        "m=2, r_max=20",
    ));
    let curvature = bowl.eval(&[0.0])?.jet.d2u[0][0];
    out.push(CheckOutcome::at_most("bowl_origin_curvature", (curvature - 0.5).abs(), 1e-6, "u''(0) = 1/m"));
    let plateau = bowl_asymptotic_check(&bowl, 2)?;
    out.push(CheckOutcome::at_most(
        "bowl_plateau",
        plateau.total_variation,
        1e-2,
        format!("variation of ubar - r^2/2 + ln r on [10, 20], plateau {:.6}", plateau.plateau),
    ));
    Ok(out)
}

/// Run a named invariant suite. Unknown names are configuration errors.
pub fn check_suite(name: &str) -> Result<Vec<CheckOutcome>> {
    match name {
        "formulas" => formulas(),
        "operators" => operators(),
        "profiles" => profiles(),
        "all" => {
            let mut v = formulas()?;
            v.extend(operators()?);
            v.extend(profiles()?);
            Ok(v)
        }
        other => Err(Error::Config(format!("unknown suite {other:?}; known: formulas, operators, profiles, all"))),
    }
}

/// One row of a sweep summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub name: String,
    pub source: Option<PathBuf>,
    pub passed: bool,
    pub failed_checks: Vec<String>,
    pub abort: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// 2 if any scenario failed to configure, else 3 on any abort, else 1 on any failure.
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| r.error.is_some()) {
            2
        } else if self.rows.iter().any(|r| r.abort.is_some()) {
            3
        } else if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::from("scenario,status,failed_checks\n");
        for r in &self.rows {
            let status = match (&r.error, &r.abort, r.passed) {
                (Some(_), _, _) => "config_error",
                (_, Some(_), _) => "abort",
                (_, _, true) => "pass",
                _ => "fail",
            };
            out.push_str(&format!("{},{},{}\n", r.name, status, r.failed_checks.join(";")));
        }
        out
    }
}

/// Run scenarios one after another; a failing scenario does not stop the rest.
pub fn sweep(configs: &[ScenarioConfig]) -> Result<SweepSummary> {
    let mut outputs: Vec<&Path> = configs.iter().filter_map(|c| c.output.as_deref()).collect();
    outputs.sort();
    if outputs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("sweep scenarios must write to distinct output directories".into()));
    }
    let rows = configs
        .iter()
        .map(|cfg| match run_scenario(cfg) {
            Ok(b) => SweepRow {
                name: cfg.name.clone(),
                source: None,
                passed: b.passed(),
                failed_checks: b.checks.iter().filter(|c| c.failed()).map(|c| c.outcome.name.clone()).collect(),
                abort: b.abort.clone(),
                error: None,
            },
            Err(e) => SweepRow {
                name: cfg.name.clone(),
                source: None,
                passed: false,
                failed_checks: Vec::new(),
                abort: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SweepSummary { rows })
}

/// Load every `*.toml` in `dir` (sorted by file name) and sweep them. With an
/// `out` override each scenario writes into `out/<name>`.
pub fn sweep_dir(dir: &Path, overrides: &Overrides) -> Result<SweepSummary> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut configs = Vec::new();
    let mut broken = Vec::new();
    for p in &paths {
        let loaded = ScenarioConfig::load(p).and_then(|mut c| {
            let mut o = overrides.clone();
            o.out = overrides.out.as_ref().map(|d| d.join(&c.name));
            c.apply(&o)?;
            Ok(c)
        });
        match loaded {
            Ok(c) => configs.push((p.clone(), c)),
            Err(e) => broken.push(SweepRow {
                name: p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                source: Some(p.clone()),
                passed: false,
                failed_checks: Vec::new(),
                abort: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let list: Vec<ScenarioConfig> = configs.iter().map(|(_, c)| c.clone()).collect();
    let mut summary = sweep(&list)?;
    for (row, (p, _)) in summary.rows.iter_mut().zip(&configs) {
        row.source = Some(p.clone());
    }
    summary.rows.extend(broken);
    Ok(summary)
}

/// Profile named on the command line: `grim-reaper`, `tilted:<b>`, or a table path.
pub fn profile_from_spec(spec: &str) -> Result<TranslatorProfile> {
    if spec == "grim-reaper" {
        return Ok(TranslatorProfile::GrimReaper);
    }
    if let Some(b) = spec.strip_prefix("tilted:") {
        let b: f64 = b.parse().map_err(|_| Error::Config(format!("bad slab half-width in {spec:?}")))?;
        return TranslatorProfile::grim_reaper_plane(b);
    }
    load_profile(Path::new(spec))
}

/// Fit a saved snapshot table against a profile. The snapshot time is read
/// from the table's `t` key (0 when absent).
pub fn fit_snapshot(path: &Path, profile: &TranslatorProfile, window: Option<FitWindow>, c1_bracket: Option<f64>) -> Result<(f64, TranslationFit)> {
    let (meta, field) = read_table(path)?;
    let t = match meta.extra("t") {
        Some(v) => v.parse().map_err(|_| Error::Table(format!("bad snapshot time {v:?}")))?,
        None => 0.0,
    };
    let window = window.unwrap_or_else(|| super::config::default_window(field.geometry()));
    Ok((t, fit_translation(&field, profile, t, &window, c1_bracket)?))
}
