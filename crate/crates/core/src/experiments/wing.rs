use std::f64::consts::FRAC_PI_2;

use crate::barriers::CheckOutcome;
use crate::diagnostics::{convexity_check, DiagnosticsRecord};
use crate::grid::{bilinear, d1, Field, Geometry, Grid2D};
use crate::solver::{cfl_dt, evolve, BoundaryPolicy, Face, FaceCondition, FlowState, SolverConfig, Trajectory};
use crate::translators::{tilt_angle, translator_residual, TableMeta, Tabulated, TranslatorProfile};
use crate::{Error, Result};

use super::config::{ScenarioConfig, ScenarioKind};
use super::scenario::{CheckLine, ReportBundle};

/// Residual a wing table must reach on the certification window.
pub const WING_RESIDUAL_TARGET: f64 = 1e-3;

/// Extraction parameters. `levels` run coarse to fine as `(h, duration)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WingParams {
    pub delta: f64,
    pub l: f64,
    pub seed_ell: f64,
    pub levels: Vec<(f64, f64)>,
    pub dt_safety: f64,
    pub snapshots_per_level: usize,
}

impl WingParams {
    /// Default schedule ending at spacing `h`: `8h` for 200, `4h` for 20, `2h` for 3, `h` for 1.
    pub fn with_final_spacing(delta: f64, l: f64, h: f64) -> Self {
        Self {
            delta,
            l,
            seed_ell: 1.0,
            levels: vec![(8.0 * h, 200.0), (4.0 * h, 20.0), (2.0 * h, 3.0), (h, 1.0)],
            dt_safety: 0.9,
            snapshots_per_level: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub h: f64,
    pub t_end: f64,
    pub window_residual: f64,
}

#[derive(Clone, Debug)]
pub struct WingExtraction {
    /// Slab table normalised to `u(0, 0) = 0`.
    pub profile: TranslatorProfile,
    pub certified: bool,
    pub window_residual: f64,
    pub slope_max: f64,
    pub far_slope_error: f64,
    pub symmetry_error: f64,
    pub window_convexity: f64,
    pub levels: Vec<LevelReport>,
    pub last_level: Trajectory,
}

impl WingExtraction {
    pub fn tan_theta(&self) -> f64 {
        self.profile.theta().expect("wing tables carry theta").tan()
    }
}

/// Certification window: 0.5 clear of the x1 faces and 0.25 clear of the x2 faces.
pub fn certification_window(b: f64, delta: f64, l: f64) -> impl Fn(f64, f64) -> bool {
    move |x1: f64, x2: f64| x1.abs() <= l - 0.5 + 1e-12 && x2.abs() <= b - delta - 0.25 + 1e-12
}

fn symmetry_error(f: &Field) -> f64 {
    let Geometry::Slab(g) = f.geometry() else { return f64::NAN };
    let v = f.values();
    let (n1, n2) = (g.n1(), g.n2());
    let mut worst = 0.0f64;
    for j in 0..n2 {
        for i in 0..n1 {
            let u = v[g.idx(i, j)];
            worst = worst.max((u - v[g.idx(n1 - 1 - i, j)]).abs());
            worst = worst.max((u - v[g.idx(i, n2 - 1 - j)]).abs());
        }
    }
    worst
}

/// Evolve a symmetric convex seed towards the Delta-wing of half-width `b`
/// by coarse-to-fine continuation and tabulate the result.
///
/// Faces: slope `-tan(theta)` and `+tan(theta)` on the x1 faces, translating
/// seed values on the x2 faces. A table that misses [`WING_RESIDUAL_TARGET`] or
/// the slope bound is returned with `certified = false`.
pub fn extract_delta_wing(b: f64, params: &WingParams) -> Result<WingExtraction> {
    if !(b > FRAC_PI_2) {
        return Err(Error::Domain(format!("Delta-wings need b > pi/2, got {b}")));
    }
    if params.levels.is_empty() {
        return Err(Error::Config("wing extraction needs at least one level".into()));
    }
    let theta = tilt_angle(b)?;
    let (tan, c) = (theta.tan(), theta.cos());
    let ell = params.seed_ell;
    let seed = move |x1: f64, x2: f64| tan * (x1 * x1 + ell * ell).sqrt() - (x2 * c).cos().ln() / (c * c);
    let keep = certification_window(b, params.delta, params.l);

    let mut prev: Option<FlowState> = None;
    let mut reports = Vec::new();
    let mut last_level = None;
    let mut t = 0.0;
    for &(h, duration) in &params.levels {
        let grid = Grid2D::slab(b, params.delta, params.l, h)?;
        let s0 = Field::sample_slab(grid, seed)?;
        if prev.is_none() {
            let margin = convexity_check(&s0)?;
            if margin < 0.0 {
                return Err(Error::Domain(format!("wing seed is not convex (margin {margin:.3e})")));
            }
        }
        let policy = BoundaryPolicy::translating(&s0, 0.0)
            .with_face(Face::X1Lo, FaceCondition::NeumannSlope { slope: -tan })
            .with_face(Face::X1Hi, FaceCondition::NeumannSlope { slope: tan });
        let field = match &prev {
            None => s0.clone(),
            Some(p) => {
                let geom = s0.geometry().clone();
                let values = (0..s0.len())
                    .map(|k| {
                        let (x1, x2) = geom.point(k);
                        if geom.is_boundary(k) {
                            Ok(s0.values()[k] + t)
                        } else {
                            bilinear(&p.field, x1, x2)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Field::new(geom, values)?
            }
        };
        let state = FlowState::new(t, field, policy)?;
        let dt = cfl_dt(&state.field, params.dt_safety);
        let stride = ((duration / params.snapshots_per_level.max(1) as f64) / dt).round().max(1.0) as usize;
        let traj = evolve(&state, &SolverConfig::new(t + duration, stride).with_safety(params.dt_safety))?;
        t += duration;
        let end = traj.last().clone();
        let window_residual = translator_residual(&end.field)?.sup_abs_where(&keep);
        reports.push(LevelReport { h, t_end: t, window_residual });
        prev = Some(end);
        last_level = Some(traj);
    }
    let end = prev.expect("at least one level");
    let geometry = end.geometry().clone();
    let Geometry::Slab(g) = &geometry else { unreachable!("slab levels") };

    let centre = g.idx(g.n1() / 2, g.n2() / 2);
    let shift = end.values()[centre];
    let table = end.field.map(|u| u - shift)?;
    let window_residual = reports.last().expect("levels").window_residual;

    let p1 = d1(&table, 0)?;
    let slope_max = (0..table.len())
        .filter(|&k| !geometry.is_boundary(k))
        .map(|k| p1.values()[k].abs())
        .fold(0.0, f64::max);
    let far = params.l - 0.5;
    let far_slope = |x: f64| -> Result<f64> {
        let (i, _) = g.x1().locate(x)?;
        let j = g.n2() / 2;
        Ok(p1.values()[g.idx(i, j)].abs())
    };
    let far_slope_error = (far_slope(-far)? - tan).abs().max((far_slope(far)? - tan).abs());
    let window_convexity = {
        let (a, bm, cm) = crate::grid::hessian(&table)?;
        (0..table.len())
            .filter(|&k| {
                let (x1, x2) = geometry.point(k);
                keep(x1, x2)
            })
            .map(|k| {
                let (p, q, s) = (a.values()[k], bm.values()[k], cm.values()[k]);
                0.5 * (p + s) - (0.25 * (p - s).powi(2) + q * q).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let certified = window_residual <= WING_RESIDUAL_TARGET && slope_max <= tan + 1e-3;
    let meta = TableMeta {
        kind: "delta_wing".into(),
        n: 2,
        b: Some(b),
        theta: Some(theta),
        residual_sup: window_residual,
        extra: Vec::new(),
    }
    .with_extra("certified", certified)
    .with_extra("delta", params.delta)
    .with_extra("l", params.l)
    .with_extra("t", t);
    let symmetry_error = symmetry_error(&table);
    Ok(WingExtraction {
        profile: TranslatorProfile::Tabulated(Tabulated::new(meta, table)?),
        certified,
        window_residual,
        slope_max,
        far_slope_error,
        symmetry_error,
        window_convexity,
        levels: reports,
        last_level: last_level.expect("at least one level"),
    })
}

/// Checks attached to an extraction: certification, slope bound, far-field
/// slope and mirror symmetry.
pub fn extraction_checks(w: &WingExtraction) -> Vec<CheckOutcome> {
    let tan = w.tan_theta();
    let scale = w.profile.table().map(|t| t.field().sup_abs()).unwrap_or(1.0);
    vec![
        CheckOutcome::at_most(
            "wing_certified",
            w.window_residual,
            WING_RESIDUAL_TARGET,
            "translator residual on the certification window",
        ),
        CheckOutcome::at_most("wing_slope_bound", w.slope_max, tan + 1e-3, format!("tan(theta)={tan:.9}")),
        CheckOutcome::at_most("wing_far_slope", w.far_slope_error, 1e-2, "|du/dx1| at x1 = +-(L - 0.5), x2 = 0"),
        CheckOutcome::at_most("wing_symmetry", w.symmetry_error, 1e-9 * (1.0 + scale), "even in x1 and in x2"),
    ]
}

/// `delta_wing_extract` scenarios: extraction instead of a single evolve.
pub fn run_extraction(cfg: &ScenarioConfig) -> Result<ReportBundle> {
    debug_assert_eq!(cfg.kind, ScenarioKind::DeltaWingExtract);
    cfg.validate()?;
    let b = cfg.geometry.b.expect("validated");
    let delta = cfg.geometry.delta.expect("validated");
    let l = cfg.geometry.l.expect("validated");
    let wing = cfg.wing.clone().unwrap_or_default();
    let mut params = WingParams::with_final_spacing(delta, l, cfg.geometry.h);
    params.seed_ell = wing.seed_ell;
    params.dt_safety = wing.dt_safety;
    if !wing.levels.is_empty() {
        params.levels = wing.levels.iter().map(|l| (l[0], l[1])).collect();
    }
    let w = extract_delta_wing(b, &params)?;
    let records = w
        .last_level
        .snapshots()
        .iter()
        .map(|s| {
            let residual = translator_residual(&s.field)?.sup_abs_where(certification_window(b, delta, l));
            Ok(DiagnosticsRecord {
                t: s.t,
                fit_residual: Some(residual),
                convexity_margin: Some(convexity_check(&s.field)?),
                ..Default::default()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let checks: Vec<CheckLine> =
        extraction_checks(&w).into_iter().map(|outcome| CheckLine { outcome, required: true }).collect();
    let mut warnings = Vec::new();
    if w.window_convexity < 0.0 {
        warnings.push(format!("extracted table is not convex on the window ({:.3e})", w.window_convexity));
    }
    let table = w.profile.table().expect("tabulated");
    let final_state = FlowState::new(
        w.last_level.last().t,
        table.field().clone(),
        BoundaryPolicy::translating(table.field(), w.last_level.last().t),
    )?;
    let mut bundle = ReportBundle {
        name: cfg.name.clone(),
        kind: cfg.kind,
        records,
        checks,
        warnings,
        abort: None,
        final_fit: None,
        final_state,
        config_echo: cfg.to_toml()?,
        csv_path: None,
        table_path: None,
        summary_path: None,
    };
    if let Some(dir) = &cfg.output {
        std::fs::create_dir_all(dir)?;
        w.profile.save(&dir.join("delta_wing.tbl"))?;
        bundle.warnings.push(format!("wing table written to {}", dir.join("delta_wing.tbl").display()));
    }
    if !w.certified {
        bundle.warnings.push("wing table flagged non-certified".into());
    }
    Ok(bundle)
}
