use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::barriers::{
    c0_estimate_check, gradient_envelope, measured_continuity_check, sphere_window, squeeze_check, CheckOutcome,
    CheckStatus, PancakeConstants, SqueezeReport,
};
use crate::diagnostics::{
    convexity_check, discrete_turning, fit_translation, harnack_series, mean_convexity, monotonicity_audit,
    phi_of_state, splitting_check, surface_quantities, DiagnosticsRecord, FitWindow, TranslationFit,
};
use crate::grid::{Field, Geometry};
use crate::solver::{
    cfl_dt, evolve, BoundaryPolicy, Face, FaceCondition, FlowState, SolverConfig, Trajectory,
};
use crate::translators::{bowl_profile, load_profile, translator_residual, write_table, TableMeta, TranslatorProfile};
use crate::{Error, Result};

use super::config::{total_perturbation, BoundaryChoice, ScenarioConfig, ScenarioKind};

/// Exact column order of the time-series CSV.
pub const CSV_HEADER: &str =
    "t,sup_dist,I_total,sup_kappa,phi,c0_fit,c1_fit,fit_residual,harnack_min,convexity_margin,squeeze_violation";

/// Everything needed to start a run: reference profile, initial state and fit setup.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub profile: TranslatorProfile,
    pub initial: FlowState,
    pub window: FitWindow,
    pub c1_bracket: Option<f64>,
    pub boundary: BoundaryChoice,
    pub warnings: Vec<String>,
}

pub fn default_boundary(kind: ScenarioKind) -> BoundaryChoice {
    match kind {
        ScenarioKind::GrimReaper1d => BoundaryChoice::Reservoir,
        ScenarioKind::Slab2dDeltaWing | ScenarioKind::DeltaWingExtract => BoundaryChoice::Neumann,
        _ => BoundaryChoice::Translating,
    }
}

fn reference_profile(cfg: &ScenarioConfig) -> Result<(TranslatorProfile, Geometry, Vec<String>)> {
    let mut warnings = Vec::new();
    Ok(match cfg.kind {
        ScenarioKind::GrimReaper1d => (TranslatorProfile::GrimReaper, cfg.geometry_grid()?, warnings),
        ScenarioKind::Slab2dPlane => {
            let b = cfg.geometry.b.expect("validated");
            (TranslatorProfile::grim_reaper_plane(b)?, cfg.geometry_grid()?, warnings)
        }
        ScenarioKind::RadialBowl => {
            let geometry = cfg.geometry_grid()?;
            let r_tab = cfg.geometry.r_max.expect("validated") + 1.0;
            let h_tab = (1e-3 * r_tab).min(0.0025).min(cfg.geometry.h / 10.0);
            (bowl_profile(cfg.dim(), r_tab, h_tab)?, geometry, warnings)
        }
        ScenarioKind::Slab2dDeltaWing | ScenarioKind::Custom => {
            let path = cfg.profile_path.as_ref().expect("validated");
            let profile = load_profile(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let geometry = profile.table().expect("loaded profiles are tables").field().geometry().clone();
            if (geometry.h() - cfg.geometry.h).abs() > 1e-9 * cfg.geometry.h {
                warnings.push(format!("grid spacing {} taken from the profile table", geometry.h()));
            }
            if cfg.kind == ScenarioKind::Slab2dDeltaWing && !matches!(geometry, Geometry::Slab(_)) {
                return Err(Error::Config("delta-wing scenarios need a slab table".into()));
            }
            if let Some(c) = profile.table().and_then(|t| t.meta().extra("certified")) {
                if c != "true" {
                    warnings.push("profile table is not certified".into());
                }
            }
            (profile, geometry, warnings)
        }
        ScenarioKind::DeltaWingExtract => {
            return Err(Error::Config("extraction scenarios are handled by extract_delta_wing".into()))
        }
    })
}

fn policy_for(cfg: &ScenarioConfig, choice: BoundaryChoice, profile: &TranslatorProfile, field: &Field) -> Result<BoundaryPolicy> {
    let geometry = field.geometry();
    Ok(match choice {
        BoundaryChoice::Reservoir => {
            let Geometry::Interval(g) = geometry else {
                return Err(Error::Config("reservoir boundaries are 1D only".into()));
            };
            BoundaryPolicy::new(vec![
                (Face::Left, FaceCondition::TailReservoir { tail: FRAC_PI_2 + g.lo() }),
                (Face::Right, FaceCondition::TailReservoir { tail: FRAC_PI_2 - g.hi() }),
            ])
        }
        BoundaryChoice::Translating => BoundaryPolicy::translating(field, 0.0),
        BoundaryChoice::Exact => BoundaryPolicy::exact(profile, geometry, 1.0)?,
        BoundaryChoice::Neumann => {
            let tan = profile
                .theta()
                .ok_or_else(|| Error::Config("neumann boundaries need a tilted profile".into()))?
                .tan();
            let lo = if cfg.kind == ScenarioKind::Slab2dPlane { tan } else { -tan };
            BoundaryPolicy::translating(field, 0.0)
                .with_face(Face::X1Lo, FaceCondition::NeumannSlope { slope: lo })
                .with_face(Face::X1Hi, FaceCondition::NeumannSlope { slope: tan })
        }
    })
}

/// Build the initial state (profile plus perturbation) and validate the fit window.
pub fn prepare(cfg: &ScenarioConfig) -> Result<Prepared> {
    cfg.validate()?;
    let (profile, geometry, mut warnings) = reference_profile(cfg)?;
    let bar = profile.sample_on(&geometry)?;
    let pert = total_perturbation(cfg, &geometry)?;
    let values = bar.values().iter().zip(&pert).map(|(a, b)| a + b).collect();
    let field = Field::new(geometry.clone(), values)?;
    let boundary = cfg.boundary.unwrap_or_else(|| default_boundary(cfg.kind));
    let policy = policy_for(cfg, boundary, &profile, &field)?;
    let initial = FlowState::new(0.0, field, policy).map_err(|e| Error::Config(e.to_string()))?;
    let window = cfg.fit_window(&geometry);
    window.nodes(&geometry)?;
    let c1_bracket = match (cfg.kind, profile.theta()) {
        (ScenarioKind::Slab2dDeltaWing, Some(theta)) | (ScenarioKind::Custom, Some(theta)) if theta > 0.0 => {
            let default = (1.5 * cfg.c0_budget.max(10.0 * geometry.h()) / theta.tan()).min(0.4);
            Some(cfg.diagnostics.c1_bracket.unwrap_or(default))
        }
        _ => None,
    };
    let margin = convexity_check(&initial.field)?;
    if margin < 0.0 {
        warnings.push(format!("initial data is not convex (smallest Hessian eigenvalue {margin:.3e})"));
    }
    if cfg.kind == ScenarioKind::RadialBowl {
        let hmin = mean_convexity(&initial.field)?;
        if hmin < 0.0 {
            warnings.push(format!("initial data is not mean convex (smallest mean curvature {hmin:.3e})"));
        }
    }
    Ok(Prepared { profile, initial, window, c1_bracket, boundary, warnings })
}

/// Snapshot stride giving roughly `snapshots` outputs over `[t0, t_end]`.
pub fn stride_for(initial: &FlowState, sigma: f64, t_end: f64, snapshots: usize) -> usize {
    let dt = cfl_dt(&initial.field, sigma);
    (((t_end - initial.t) / snapshots as f64) / dt).round().max(1.0) as usize
}

pub fn solver_config(cfg: &ScenarioConfig, initial: &FlowState) -> SolverConfig {
    let s = &cfg.solver;
    let mut sc = SolverConfig::new(s.t_end, stride_for(initial, s.dt_safety, s.t_end, s.snapshots)).with_safety(s.dt_safety);
    sc.scheme = s.scheme;
    sc
}

/// Relative change of the fit residual over the last tenth of the snapshots.
pub fn residual_settling(residuals: &[f64]) -> f64 {
    let n = residuals.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let tail = ((n as f64 * 0.1).ceil() as usize).max(2);
    let first = residuals[n - tail];
    let last = residuals[n - 1];
    if last == 0.0 {
        return if first == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (first - last).abs() / last.abs()
}

/// Threshold on [`residual_settling`] for calling a run quasi-steady.
pub const QUASI_STEADY: f64 = 1e-3;

/// Outcome of an evolve that may have been extended towards a quasi-steady fit.
#[derive(Debug)]
pub struct SteadyRun {
    pub trajectory: Trajectory,
    pub reached: bool,
    pub settling: f64,
    pub extensions: usize,
}

fn fit_residuals(traj: &Trajectory, prep: &Prepared) -> Result<Vec<f64>> {
    traj.snapshots()
        .iter()
        .map(|s| fit_translation(&s.field, &prep.profile, s.t - traj.first().t, &prep.window, prep.c1_bracket).map(|f| f.residual))
        .collect()
}

/// Evolve to `t_end`, then keep extending by half the elapsed time until the
/// fit residual settles or `max_extensions` is used up.
pub fn evolve_to_steady(
    prep: &Prepared,
    sc: &SolverConfig,
    max_extensions: usize,
) -> std::result::Result<SteadyRun, (Box<crate::solver::SolverAbort>, usize)> {
    let mut traj = evolve(&prep.initial, sc).map_err(|a| (a, 0))?;
    let mut extensions = 0;
    loop {
        let settling = fit_residuals(&traj, prep).map(|r| residual_settling(&r)).unwrap_or(f64::INFINITY);
        if settling < QUASI_STEADY || extensions >= max_extensions {
            return Ok(SteadyRun { reached: settling < QUASI_STEADY, settling, trajectory: traj, extensions });
        }
        let start = traj.last().clone();
        let mut more_cfg = *sc;
        more_cfg.t_end = start.t + 0.5 * (start.t - prep.initial.t);
        let more = match evolve(&start, &more_cfg) {
            Ok(m) => m,
            Err(mut abort) => {
                let mut partial = traj;
                let tail = std::mem::replace(&mut abort.partial, partial.clone());
                if partial.append(tail).is_ok() {
                    abort.partial = partial;
                }
                return Err((abort, extensions + 1));
            }
        };
        traj.append(more).expect("continuation starts at the last snapshot");
        extensions += 1;
    }
}

/// One summary line: a check and whether it counts towards the exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub outcome: CheckOutcome,
    pub required: bool,
}

impl CheckLine {
    fn required(outcome: CheckOutcome) -> Self {
        Self { outcome, required: true }
    }

    fn optional(outcome: CheckOutcome) -> Self {
        Self { outcome, required: false }
    }

    pub fn failed(&self) -> bool {
        self.required && !self.outcome.passed()
    }
}

/// Outputs of one scenario run.
#[derive(Clone, Debug)]
pub struct ReportBundle {
    pub name: String,
    pub kind: ScenarioKind,
    pub records: Vec<DiagnosticsRecord>,
    pub checks: Vec<CheckLine>,
    pub warnings: Vec<String>,
    pub abort: Option<String>,
    pub final_fit: Option<TranslationFit>,
    pub final_state: FlowState,
    pub config_echo: String,
    pub csv_path: Option<PathBuf>,
    pub table_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

impl ReportBundle {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().map(|c| &c.outcome).find(|o| o.name == name)
    }

    pub fn passed(&self) -> bool {
        self.abort.is_none() && !self.checks.iter().any(CheckLine::failed)
    }

    /// 0 pass, 1 required check failed, 3 solver abort.
    pub fn exit_code(&self) -> i32 {
        if self.abort.is_some() {
            3
        } else if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn csv(&self) -> String {
        csv_string(&self.records)
    }

    pub fn summary(&self) -> String {
        let mut out = format!("scenario {} ({})\n", self.name, self.kind.as_str());
        for c in &self.checks {
            let tag = if c.required { "required" } else { "optional" };
            let _ = writeln!(out, "[{tag}] {}", c.outcome);
        }
        if let Some(f) = &self.final_fit {
            let _ = writeln!(
                out,
                "fit t={} c0={:.9e} c1={:.9e} residual={:.3e} sup_dist={:.3e}{}",
                self.final_state.t,
                f.c0,
                f.c1,
                f.residual,
                f.sup_dist,
                if f.flagged { " (c1 on bracket edge)" } else { "" }
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(a) = &self.abort {
            let _ = writeln!(out, "abort: {a}");
        }
        let _ = writeln!(out, "status: {}", if self.passed() { "pass" } else { "fail" });
        out
    }

    /// Write CSV, final profile table, summary and config echo into `dir`.
    pub fn write_to(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join("timeseries.csv");
        std::fs::write(&csv, self.csv())?;
        let table = dir.join("final_profile.tbl");
        let residual = translator_residual(&self.final_state.field).map(|r| r.sup_abs()).unwrap_or(f64::NAN);
        let meta = TableMeta::new("snapshot", self.final_state.geometry().graph_dim(), residual)
            .with_extra("t", self.final_state.t)
            .with_extra("scenario", &self.name);
        write_table(&table, &meta, &self.final_state.field)?;
        let summary = dir.join("summary.txt");
        std::fs::write(&summary, self.summary())?;
        std::fs::write(dir.join("config.toml"), &self.config_echo)?;
        self.csv_path = Some(csv);
        self.table_path = Some(table);
        self.summary_path = Some(summary);
        Ok(())
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_string(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let row = [
            Some(r.t),
            r.sup_dist,
            r.i_total,
            r.sup_kappa,
            r.phi,
            r.c0_fit,
            r.c1_fit,
            r.fit_residual,
            r.harnack_min,
            r.convexity_margin,
            r.squeeze_violation,
        ];
        let cells: Vec<String> = row.iter().map(|v| cell(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Per-snapshot diagnostics plus the translation fit of every snapshot.
pub fn snapshot_records(
    traj: &Trajectory,
    prep: &Prepared,
    harnack: &[(f64, f64, f64)],
    squeeze: Option<&SqueezeReport>,
) -> Result<(Vec<DiagnosticsRecord>, Vec<TranslationFit>)> {
    let geometry = traj.geometry();
    let one_d = matches!(geometry, Geometry::Interval(_));
    let slab = matches!(geometry, Geometry::Slab(_));
    let t0 = traj.first().t;
    let mut records = Vec::with_capacity(traj.len());
    let mut fits = Vec::with_capacity(traj.len());
    for (k, s) in traj.snapshots().iter().enumerate() {
        let fit = fit_translation(&s.field, &prep.profile, s.t - t0, &prep.window, prep.c1_bracket)?;
        let sq = surface_quantities(&s.field)?;
        let sup_kappa = (0..s.field.len())
            .filter(|&i| !geometry.is_boundary(i))
            .map(|i| sq.mean_curvature.values()[i].abs())
            .fold(0.0, f64::max);
        records.push(DiagnosticsRecord {
            t: s.t,
            sup_dist: Some(fit.sup_dist),
            i_total: if one_d { Some(discrete_turning(s)?) } else { None },
            sup_kappa: Some(sup_kappa),
            phi: if one_d && t0 == 0.0 { Some(phi_of_state(s, &prep.profile)?) } else { None },
            c0_fit: Some(fit.c0),
            c1_fit: if slab { Some(fit.c1) } else { None },
            fit_residual: Some(fit.residual),
            harnack_min: harnack.iter().find(|h| h.0 == s.t).map(|h| h.1),
            entropy: None,
            convexity_margin: Some(convexity_check(&s.field)?),
            squeeze_violation: squeeze.and_then(|r| r.per_snapshot.get(k)).map(|p| p.1.max(p.2)),
        });
        fits.push(fit);
    }
    Ok((records, fits))
}

/// Short auxiliary run over the sphere window `[0, delta^2/(4n)]` at the centre.
pub fn continuity_audit(prep: &Prepared, sigma: f64, delta: f64) -> CheckOutcome {
    let geometry = prep.initial.geometry();
    let tw = match sphere_window(delta, delta, geometry.graph_dim()) {
        Ok(t) => t,
        Err(e) => return CheckOutcome::inconclusive("sphere_continuity", e.to_string()),
    };
    let t_end = prep.initial.t + tw;
    let sc = SolverConfig::new(t_end, stride_for(&prep.initial, sigma, t_end, 20)).with_safety(sigma);
    match evolve(&prep.initial, &sc) {
        Ok(traj) => measured_continuity_check(&traj, (0.0, 0.0), delta),
        Err(a) => CheckOutcome::inconclusive("sphere_continuity", a.to_string()),
    }
}

fn phi_check(records: &[DiagnosticsRecord], h: f64) -> CheckOutcome {
    let phis: Vec<f64> = records.iter().filter_map(|r| r.phi).collect();
    let drift = phis.iter().map(|p| (p - phis[0]).abs()).fold(0.0, f64::max);
    CheckOutcome::at_most("phi_conservation", drift, 10.0 * h * h, format!("phi(0)={:.9e}", phis[0]))
}

fn monotone_check(records: &[DiagnosticsRecord], h: f64) -> CheckOutcome {
    let series: Vec<(f64, f64)> = records.iter().filter_map(|r| r.i_total.map(|i| (r.t, i))).collect();
    CheckOutcome::at_most(
        "total_curvature_monotone",
        monotonicity_audit(&series),
        10.0 * h * h,
        format!("I(0)={:.9e} I(T)={:.9e}", series[0].1, series[series.len() - 1].1),
    )
}

/// Verdict on the limit of the vertical shift against `phi(0)`.
pub fn c0_limit_check(target: f64, c0_fit: f64, h: f64, steady: Option<&SteadyRun>) -> CheckOutcome {
    let tol = (0.02 * target.abs()).max(5.0 * h * h);
    if let Some(run) = steady {
        if !run.reached {
            return CheckOutcome::inconclusive(
                "c0_limit",
                format!(
                    "fit residual still moving (relative change {:.2e} over the last 10% of snapshots) at t={}; extend t_end",
                    run.settling,
                    run.trajectory.last().t
                ),
            );
        }
    }
    CheckOutcome::at_most(
        "c0_limit",
        (c0_fit - target).abs(),
        tol,
        format!("c0_fit={c0_fit:.9e} target={target:.9e}"),
    )
}

fn fit_bound_check(fit: &TranslationFit, theta: f64, c0: f64, h: f64) -> CheckOutcome {
    let value = fit.c1.abs() * theta.tan() + fit.c0.abs();
    CheckOutcome::at_most(
        "shift_bound",
        value,
        c0 + 5.0 * h * h,
        format!("c0={:.6e} c1={:.6e}{}", fit.c0, fit.c1, if fit.flagged { " c1 on bracket edge" } else { "" }),
    )
}

/// Evolve a prepared scenario and run the check set for its kind.
pub fn run_prepared(cfg: &ScenarioConfig, prep: Prepared) -> Result<ReportBundle> {
    let h = prep.initial.geometry().h();
    let sc = solver_config(cfg, &prep.initial);
    let steady_wanted = cfg.diagnostics.run_to_steady;
    let mut abort = None;
    let mut steady = None;
    let traj = if steady_wanted {
        match evolve_to_steady(&prep, &sc, cfg.diagnostics.max_extensions) {
            Ok(run) => {
                let t = run.trajectory.clone();
                steady = Some(run);
                t
            }
            Err((a, _)) => {
                abort = Some(a.to_string());
                a.partial
            }
        }
    } else {
        match evolve(&prep.initial, &sc) {
            Ok(t) => t,
            Err(a) => {
                abort = Some(a.to_string());
                a.partial
            }
        }
    };

    let mut checks = Vec::new();
    let mut warnings = prep.warnings.clone();
    let squeeze = squeeze_check(&traj, &prep.profile, cfg.c0_budget, 1.0)?;
    let convex_start = convexity_check(&prep.initial.field)? >= 0.0;
    let harnack = if cfg.diagnostics.harnack && cfg.kind == ScenarioKind::GrimReaper1d && abort.is_none() {
        if convex_start {
            match harnack_series(&traj, cfg.diagnostics.harnack_alpha, &prep.window) {
                Ok(s) => s,
                Err(e) => {
                    warnings.push(format!("harnack audit skipped: {e}"));
                    Vec::new()
                }
            }
        } else {
            warnings.push("harnack audit skipped: initial data is not convex".into());
            Vec::new()
        }
    } else {
        Vec::new()
    };
    let (records, fits) = snapshot_records(&traj, &prep, &harnack, Some(&squeeze))?;
    let final_fit = fits.last().copied();

    if abort.is_none() {
        checks.push(CheckLine::required(squeeze.check(10.0 * h * h)));
        match cfg.kind {
            ScenarioKind::GrimReaper1d => {
                let reservoir = prep.boundary == BoundaryChoice::Reservoir;
                if reservoir {
                    checks.push(CheckLine::required(phi_check(&records, h)));
                }
                let mono = monotone_check(&records, h);
                checks.push(if reservoir { CheckLine::required(mono) } else { CheckLine::optional(mono) });
                if reservoir && cfg.compact_perturbation() {
                    let target = records[0].phi.expect("1D records carry phi");
                    let fit = final_fit.expect("at least one snapshot");
                    let line = c0_limit_check(target, fit.c0, h, steady.as_ref());
                    checks.push(if steady_wanted { CheckLine::required(line) } else { CheckLine::optional(line) });
                }
                if !harnack.is_empty() {
                    let (t, min, x) = harnack.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
                    let outcome = CheckOutcome::new(
                        "harnack",
                        if min >= -1e-2 { CheckStatus::Pass } else { CheckStatus::Fail },
                        min,
                        -1e-2,
                        format!("alpha={} worst at t={t:.4} x={x:.4}", cfg.diagnostics.harnack_alpha),
                    );
                    checks.push(CheckLine::required(outcome));
                }
            }
            ScenarioKind::Slab2dPlane => {
                let b = cfg.geometry.b.expect("validated");
                let fit = final_fit.expect("at least one snapshot");
                checks.push(CheckLine::required(CheckOutcome::at_most(
                    "shift_bound",
                    fit.c0.abs(),
                    cfg.c0_budget + 5.0 * h * h,
                    format!("c0={:.6e} (c1 is absorbed by c0 on a plane)", fit.c0),
                )));
                if cfg.affine_in_x1 && prep.boundary == BoundaryChoice::Neumann {
                    let worst = traj
                        .snapshots()
                        .iter()
                        .map(|s| splitting_check(&s.field, b, None))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    checks.push(CheckLine::required(CheckOutcome::at_most(
                        "splitting",
                        worst,
                        10.0 * h * h,
                        "max |du/dx1 - tan(theta)| over all snapshots",
                    )));
                }
                if cfg.diagnostics.insensitivity {
                    checks.push(CheckLine::required(super::insensitivity::insensitivity_check(cfg)?));
                }
            }
            ScenarioKind::Slab2dDeltaWing => {
                let theta = prep.profile.theta().unwrap_or(0.0);
                checks.push(CheckLine::required(fit_bound_check(&final_fit.expect("snapshot"), theta, cfg.c0_budget, h)));
            }
            ScenarioKind::RadialBowl => {
                let first = records[0].sup_dist.expect("fit");
                let last = records[records.len() - 1].sup_dist.expect("fit");
                checks.push(CheckLine::required(CheckOutcome::at_most(
                    "stability_decay",
                    last,
                    0.1 * first,
                    format!("post-fit sup distance {first:.4e} -> {last:.4e} ({:.1}x)", first / last),
                )));
                // radial data admit no horizontal shift, so the comparability factor is 1
                let fit = final_fit.expect("snapshot");
                checks.push(CheckLine::required(CheckOutcome::at_most(
                    "shift_bound",
                    fit.c0.abs(),
                    cfg.c0_budget,
                    format!("c0={:.6e} comparability factor 1", fit.c0),
                )));
                let half = records.len() / 2;
                let rises = records[half..]
                    .windows(2)
                    .map(|w| w[1].sup_dist.unwrap_or(0.0) - w[0].sup_dist.unwrap_or(0.0))
                    .fold(0.0, f64::max);
                checks.push(CheckLine::optional(CheckOutcome::at_most(
                    "sup_dist_monotone_tail",
                    rises,
                    0.0,
                    "largest rise of the post-fit sup distance over the last half",
                )));
            }
            ScenarioKind::Custom | ScenarioKind::DeltaWingExtract => {}
        }
        if cfg.diagnostics.continuity {
            checks.push(CheckLine::required(continuity_audit(&prep, cfg.solver.dt_safety, cfg.diagnostics.continuity_delta)));
        }
        if let Some(lambda) = cfg.diagnostics.pancake_lambda {
            let geometry = traj.geometry();
            let (b, r) = match geometry {
                Geometry::Slab(g) => (g.x2().hi() + cfg.geometry.delta.unwrap_or(0.0), 0.5 * g.x1().hi()),
                Geometry::Interval(g) => (g.hi(), 0.0),
                Geometry::Radial { .. } => (0.0, 0.0),
            };
            checks.push(CheckLine::optional(c0_estimate_check(&traj, b, r, lambda, PancakeConstants::default())));
        }
        if let Some(mu) = cfg.diagnostics.gradient_mu {
            checks.push(CheckLine::optional(gradient_envelope(&traj, mu)));
        }
    }

    Ok(ReportBundle {
        name: cfg.name.clone(),
        kind: cfg.kind,
        records,
        checks,
        warnings,
        abort,
        final_fit,
        final_state: traj.last().clone(),
        config_echo: cfg.to_toml()?,
        csv_path: None,
        table_path: None,
        summary_path: None,
    })
}

/// Build, evolve, diagnose and (if `cfg.output` is set) write one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ReportBundle> {
    let mut bundle = if cfg.kind == ScenarioKind::DeltaWingExtract {
        super::wing::run_extraction(cfg)?
    } else {
        run_prepared(cfg, prepare(cfg)?)?
    };
    if let Some(dir) = &cfg.output {
        bundle.write_to(dir)?;
    }
    Ok(bundle)
}

/// Verdict of a vertical-shift reproduction run.
#[derive(Clone, Debug)]
pub struct C0Verdict {
    pub outcome: CheckOutcome,
    pub target: f64,
    pub c0_fit: f64,
    pub phi_drift: f64,
    pub t_final: f64,
    pub bundle: ReportBundle,
}

/// Run a 1D scenario to quasi-steady state and compare the fitted vertical
/// shift with `(1/pi) int (u0 - ubar)`.
pub fn reproduce_c0(cfg: &ScenarioConfig) -> Result<C0Verdict> {
    if cfg.kind != ScenarioKind::GrimReaper1d || !cfg.compact_perturbation() {
        return Err(Error::Config("reproduce_c0 needs a 1D scenario with compactly supported perturbations".into()));
    }
    if cfg.boundary.unwrap_or(BoundaryChoice::Reservoir) != BoundaryChoice::Reservoir {
        return Err(Error::Config("reproduce_c0 needs reservoir boundaries".into()));
    }
    let mut cfg = cfg.clone();
    cfg.diagnostics.run_to_steady = true;
    let bundle = run_scenario(&cfg)?;
    if let Some(a) = &bundle.abort {
        return Err(Error::Config(format!("run aborted: {a}")));
    }
    let h = bundle.final_state.geometry().h();
    let target = bundle.records[0].phi.expect("1D records carry phi");
    let c0_fit = bundle.final_fit.expect("snapshot").c0;
    let phis: Vec<f64> = bundle.records.iter().filter_map(|r| r.phi).collect();
    let phi_drift = phis.iter().map(|p| (p - target).abs()).fold(0.0, f64::max);
    let mut outcome = bundle.check("c0_limit").cloned().expect("c0_limit runs for reservoir scenarios");
    if outcome.status == CheckStatus::Pass && phi_drift > 10.0 * h * h {
        outcome.status = CheckStatus::Fail;
        outcome.detail.push_str(&format!(" phi drift {phi_drift:.3e} exceeds 10h^2"));
    }
    Ok(C0Verdict { outcome, target, c0_fit, phi_drift, t_final: bundle.final_state.t, bundle })
}
