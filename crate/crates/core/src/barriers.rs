//! Barrier formulas and trajectory-level comparison checks.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{d1, Field, Geometry};
use crate::solver::Trajectory;
use crate::translators::TranslatorProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        })
    }
}

/// Result of one named check: the measured quantity and the bound it was held to.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: &str, status: CheckStatus, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), status, value, tolerance, detail: detail.into() }
    }

    /// Pass iff `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if value <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self::new(name, status, value, tolerance, detail)
    }

    pub fn inconclusive(name: &str, detail: impl Into<String>) -> Self {
        Self::new(name, CheckStatus::Inconclusive, f64::NAN, f64::NAN, detail)
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<28} {:<12} value={:.6e} tol={:.3e}", self.name, self.status, self.value, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Model-pancake constants. They are only known to exist, so callers supply them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PancakeConstants {
    pub t0: f64,
    pub c: f64,
}

impl Default for PancakeConstants {
    fn default() -> Self {
        Self { t0: 1.0, c: 0.0 }
    }
}

fn check_lambda(lambda: f64, t: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("T must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Radius `R` of the pancake barrier for a `C^0` estimate up to time `T`.
pub fn pancake_radius(n: usize, lambda: f64, t: f64, pc: PancakeConstants) -> Result<f64> {
    check_lambda(lambda, t)?;
    if !(pc.t0 > 0.0) {
        return Err(Error::Domain(format!("T0 must be positive, got {}", pc.t0)));
    }
    let s = 2.0 * t + pc.t0;
    let mut r = PI * s / (2.0 * lambda) + 2.0 * lambda * pc.c / PI + 1.0;
    if n > 1 {
        let arg = PI * PI * s / (4.0 * lambda * lambda);
        if !(arg > 0.0) {
            return Err(Error::Domain(format!("log argument {arg} is not positive")));
        }
        r += 2.0 * (n as f64 - 1.0) * lambda / PI * arg.ln();
    }
    Ok(r)
}

/// Height margin `Q` accompanying [`pancake_radius`].
pub fn pancake_margin(n: usize, lambda: f64, t: f64) -> Result<f64> {
    check_lambda(lambda, t)?;
    let mut q = PI * t / (2.0 * lambda) + 1.0;
    if n > 1 {
        q += 2.0 * (n as f64 - 1.0) * lambda / PI * LN_2;
    }
    Ok(q)
}

fn node_filter(geometry: &Geometry, keep: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    (0..geometry.node_count())
        .filter(|&k| {
            let (x, y) = geometry.point(k);
            keep(x, y)
        })
        .collect()
}

fn sup_on(values: &[f64], nodes: &[usize]) -> f64 {
    nodes.iter().map(|&k| values[k].abs()).fold(0.0, f64::max)
}

/// Checks `sup_{K_{r,2 lambda} x [0,T]} |u| <= sup_{K_{r+R,lambda}} |u_0| + Q` on a slab
/// of half-width `b` (interval runs have no `x1` direction and ignore `r`).
pub fn c0_estimate_check(traj: &Trajectory, b: f64, r: f64, lambda: f64, pc: PancakeConstants) -> CheckOutcome {
    const NAME: &str = "c0_estimate";
    let eps = 1e-12;
    let geometry = traj.geometry();
    let t_span = traj.last().t - traj.first().t;
    let n = geometry.graph_dim();
    let (big_r, q) = match (pancake_radius(n, lambda, t_span, pc), pancake_margin(n, lambda, t_span)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CheckOutcome::inconclusive(NAME, e.to_string()),
    };
    let (inner, outer): (Vec<usize>, Vec<usize>) = match geometry {
        Geometry::Interval(g) => {
            if g.lo() > -(b - lambda) + eps || g.hi() < b - lambda - eps {
                return CheckOutcome::inconclusive(NAME, format!("grid does not cover |x| <= b - lambda = {}", b - lambda));
            }
            (
                node_filter(geometry, |x, _| x.abs() <= b - 2.0 * lambda + eps),
                node_filter(geometry, |x, _| x.abs() <= b - lambda + eps),
            )
        }
        Geometry::Slab(g) => {
            if g.x2().hi() < b - lambda - eps || g.x1().hi() < r + big_r - eps {
                return CheckOutcome::inconclusive(
                    NAME,
                    format!("grid does not cover K(r + R, lambda) with R = {big_r:.4}"),
                );
            }
            (
                node_filter(geometry, |x1, x2| x1.abs() <= r + eps && x2.abs() <= b - 2.0 * lambda + eps),
                node_filter(geometry, |x1, x2| x1.abs() <= r + big_r + eps && x2.abs() <= b - lambda + eps),
            )
        }
        Geometry::Radial { .. } => {
            return CheckOutcome::inconclusive(NAME, "the estimate is stated on slabs, not radial domains")
        }
    };
    if inner.is_empty() {
        return CheckOutcome::inconclusive(NAME, "K(r, 2 lambda) contains no grid node");
    }
    let rhs = sup_on(traj.first().values(), &outer) + q;
    let lhs = traj.snapshots().iter().map(|s| sup_on(s.values(), &inner)).fold(0.0, f64::max);
    let slack = rhs - lhs;
    let status = if slack >= 0.0 { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckOutcome::new(NAME, status, lhs, rhs, format!("slack={slack:.6e} R={big_r:.6} Q={q:.6}"))
}

/// Length of the time window on which the sphere comparison controls `u(x0, t)`.
pub fn sphere_window(_eps: f64, delta: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0) || n == 0 {
        return Err(Error::Domain(format!("need delta > 0 and n >= 1 (delta = {delta}, n = {n})")));
    }
    Ok(delta * delta / (4.0 * n as f64))
}

fn nearest_node(geometry: &Geometry, x0: (f64, f64)) -> Result<usize> {
    let near = |g: &crate::grid::Grid1D, x: f64| -> Result<usize> {
        let (i, s) = g.locate(x)?;
        Ok(if s < 0.5 { i } else { (i + 1).min(g.n_cells()) })
    };
    Ok(match geometry {
        Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => near(g, x0.0)?,
        Geometry::Slab(g) => g.idx(near(g.x1(), x0.0)?, near(g.x2(), x0.1)?),
    })
}

fn ball_nodes(geometry: &Geometry, centre: (f64, f64), radius: f64) -> Option<Vec<usize>> {
    let inside = |g: &crate::grid::Grid1D, c: f64, lo_free: bool| {
        (lo_free || c - radius >= g.lo() - 1e-12) && c + radius <= g.hi() + 1e-12
    };
    let covered = match geometry {
        Geometry::Interval(g) => inside(g, centre.0, false),
        Geometry::Radial { grid, .. } => inside(grid, centre.0, true),
        Geometry::Slab(g) => inside(g.x1(), centre.0, false) && inside(g.x2(), centre.1, false),
    };
    if !covered {
        return None;
    }
    Some(node_filter(geometry, |x, y| {
        let d2 = match geometry {
            // a ball around a point at radius r0 meets radii in [r0 - radius, r0 + radius]
            Geometry::Radial { .. } | Geometry::Interval(_) => (x - centre.0).powi(2),
            Geometry::Slab(_) => (x - centre.0).powi(2) + (y - centre.1).powi(2),
        };
        d2 <= radius * radius * (1.0 + 1e-12)
    }))
}

/// Oscillation `max |u0(x) - u0(x0)|` over the `delta`-ball, or `None` when the
/// ball leaves the grid.
pub fn initial_oscillation(field: &Field, x0: (f64, f64), delta: f64) -> Result<Option<f64>> {
    let k0 = nearest_node(field.geometry(), x0)?;
    let centre = field.geometry().point(k0);
    let Some(nodes) = ball_nodes(field.geometry(), centre, delta) else {
        return Ok(None);
    };
    let v = field.values();
    Ok(Some(nodes.iter().map(|&k| (v[k] - v[k0]).abs()).fold(0.0, f64::max)))
}

/// `|u(x0, t) - u0(x0)| < 3 eps` for every snapshot within the sphere window.
pub fn continuity_check(traj: &Trajectory, x0: (f64, f64), eps: f64, delta: f64) -> CheckOutcome {
    const NAME: &str = "sphere_continuity";
    if !(delta < eps) {
        return CheckOutcome::inconclusive(NAME, format!("need delta < eps (delta = {delta}, eps = {eps})"));
    }
    let first = traj.first();
    let osc = match initial_oscillation(&first.field, x0, delta) {
        Ok(Some(o)) => o,
        Ok(None) => return CheckOutcome::inconclusive(NAME, "delta-ball leaves the grid"),
        Err(e) => return CheckOutcome::inconclusive(NAME, e.to_string()),
    };
    if !(osc < eps) {
        return CheckOutcome::inconclusive(NAME, format!("initial oscillation {osc:.3e} is not below eps"));
    }
    let n = traj.geometry().graph_dim();
    let window = match sphere_window(eps, delta, n) {
        Ok(w) => w,
        Err(e) => return CheckOutcome::inconclusive(NAME, e.to_string()),
    };
    let k0 = nearest_node(traj.geometry(), x0).expect("located above");
    let base = first.values()[k0];
    let inside: Vec<f64> = traj
        .snapshots()
        .iter()
        .skip(1)
        .filter(|s| s.t - first.t <= window * (1.0 + 1e-12))
        .map(|s| (s.values()[k0] - base).abs())
        .collect();
    if inside.is_empty() {
        return CheckOutcome::inconclusive(NAME, format!("no snapshot inside the window {window:.3e}"));
    }
    let worst = inside.iter().copied().fold(0.0, f64::max);
    let status = if worst < 3.0 * eps { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckOutcome::new(
        NAME,
        status,
        worst,
        3.0 * eps,
        format!("eps={eps:.3e} delta={delta:.3e} window={window:.3e} snapshots={}", inside.len()),
    )
}

/// Continuity check with `eps` measured from the data: `1.01 max(osc, delta)`.
pub fn measured_continuity_check(traj: &Trajectory, x0: (f64, f64), delta: f64) -> CheckOutcome {
    match initial_oscillation(&traj.first().field, x0, delta) {
        Ok(Some(osc)) => continuity_check(traj, x0, 1.01 * osc.max(delta), delta),
        Ok(None) => CheckOutcome::inconclusive("sphere_continuity", "delta-ball leaves the grid"),
        Err(e) => CheckOutcome::inconclusive("sphere_continuity", e.to_string()),
    }
}

/// Violations of `ubar + speed t - C0 <= u <= ubar + speed t + C0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqueezeReport {
    /// `(t, below, above)` per snapshot, nonnegative magnitudes.
    pub per_snapshot: Vec<(f64, f64, f64)>,
    pub worst: f64,
    pub worst_time: f64,
    pub worst_location: (f64, f64),
}

impl SqueezeReport {
    pub fn check(&self, tolerance: f64) -> CheckOutcome {
        CheckOutcome::at_most(
            "squeeze",
            self.worst,
            tolerance,
            format!("worst at t={:.4} x=({:.4}, {:.4})", self.worst_time, self.worst_location.0, self.worst_location.1),
        )
    }
}

pub fn squeeze_check(traj: &Trajectory, profile: &TranslatorProfile, c0: f64, speed: f64) -> Result<SqueezeReport> {
    let geometry = traj.geometry();
    let bar = profile.sample_on(geometry)?;
    let t_start = traj.first().t;
    let mut report =
        SqueezeReport { per_snapshot: Vec::with_capacity(traj.len()), worst: 0.0, worst_time: t_start, worst_location: geometry.point(0) };
    for s in traj.snapshots() {
        let shift = speed * (s.t - t_start);
        let (mut below, mut above) = (0.0f64, 0.0f64);
        for (k, (&u, &ub)) in s.values().iter().zip(bar.values()).enumerate() {
            let d = u - ub - shift;
            let lo = (-c0 - d).max(0.0);
            let hi = (d - c0).max(0.0);
            if lo.max(hi) > report.worst {
                report.worst = lo.max(hi);
                report.worst_time = s.t;
                report.worst_location = geometry.point(k);
            }
            below = below.max(lo);
            above = above.max(hi);
        }
        report.per_snapshot.push((s.t, below, above));
    }
    Ok(report)
}

/// Result of comparing two trajectories node by node.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceReport {
    pub violations: usize,
    pub worst: f64,
}

impl AvoidanceReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Counts nodes where `a > b` on any common snapshot.
pub fn avoidance_check(a: &Trajectory, b: &Trajectory) -> Result<AvoidanceReport> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch("avoidance needs trajectories on the same grid".into()));
    }
    if a.len() != b.len() || a.snapshots().iter().zip(b.snapshots()).any(|(x, y)| x.t != y.t) {
        return Err(Error::GeometryMismatch("avoidance needs identical snapshot times".into()));
    }
    let mut report = AvoidanceReport { violations: 0, worst: 0.0 };
    for (sa, sb) in a.snapshots().iter().zip(b.snapshots()) {
        for (&ua, &ub) in sa.values().iter().zip(sb.values()) {
            if ua > ub {
                report.violations += 1;
                report.worst = report.worst.max(ua - ub);
            }
        }
    }
    Ok(report)
}

fn gradient_norm(field: &Field) -> Result<Vec<f64>> {
    let g1 = d1(field, 0)?;
    match field.geometry() {
        Geometry::Slab(_) => {
            let g2 = d1(field, 1)?;
            Ok(g1.values().iter().zip(g2.values()).map(|(a, b)| a.hypot(*b)).collect())
        }
        _ => Ok(g1.values().iter().map(|a| a.abs()).collect()),
    }
}

/// Smallest `C` with `|Du|(0, t*) <= exp(C (1 + sup_{B(0,mu)} |u0| / mu)^2)`,
/// `t* = mu^2 / (4 n (1 + 2n))`, clamped below by zero.
pub fn gradient_envelope(traj: &Trajectory, mu: f64) -> CheckOutcome {
    const NAME: &str = "gradient_envelope";
    let geometry = traj.geometry();
    let n = geometry.graph_dim() as f64;
    let t_star = traj.first().t + mu * mu / (4.0 * n * (1.0 + 2.0 * n));
    let Some(ball) = ball_nodes(geometry, (0.0, 0.0), mu) else {
        return CheckOutcome::inconclusive(NAME, format!("B(0, {mu}) is not covered by the grid"));
    };
    let snaps = traj.snapshots();
    let Some(hi) = snaps.iter().position(|s| s.t >= t_star * (1.0 - 1e-12)) else {
        return CheckOutcome::inconclusive(NAME, format!("trajectory ends before t* = {t_star:.4e}"));
    };
    let k0 = match nearest_node(geometry, (0.0, 0.0)) {
        Ok(k) => k,
        Err(e) => return CheckOutcome::inconclusive(NAME, e.to_string()),
    };
    let grad_at = |i: usize| gradient_norm(&snaps[i].field).map(|g| g[k0]);
    let du = if hi == 0 || snaps[hi].t == t_star {
        grad_at(hi)
    } else {
        let lo = hi - 1;
        let w = (t_star - snaps[lo].t) / (snaps[hi].t - snaps[lo].t);
        grad_at(lo).and_then(|a| grad_at(hi).map(|b| (1.0 - w) * a + w * b))
    };
    let du = match du {
        Ok(v) => v,
        Err(e) => return CheckOutcome::inconclusive(NAME, e.to_string()),
    };
    let sup0 = sup_on(traj.first().values(), &ball);
    let denom = (1.0 + sup0 / mu).powi(2);
    let implied = if du > 0.0 { (du.ln() / denom).max(0.0) } else { 0.0 };
    CheckOutcome::new(
        NAME,
        CheckStatus::Pass,
        implied,
        f64::INFINITY,
        format!("|Du|={du:.6e} at t*={t_star:.4e}, sup|u0|={sup0:.4e}"),
    )
}
