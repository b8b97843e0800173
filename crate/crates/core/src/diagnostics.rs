//! Scalar and field diagnostics evaluated on snapshots and trajectories.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::barriers::{CheckOutcome, CheckStatus};
use crate::error::{Error, Result};
use crate::grid::{d1, d2, hessian, Field, Geometry, Grid1D};
use crate::solver::{Face, FaceCondition, FlowState, Trajectory};
use crate::translators::TranslatorProfile;

/// Nodes kept clear of every truncation boundary by any fit window.
pub const WINDOW_MARGIN: usize = 5;

/// Curvature below this is treated as flat by the Harnack audit.
pub const KAPPA_FLOOR: f64 = 1e-4;

/// Per-snapshot scalars written to the time-series CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub sup_dist: Option<f64>,
    pub i_total: Option<f64>,
    pub sup_kappa: Option<f64>,
    pub phi: Option<f64>,
    pub c0_fit: Option<f64>,
    pub c1_fit: Option<f64>,
    pub fit_residual: Option<f64>,
    pub harnack_min: Option<f64>,
    pub entropy: Option<f64>,
    pub convexity_margin: Option<f64>,
    pub squeeze_violation: Option<f64>,
}

/// Interior sub-box on which fits and sup-distances are taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitWindow {
    pub x1: (f64, f64),
    pub x2: Option<(f64, f64)>,
}

fn axis_range(g: &Grid1D, lo: f64, hi: f64, origin_free: bool) -> Result<(usize, usize)> {
    let tol = 1e-9 * g.h();
    let first = ((lo - g.lo()) / g.h() - tol / g.h()).ceil().max(0.0) as usize;
    let last = (((hi - g.lo()) / g.h()) + tol / g.h()).floor().min(g.n_cells() as f64) as usize;
    if first > last {
        return Err(Error::Config(format!("fit window [{lo}, {hi}] holds no node")));
    }
    let lo_ok = origin_free || first >= WINDOW_MARGIN;
    if !lo_ok || last + WINDOW_MARGIN > g.n_cells() {
        return Err(Error::Config(format!(
            "fit window [{lo}, {hi}] comes within {WINDOW_MARGIN} nodes of the boundary"
        )));
    }
    Ok((first, last))
}

impl FitWindow {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self { x1: (lo, hi), x2: None }
    }

    pub fn rect(x1: (f64, f64), x2: (f64, f64)) -> Self {
        Self { x1, x2: Some(x2) }
    }

    /// The central `fraction` of every axis (radial: `[0, fraction * r_max]`).
    pub fn central(geometry: &Geometry, fraction: f64) -> Self {
        let span = |g: &Grid1D| {
            let mid = 0.5 * (g.lo() + g.hi());
            let half = 0.5 * fraction * (g.hi() - g.lo());
            (mid - half, mid + half)
        };
        match geometry {
            Geometry::Interval(g) => Self::interval(span(g).0, span(g).1),
            Geometry::Radial { grid, .. } => Self::interval(0.0, fraction * grid.hi()),
            Geometry::Slab(g) => Self::rect(span(g.x1()), span(g.x2())),
        }
    }

    /// Node indices inside the window, validated against the boundary margin.
    pub fn nodes(&self, geometry: &Geometry) -> Result<Vec<usize>> {
        match geometry {
            Geometry::Interval(g) => {
                let (a, b) = axis_range(g, self.x1.0, self.x1.1, false)?;
                Ok((a..=b).collect())
            }
            Geometry::Radial { grid, .. } => {
                let (a, b) = axis_range(grid, self.x1.0, self.x1.1, true)?;
                Ok((a..=b).collect())
            }
            Geometry::Slab(g) => {
                let x2 = self.x2.ok_or_else(|| Error::Config("slab fit windows need an x2 range".into()))?;
                let (a1, b1) = axis_range(g.x1(), self.x1.0, self.x1.1, false)?;
                let (a2, b2) = axis_range(g.x2(), x2.0, x2.1, false)?;
                Ok((a2..=b2).flat_map(|j| (a1..=b1).map(move |i| g.idx(i, j))).collect())
            }
        }
    }
}

fn interval_only(f: &Field, what: &str) -> Result<()> {
    match f.geometry() {
        Geometry::Interval(_) => Ok(()),
        _ => Err(Error::GeometryMismatch(format!("{what} needs an interval field"))),
    }
}

/// Signed curvature `u_xx / (1 + u_x^2)^{3/2}` of a 1D graph.
pub fn curvature_1d(f: &Field) -> Result<Field> {
    interval_only(f, "curvature_1d")?;
    let ux = d1(f, 0)?;
    let uxx = d2(f, 0)?;
    ux.zip_with(&uxx, |p, a| a / (1.0 + p * p).powf(1.5))
}

/// `v = sqrt(1 + |Du|^2)`, mean curvature `H` and `|A|` of a slab or radial graph.
#[derive(Clone, Debug)]
pub struct SurfaceQuantities {
    pub v: Field,
    pub mean_curvature: Field,
    pub second_fundamental_norm: Field,
}

pub fn surface_quantities(f: &Field) -> Result<SurfaceQuantities> {
    let geometry = f.geometry().clone();
    let n = f.len();
    let (mut v, mut hm, mut an) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    match &geometry {
        Geometry::Slab(_) => {
            let (p1, p2) = (d1(f, 0)?, d1(f, 1)?);
            let (a11, a12, a22) = hessian(f)?;
            for k in 0..n {
                let (p, q) = (p1.values()[k], p2.values()[k]);
                let (a, b, c) = (a11.values()[k], a12.values()[k], a22.values()[k]);
                let w2 = 1.0 + p * p + q * q;
                let w = w2.sqrt();
                // inverse metric g^{ij} = delta - p p^T / w^2
                let (g11, g12, g22) = (1.0 - p * p / w2, -p * q / w2, 1.0 - q * q / w2);
                let (m11, m12, m21, m22) = (g11 * a + g12 * b, g11 * b + g12 * c, g12 * a + g22 * b, g12 * b + g22 * c);
                v[k] = w;
                hm[k] = (m11 + m22) / w;
                an[k] = ((m11 * m11 + 2.0 * m12 * m21 + m22 * m22).max(0.0)).sqrt() / w;
            }
        }
        Geometry::Radial { grid, dim } => {
            let (ur, urr) = (d1(f, 0)?, d2(f, 0)?);
            for k in 0..n {
                let (p, a) = (ur.values()[k], urr.values()[k]);
                let w = (1.0 + p * p).sqrt();
                let r = grid.node(k);
                // principal curvatures: a / w^3 once, p / (r w) with multiplicity n-1
                let k1 = a / (w * w * w);
                let k2 = if r > 0.0 { p / (r * w) } else { a / (w * w * w) };
                v[k] = w;
                hm[k] = k1 + (*dim as f64 - 1.0) * k2;
                an[k] = (k1 * k1 + (*dim as f64 - 1.0) * k2 * k2).sqrt();
            }
        }
        Geometry::Interval(_) => {
            let kappa = curvature_1d(f)?;
            let ux = d1(f, 0)?;
            for k in 0..n {
                v[k] = (1.0 + ux.values()[k].powi(2)).sqrt();
                hm[k] = kappa.values()[k];
                an[k] = kappa.values()[k].abs();
            }
        }
    }
    Ok(SurfaceQuantities {
        v: Field::from_parts(geometry.clone(), v),
        mean_curvature: Field::from_parts(geometry.clone(), hm),
        second_fundamental_norm: Field::from_parts(geometry, an),
    })
}

fn trapezoid(g: &Grid1D, values: impl Fn(usize) -> f64) -> f64 {
    let n = g.n_cells();
    let inner: f64 = (1..n).map(&values).sum();
    g.h() * (inner + 0.5 * (values(0) + values(n)))
}

/// Trapezoid quadrature of `|u_xx| / (1 + u_x^2)` over the grid.
pub fn total_curvature(f: &Field) -> Result<f64> {
    interval_only(f, "total_curvature")?;
    let g = *f.geometry().axis_grid(0)?;
    let ux = d1(f, 0)?;
    let uxx = d2(f, 0)?;
    Ok(trapezoid(&g, |i| uxx.values()[i].abs() / (1.0 + ux.values()[i].powi(2))))
}

/// Total turning of the discrete polygon: `sum |theta_{i+1/2} - theta_{i-1/2}|`
/// over edge angles, closed by the vertical tail angles `-pi/2`, `+pi/2` on
/// faces that carry a tail reservoir.
pub fn discrete_turning(state: &FlowState) -> Result<f64> {
    interval_only(&state.field, "discrete_turning")?;
    let g = state.geometry().axis_grid(0)?;
    let u = state.values();
    let inv_h = 1.0 / g.h();
    let mut angles = Vec::with_capacity(u.len() + 1);
    if matches!(state.policy.condition(Face::Left), Some(FaceCondition::TailReservoir { .. })) {
        angles.push(-FRAC_PI_2);
    }
    angles.extend(u.windows(2).map(|w| ((w[1] - w[0]) * inv_h).atan()));
    if matches!(state.policy.condition(Face::Right), Some(FaceCondition::TailReservoir { .. })) {
        angles.push(FRAC_PI_2);
    }
    Ok(angles.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// Largest increase between consecutive entries of a time series (0 if none).
pub fn monotonicity_audit(series: &[(f64, f64)]) -> f64 {
    series.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0, f64::max)
}

/// `(1/pi) * integral (u - t - ubar)`, trapezoid on the grid plus the lumped
/// tail lengths `(left, right)` carried by the boundary nodes.
pub fn phi_mass(f: &Field, profile: &TranslatorProfile, t: f64, tails: (f64, f64)) -> Result<f64> {
    interval_only(f, "phi_mass")?;
    let g = *f.geometry().axis_grid(0)?;
    let bar = profile.sample_on(f.geometry())?;
    let w = |i: usize| f.values()[i] - t - bar.values()[i];
    let body = trapezoid(&g, w);
    Ok((body + tails.0 * w(0) + tails.1 * w(g.n_cells())) / PI)
}

/// `phi_mass` with tails read from the state's boundary policy.
pub fn phi_of_state(state: &FlowState, profile: &TranslatorProfile) -> Result<f64> {
    let tails = (state.policy.tail(Face::Left), state.policy.tail(Face::Right));
    phi_mass(&state.field, profile, state.t, tails)
}

/// Outcome of a translation fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslationFit {
    pub c0: f64,
    pub c1: f64,
    /// Root-mean-square distance on the window after the fit.
    pub residual: f64,
    /// Sup distance on the window after the fit.
    pub sup_dist: f64,
    /// The optimum sat on the edge of the c1 bracket.
    pub flagged: bool,
}

fn window_stats(u: &[f64], bar: &[f64], nodes: &[usize], t: f64) -> (f64, f64, f64) {
    let m = nodes.len() as f64;
    let mean = nodes.iter().map(|&k| u[k] - t - bar[k]).sum::<f64>() / m;
    let (mut ss, mut sup) = (0.0, 0.0f64);
    for &k in nodes {
        let d = u[k] - t - bar[k] - mean;
        ss += d * d;
        sup = sup.max(d.abs());
    }
    (mean, (ss / m).sqrt(), sup)
}

/// Minimise `f` on `[a, b]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Fit `u(.) - t ~ ubar(. + c1 e1) + c0` on the window. `c1_bracket` is the
/// half-width of the `c1` search; `None` (or an untilted profile) fixes `c1 = 0`.
pub fn fit_translation(
    f: &Field,
    profile: &TranslatorProfile,
    t: f64,
    window: &FitWindow,
    c1_bracket: Option<f64>,
) -> Result<TranslationFit> {
    let geometry = f.geometry();
    let nodes = window.nodes(geometry)?;
    let u = f.values();
    let shifted = |c1: f64| -> Result<Vec<f64>> {
        let mut bar = vec![0.0; u.len()];
        for &k in &nodes {
            let (x, y) = geometry.point(k);
            bar[k] = profile.value_at(x + c1, y)?;
        }
        Ok(bar)
    };
    let slab = matches!(geometry, Geometry::Slab(_));
    let bracket = match c1_bracket {
        Some(b) if slab && b > 0.0 => Some(b),
        _ => None,
    };
    let Some(half) = bracket else {
        let bar = shifted(0.0)?;
        let (c0, residual, sup_dist) = window_stats(u, &bar, &nodes, t);
        return Ok(TranslationFit { c0, c1: 0.0, residual, sup_dist, flagged: false });
    };
    let cost = |c1: f64| match shifted(c1) {
        Ok(bar) => window_stats(u, &bar, &nodes, t).1,
        Err(_) => f64::INFINITY,
    };
    // coarse scan first so a non-unimodal cost cannot trap the golden search
    let samples = 20;
    let step = 2.0 * half / samples as f64;
    let scan: Vec<(f64, f64)> = (0..=samples).map(|i| -half + i as f64 * step).map(|c| (c, cost(c))).collect();
    let best = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("scan is non-empty");
    let lo = scan[best.saturating_sub(1)].0;
    let hi = scan[(best + 1).min(samples)].0;
    let (c1, _) = golden_section(cost, lo, hi, 1e-9 * (1.0 + half));
    let bar = shifted(c1)?;
    let (c0, residual, sup_dist) = window_stats(u, &bar, &nodes, t);
    let flagged = best == 0 || best == samples || !residual.is_finite();
    Ok(TranslationFit { c0, c1, residual, sup_dist, flagged })
}

/// `max |du/dx1 - tan(theta)|` over interior nodes (or the window, if given).
pub fn splitting_check(f: &Field, b: f64, window: Option<&FitWindow>) -> Result<f64> {
    let Geometry::Slab(_) = f.geometry() else {
        return Err(Error::GeometryMismatch("splitting_check needs a slab field".into()));
    };
    let tan = crate::translators::tilt_angle(b)?.tan();
    let p1 = d1(f, 0)?;
    let nodes: Vec<usize> = match window {
        Some(w) => w.nodes(f.geometry())?,
        None => (0..f.len()).filter(|&k| !f.geometry().is_boundary(k)).collect(),
    };
    Ok(nodes.iter().map(|&k| (p1.values()[k] - tan).abs()).fold(0.0, f64::max))
}

fn time_derivative(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (hm, hp) = (t[1] - t[0], t[2] - t[1]);
    (hm * hm * f[2] - hp * hp * f[0] + (hp * hp - hm * hm) * f[1]) / (hm * hp * (hm + hp))
}

/// Per-snapshot minimum over the window of
/// `Z = nabla_t kappa - kappa_s^2 / kappa + kappa / (2 (t + alpha))`, where
/// `nabla_t` follows the normal and `t` is measured from the trajectory start.
/// The first and last snapshots carry no entry (central differences in time).
/// `Err` explains why the audit is inconclusive.
pub fn harnack_series(traj: &Trajectory, alpha: f64, window: &FitWindow) -> std::result::Result<Vec<(f64, f64, f64)>, String> {
    let snaps = traj.snapshots();
    if !matches!(traj.geometry(), Geometry::Interval(_)) {
        return Err("the scalar audit is one-dimensional".into());
    }
    if snaps.len() < 3 {
        return Err("need at least three snapshots".into());
    }
    let nodes = window.nodes(traj.geometry()).map_err(|e| e.to_string())?;
    let t_start = snaps[0].t;
    let kappas: Vec<Field> = snaps.iter().map(|s| curvature_1d(&s.field)).collect::<Result<_>>().map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(snaps.len() - 2);
    for k in 1..snaps.len() - 1 {
        let times = [snaps[k - 1].t, snaps[k].t, snaps[k + 1].t];
        let age = times[1] - t_start + alpha;
        if age <= 0.0 {
            return Err("t + alpha must stay positive".into());
        }
        let field = &snaps[k].field;
        let ux = d1(field, 0).map_err(|e| e.to_string())?;
        let kx = d1(&kappas[k], 0).map_err(|e| e.to_string())?;
        let (mut worst, mut at) = (f64::INFINITY, 0.0);
        for &i in &nodes {
            let kappa = kappas[k].values()[i];
            if !(kappa > KAPPA_FLOOR) {
                return Err(format!("curvature {kappa:.3e} below the floor at t={:.4}", times[1]));
            }
            let p = ux.values()[i];
            let v = (1.0 + p * p).sqrt();
            let ut = time_derivative(times, [snaps[k - 1].values()[i], field.values()[i], snaps[k + 1].values()[i]]);
            let kt = time_derivative(times, [kappas[k - 1].values()[i], kappa, kappas[k + 1].values()[i]]);
            let ks = kx.values()[i] / v;
            let z = kt - (ut * p / v) * ks - ks * ks / kappa + kappa / (2.0 * age);
            if z < worst {
                worst = z;
                at = traj.geometry().point(i).0;
            }
        }
        out.push((times[1], worst, at));
    }
    Ok(out)
}

/// Space-time minimum of the Harnack quantity; pass iff it is `>= -tolerance`.
pub fn harnack_residual(traj: &Trajectory, alpha: f64, window: &FitWindow, tolerance: f64) -> CheckOutcome {
    const NAME: &str = "harnack";
    let series = match harnack_series(traj, alpha, window) {
        Ok(s) => s,
        Err(reason) => return CheckOutcome::inconclusive(NAME, reason),
    };
    let (t, worst, x) = series.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).expect("at least one interior snapshot");
    let status = if worst >= -tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckOutcome::new(NAME, status, worst, -tolerance, format!("alpha={alpha:e}, min at t={t:.4} x={x:.4}"))
}

/// Weighted samples of a plane curve, for Gaussian-density functionals.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSample {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl CurveSample {
    pub fn new(points: Vec<[f64; 2]>, weights: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.len() != weights.len() {
            return Err(Error::Domain("a curve sample needs >= 2 points with one weight each".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Domain("curve weights must be nonnegative with a positive sum".into()));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Domain("curve points must be finite".into()));
        }
        Ok(Self { points, weights })
    }

    /// Graph of an interval field with arc-length trapezoid weights.
    pub fn from_graph(f: &Field) -> Result<Self> {
        interval_only(f, "CurveSample::from_graph")?;
        let g = f.geometry().axis_grid(0)?;
        let u = f.values();
        let points: Vec<[f64; 2]> = (0..u.len()).map(|i| [g.node(i), u[i]]).collect();
        let mut weights = vec![0.0; u.len()];
        for i in 0..u.len() - 1 {
            let ds = (points[i + 1][0] - points[i][0]).hypot(points[i + 1][1] - points[i][1]);
            weights[i] += 0.5 * ds;
            weights[i + 1] += 0.5 * ds;
        }
        Self::new(points, weights)
    }

    /// `m` equally spaced points on a circle.
    pub fn circle(centre: [f64; 2], radius: f64, m: usize) -> Result<Self> {
        let ds = 2.0 * PI * radius / m as f64;
        let points = (0..m)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / m as f64;
                [centre[0] + radius * a.cos(), centre[1] + radius * a.sin()]
            })
            .collect();
        Self::new(points, vec![ds; m])
    }

    /// Straight segment from `a` to `b` with `m` trapezoid-weighted points.
    pub fn segment(a: [f64; 2], b: [f64; 2], m: usize) -> Result<Self> {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let ds = len / (m - 1) as f64;
        let points = (0..m)
            .map(|i| {
                let s = i as f64 / (m - 1) as f64;
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
            .collect();
        let mut w = vec![ds; m];
        w[0] *= 0.5;
        w[m - 1] *= 0.5;
        Self::new(points, w)
    }

    pub fn translated(&self, by: [f64; 2]) -> Self {
        Self {
            points: self.points.iter().map(|p| [p[0] + by[0], p[1] + by[1]]).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn dilated(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| [p[0] * factor, p[1] * factor]).collect(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }
}

/// Gaussian density `F_{x0,t}` of a curve (dimension one).
pub fn f_functional(sample: &CurveSample, x0: [f64; 2], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("F needs t > 0, got {t}")));
    }
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    Ok(sample
        .points
        .iter()
        .zip(&sample.weights)
        .map(|(p, w)| {
            let d2 = (p[0] - x0[0]).powi(2) + (p[1] - x0[1]).powi(2);
            w * norm * (-d2 / (4.0 * t)).exp()
        })
        .sum())
}

/// Minimise `f` over `R^N` by the Nelder-Mead simplex method.
pub fn nelder_mead<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    start: [f64; N],
    scale: [f64; N],
    tol: f64,
    max_iter: usize,
) -> ([f64; N], f64) {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] += scale[i];
        simplex.push((p, f(&p)));
    }
    let combine = |a: &[f64; N], b: &[f64; N], s: f64| {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = a[i] + s * (b[i] - a[i]);
        }
        out
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[N].1 - simplex[0].1).abs() <= tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for i in 0..N {
                centroid[i] += p[i] / N as f64;
            }
        }
        let worst = simplex[N].0;
        let reflected = combine(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let contracted = combine(&centroid, &worst, 0.5);
            let fc = f(&contracted);
            if fc < simplex[N].1 {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = combine(&best, &entry.0, 0.5);
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub x0: [f64; 2],
    pub t: f64,
}

/// `sup F_{x0,t}` over centres in the bounding box grown by two diameters on
/// each side and `t` in `[1e-3, 10 diam^2]`: coarse grid, then a simplex
/// refinement from the best few grid points.
pub fn entropy_estimate(sample: &CurveSample) -> Result<EntropyEstimate> {
    let (lo, hi) = sample.bounding_box();
    let diam = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    if !(diam > 0.0) {
        return Err(Error::Domain("degenerate curve sample (zero diameter)".into()));
    }
    let (t_lo, t_hi): (f64, f64) = (1e-3, 10.0 * diam * diam);
    let box_lo = [lo[0] - 2.0 * diam, lo[1] - 2.0 * diam];
    let box_hi = [hi[0] + 2.0 * diam, hi[1] + 2.0 * diam];
    let clamp = |p: &[f64; 3]| {
        [
            p[0].clamp(box_lo[0], box_hi[0]),
            p[1].clamp(box_lo[1], box_hi[1]),
            p[2].clamp(t_lo.ln(), t_hi.ln()),
        ]
    };
    let objective = |p: &[f64; 3]| {
        let q = clamp(p);
        -f_functional(sample, [q[0], q[1]], q[2].exp()).unwrap_or(0.0)
    };
    let m = 13;
    let mut coarse = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let s = |k: usize| k as f64 / (m - 1) as f64;
                let p = [
                    box_lo[0] + s(a) * (box_hi[0] - box_lo[0]),
                    box_lo[1] + s(b) * (box_hi[1] - box_lo[1]),
                    t_lo.ln() + s(c) * (t_hi.ln() - t_lo.ln()),
                ];
                coarse.push((p, objective(&p)));
            }
        }
    }
    coarse.sort_by(|a, b| a.1.total_cmp(&b.1));
    let step = [(box_hi[0] - box_lo[0]) / (m - 1) as f64, (box_hi[1] - box_lo[1]) / (m - 1) as f64, 0.5];
    let best = coarse
        .iter()
        .take(4)
        .map(|(p, _)| nelder_mead(objective, *p, step, 1e-12, 2000))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("coarse grid is non-empty");
    let q = clamp(&best.0);
    Ok(EntropyEstimate { value: -best.1, x0: [q[0], q[1]], t: q[2].exp() })
}

/// Plateau of `g(r) = ubar(r) - coefficient r^2 + ln r` over `[r_lo, r_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlateauReport {
    pub plateau: f64,
    pub total_variation: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn bowl_plateau(profile: &TranslatorProfile, coefficient: f64, r_lo: f64, r_hi: f64) -> Result<PlateauReport> {
    let table = profile
        .table()
        .ok_or_else(|| Error::Table(format!("{} carries no radial table", profile.kind())))?;
    let Geometry::Radial { grid, .. } = table.field().geometry() else {
        return Err(Error::GeometryMismatch("bowl plateau needs a radial table".into()));
    };
    if grid.hi() < r_hi - 1e-9 || !(r_lo > 0.0) || r_lo >= r_hi {
        return Err(Error::Table(format!(
            "table reaches r = {}, plateau window [{r_lo}, {r_hi}] not covered",
            grid.hi()
        )));
    }
    let samples: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| (grid.node(i), table.field().values()[i]))
        .filter(|(r, _)| *r >= r_lo - 1e-9 && *r <= r_hi + 1e-9)
        .map(|(r, u)| (r, u - coefficient * r * r + r.ln()))
        .collect();
    let total_variation = samples.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
    let plateau = samples.last().map(|s| s.1).unwrap_or(f64::NAN);
    Ok(PlateauReport { plateau, total_variation, samples })
}

/// Plateau over the outer half of the table with the bowl coefficient `1/(2(m-1))`.
pub fn bowl_asymptotic_check(profile: &TranslatorProfile, m: usize) -> Result<PlateauReport> {
    if m < 2 {
        return Err(Error::Domain("bowl dimension must be >= 2".into()));
    }
    let r_max = match profile.table().map(|t| t.field().geometry().clone()) {
        Some(Geometry::Radial { grid, .. }) => grid.hi(),
        _ => return Err(Error::Table("bowl asymptotics need a radial table".into())),
    };
    if r_max < 20.0 {
        return Err(Error::Table(format!("table too short for the asymptotic audit (r_max = {r_max} < 20)")));
    }
    bowl_plateau(profile, 1.0 / (2.0 * (m as f64 - 1.0)), 0.5 * r_max, r_max)
}

/// Smallest Hessian eigenvalue over interior nodes (1D: `min u_xx`).
pub fn convexity_check(f: &Field) -> Result<f64> {
    let geometry = f.geometry();
    let interior = |k: usize| !geometry.is_boundary(k);
    let margin = match geometry {
        Geometry::Interval(_) => {
            let uxx = d2(f, 0)?;
            (0..f.len()).filter(|&k| interior(k)).map(|k| uxx.values()[k]).fold(f64::INFINITY, f64::min)
        }
        Geometry::Radial { grid, .. } => {
            let (ur, urr) = (d1(f, 0)?, d2(f, 0)?);
            (0..f.len())
                .filter(|&k| interior(k))
                .map(|k| {
                    let r = grid.node(k);
                    let tangential = if r > 0.0 { ur.values()[k] / r } else { urr.values()[k] };
                    urr.values()[k].min(tangential)
                })
                .fold(f64::INFINITY, f64::min)
        }
        Geometry::Slab(_) => {
            let (a, b, c) = hessian(f)?;
            (0..f.len())
                .filter(|&k| interior(k))
                .map(|k| {
                    let (p, q, s) = (a.values()[k], b.values()[k], c.values()[k]);
                    0.5 * (p + s) - (0.25 * (p - s).powi(2) + q * q).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        }
    };
    Ok(margin)
}

/// Smallest mean curvature over interior nodes.
pub fn mean_convexity(f: &Field) -> Result<f64> {
    let sq = surface_quantities(f)?;
    let geometry = f.geometry();
    Ok((0..f.len())
        .filter(|&k| !geometry.is_boundary(k))
        .map(|k| sq.mean_curvature.values()[k])
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn interval(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Field {
        Field::sample_interval(Grid1D::new(lo, hi, n).unwrap(), f).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let f = interval(-1.0, 1.0, 40, |x| 2.0 * x + 1.0);
        assert!(curvature_1d(&f).unwrap().sup_abs() < 1e-9);
        assert!(total_curvature(&f).unwrap() < 1e-9);

        let errs: Vec<f64> = [200, 400]
            .iter()
            .map(|&n| {
                let f = interval(-1.2, 1.2, n, |x| -x.cos().ln());
                let k = curvature_1d(&f).unwrap();
                let g = f.geometry().axis_grid(0).unwrap();
                (1..n).map(|i| (k.values()[i] - g.node(i).cos()).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 1e-4 && errs[0] / errs[1] > 3.5);

        let f = interval(-0.6, 0.6, 400, |x| (1.0 - x * x).sqrt());
        let k = curvature_1d(&f).unwrap();
        assert!((1..400).all(|i| (k.values()[i] + 1.0).abs() < 1e-4));
    }

    #[test]
    fn total_curvature_turning_angles() {
        let a = 1.2;
        let f = interval(-a, a, 800, |x| -x.cos().ln());
        assert!((total_curvature(&f).unwrap() - 2.0 * a).abs() < 1e-4);
        let a = 0.6f64;
        let f = interval(-a, a, 800, |x| (1.0 - x * x).sqrt());
        assert!((total_curvature(&f).unwrap() - 2.0 * a.asin()).abs() < 1e-5);
    }

    #[test]
    fn phi_of_translator_is_zero_and_of_bump_is_its_mass() {
        let ubar = TranslatorProfile::GrimReaper;
        let f = interval(-1.4, 1.4, 1400, |x| -x.cos().ln() + 0.7);
        assert!(phi_mass(&f, &ubar, 0.7, (0.0, 0.0)).unwrap().abs() < 1e-12);
        // cos^2 bump of amplitude A and half-width W integrates to A W
        let (amp, w) = (0.5, 0.2 * PI);
        let bump = |x: f64| if x.abs() < w { amp * (PI * x / (2.0 * w)).cos().powi(2) } else { 0.0 };
        let f = interval(-1.4, 1.4, 1400, |x| -x.cos().ln() + bump(x));
        assert!((phi_mass(&f, &ubar, 0.0, (0.1, 0.1)).unwrap() - 0.1).abs() < 1e-8);
    }

    #[test]
    fn fit_recovers_vertical_shift() {
        let ubar = TranslatorProfile::GrimReaper;
        let f = interval(-1.4, 1.4, 280, |x| -x.cos().ln() + 2.0 + 0.3);
        let fit = fit_translation(&f, &ubar, 2.0, &FitWindow::interval(-1.0, 1.0), None).unwrap();
        assert!((fit.c0 - 0.3).abs() < 1e-12 && fit.c1 == 0.0 && fit.residual < 1e-12);
    }

    #[test]
    fn fit_recovers_tilted_shift() {
        let b = 2.0;
        let p = TranslatorProfile::grim_reaper_plane(b).unwrap();
        let g = Grid2D::slab(b, 0.3, 3.0, 0.05).unwrap();
        let f = Field::sample_slab(g, |x1, x2| p.value_at(x1 + 0.2, x2).unwrap() - 0.1 + 0.5).unwrap();
        let w = FitWindow::rect((-2.0, 2.0), (-1.0, 1.0));
        let fit = fit_translation(&f, &p, 0.5, &w, Some(0.6)).unwrap();
        // a tilted plane only sees the combination c1 tan(theta) + c0
        let tan = p.theta().unwrap().tan();
        assert!((fit.c1 * tan + fit.c0 - (0.2 * tan - 0.1)).abs() < 1e-9, "{fit:?}");
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn window_margin_enforced() {
        let g = Geometry::Interval(Grid1D::new(-1.0, 1.0, 20).unwrap());
        assert!(FitWindow::interval(-0.5, 0.5).nodes(&g).is_ok());
        assert!(FitWindow::interval(-0.95, 0.5).nodes(&g).is_err());
        let r = Geometry::radial(Grid1D::new(0.0, 1.0, 20).unwrap(), 2).unwrap();
        assert_eq!(FitWindow::interval(0.0, 0.5).nodes(&r).unwrap()[0], 0);
    }

    #[test]
    fn splitting_of_exact_tilted_plane() {
        let b = 0.9 * PI;
        let p = TranslatorProfile::grim_reaper_plane(b).unwrap();
        let f = p.sample_on(&Geometry::Slab(Grid2D::slab(b, 0.3, 2.0, 0.05).unwrap())).unwrap();
        assert!(splitting_check(&f, b, None).unwrap() < 1e-10);
        let flat = Field::sample_slab(Grid2D::slab(FRAC_PI_2, 0.2, 1.0, 0.05).unwrap(), |x, _| 0.3 * x).unwrap();
        assert!((splitting_check(&flat, FRAC_PI_2, None).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn gaussian_density_values() {
        let line = CurveSample::segment([-40.0, 0.3], [40.0, 0.3], 16001).unwrap();
        assert!((f_functional(&line, [0.5, 0.3], 1.0).unwrap() - 1.0).abs() < 1e-10);
        let circle = CurveSample::circle([0.0, 0.0], 2f64.sqrt(), 512).unwrap();
        let expected = (2.0 * PI / std::f64::consts::E).sqrt();
        assert!((f_functional(&circle, [0.0, 0.0], 1.0).unwrap() - expected).abs() < 1e-12);
        assert!(f_functional(&circle, [0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (p, v) = nelder_mead(|x: &[f64; 2]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), [0.0, 0.0], [0.5, 0.5], 1e-14, 5000);
        assert!((p[0] - 1.0).abs() < 1e-5 && (p[1] + 2.0).abs() < 1e-5 && v < 1e-10);
    }

    #[test]
    fn convexity_margins() {
        let f = interval(-1.2, 1.2, 240, |x| -x.cos().ln());
        assert!((convexity_check(&f).unwrap() - 1.0).abs() < 1e-4);
        let a = interval(-1.0, 1.0, 20, |x| 0.5 * x);
        assert!(convexity_check(&a).unwrap().abs() < 1e-9);
    }
}
