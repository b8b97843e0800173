//! Explicit time integration of graphical mean curvature flow.
//!
//! * Interval: `u_t = (arctan u_x)_x`, which equals `u_xx / (1 + u_x^2)`. The
//!   flux form keeps the update monotone for `dt <= h^2/2` and makes the
//!   trapezoid mass change only through boundary fluxes.
//! * Radial: the same flux term plus the drift `(n-1) u_r / r`; the origin uses
//!   the symmetric limit `u_t = n u_rr`.
//! * Slab: `u_t = a11 u_11 + 2 a12 u_12 + a22 u_22` with
//!   `a = I - Du Du^T / (1 + |Du|^2)`. The mixed derivative uses the
//!   seven-point stencil whose diagonal is picked by the sign of `a12`, which
//!   keeps all neighbour weights nonnegative whenever `a11, a22 >= |a12|`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Geometry, Grid1D, Grid2D};
use crate::translators::TranslatorProfile;

/// Runs are aborted once any value exceeds this magnitude.
pub const BLOW_UP_LIMIT: f64 = 1e12;

/// Default `dt` safety factor.
pub const DEFAULT_SAFETY: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    /// Interval faces.
    Left,
    Right,
    /// Radial outer boundary.
    Outer,
    /// Slab faces; corners belong to the `x2` faces.
    X1Lo,
    X1Hi,
    X2Lo,
    X2Hi,
}

impl Face {
    pub fn all_for(geometry: &Geometry) -> &'static [Face] {
        match geometry {
            Geometry::Interval(_) => &[Face::Left, Face::Right],
            Geometry::Radial { .. } => &[Face::Outer],
            Geometry::Slab(_) => &[Face::X1Lo, Face::X1Hi, Face::X2Lo, Face::X2Hi],
        }
    }

    /// Node indices owned by this face, in increasing order.
    pub fn nodes(&self, geometry: &Geometry) -> Vec<usize> {
        match (self, geometry) {
            (Face::Left, Geometry::Interval(_)) => vec![0],
            (Face::Right, Geometry::Interval(g)) => vec![g.n_cells()],
            (Face::Outer, Geometry::Radial { grid, .. }) => vec![grid.n_cells()],
            (Face::X1Lo, Geometry::Slab(g)) => (1..g.n2() - 1).map(|j| g.idx(0, j)).collect(),
            (Face::X1Hi, Geometry::Slab(g)) => (1..g.n2() - 1).map(|j| g.idx(g.n1() - 1, j)).collect(),
            (Face::X2Lo, Geometry::Slab(g)) => (0..g.n1()).map(|i| g.idx(i, 0)).collect(),
            (Face::X2Hi, Geometry::Slab(g)) => (0..g.n1()).map(|i| g.idx(i, g.n2() - 1)).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletSource {
    /// `u(x_b, t) = u0(x_b) + t`.
    Translating,
    /// `u(x_b, t) = ubar(x_b) + speed t` for a reference profile.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FaceCondition {
    /// `u = base + speed * t` node by node along the face.
    Dirichlet { base: Vec<f64>, speed: f64, source: DirichletSource },
    /// Prescribed `du/dx` (interval) or `du/dx1` (slab `x1` faces).
    NeumannSlope { slope: f64 },
    /// Interval only: the graph turns vertical at distance `tail` beyond the
    /// face, and the truncated tail is lumped into the boundary node.
    TailReservoir { tail: f64 },
}

impl FaceCondition {
    pub fn name(&self) -> &'static str {
        match self {
            FaceCondition::Dirichlet { source: DirichletSource::Translating, .. } => "translating_dirichlet",
            FaceCondition::Dirichlet { source: DirichletSource::Exact, .. } => "exact_dirichlet",
            FaceCondition::NeumannSlope { .. } => "neumann_slope",
            FaceCondition::TailReservoir { .. } => "tail_reservoir",
        }
    }
}

/// One condition per boundary face.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPolicy {
    faces: Vec<(Face, FaceCondition)>,
}

impl BoundaryPolicy {
    pub fn new(faces: Vec<(Face, FaceCondition)>) -> Self {
        Self { faces }
    }

    /// Translating Dirichlet data `u(x_b, t) = u(x_b, t0) + (t - t0)` on every face.
    pub fn translating(field: &Field, t0: f64) -> Self {
        let geom = field.geometry();
        let faces = Face::all_for(geom)
            .iter()
            .map(|&face| {
                let base = face.nodes(geom).iter().map(|&k| field.values()[k] - t0).collect();
                (face, FaceCondition::Dirichlet { base, speed: 1.0, source: DirichletSource::Translating })
            })
            .collect();
        Self { faces }
    }

    /// Boundary values `ubar(x_b) + speed t` taken from a reference profile.
    pub fn exact(profile: &TranslatorProfile, geometry: &Geometry, speed: f64) -> Result<Self> {
        let faces = Face::all_for(geometry)
            .iter()
            .map(|&face| {
                let base = face
                    .nodes(geometry)
                    .iter()
                    .map(|&k| {
                        let (x, y) = geometry.point(k);
                        profile.value_at(x, y)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((face, FaceCondition::Dirichlet { base, speed, source: DirichletSource::Exact }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { faces })
    }

    /// Replace the condition on one face.
    pub fn with_face(mut self, face: Face, condition: FaceCondition) -> Self {
        self.faces.retain(|(f, _)| *f != face);
        self.faces.push((face, condition));
        self
    }

    pub fn faces(&self) -> &[(Face, FaceCondition)] {
        &self.faces
    }

    pub fn condition(&self, face: Face) -> Option<&FaceCondition> {
        self.faces.iter().find(|(f, _)| *f == face).map(|(_, c)| c)
    }

    /// Lumped tail length beyond an interval face (zero unless it is a reservoir).
    pub fn tail(&self, face: Face) -> f64 {
        match self.condition(face) {
            Some(FaceCondition::TailReservoir { tail }) => *tail,
            _ => 0.0,
        }
    }

    pub fn validate(&self, geometry: &Geometry) -> Result<()> {
        let expected = Face::all_for(geometry);
        for face in expected {
            let count = self.faces.iter().filter(|(f, _)| f == face).count();
            if count != 1 {
                return Err(Error::Policy(format!("face {face:?} has {count} conditions, expected one")));
            }
        }
        if let Some((f, _)) = self.faces.iter().find(|(f, _)| !expected.contains(f)) {
            return Err(Error::Policy(format!("face {f:?} does not exist on this geometry")));
        }
        for (face, cond) in &self.faces {
            match cond {
                FaceCondition::Dirichlet { base, .. } => {
                    let n = face.nodes(geometry).len();
                    if base.len() != n {
                        return Err(Error::Policy(format!(
                            "face {face:?} has {n} nodes but {} Dirichlet values",
                            base.len()
                        )));
                    }
                }
                FaceCondition::NeumannSlope { slope } => {
                    let ok = matches!(face, Face::X1Lo | Face::X1Hi | Face::Left | Face::Right);
                    if !ok || !slope.is_finite() {
                        return Err(Error::Policy(format!(
                            "neumann_slope is only allowed on interval faces and slab x1-faces, not {face:?}"
                        )));
                    }
                }
                FaceCondition::TailReservoir { tail } => {
                    if !matches!(face, Face::Left | Face::Right) || !(*tail >= 0.0) {
                        return Err(Error::Policy(format!(
                            "tail_reservoir needs an interval face and tail >= 0 (face {face:?}, tail {tail})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Solution `u(., t)` together with the boundary policy driving it.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub field: Field,
    pub policy: Arc<BoundaryPolicy>,
}

impl FlowState {
    pub fn new(t: f64, field: Field, policy: BoundaryPolicy) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Config(format!("non-finite start time {t}")));
        }
        policy.validate(field.geometry())?;
        Ok(Self { t, field, policy: Arc::new(policy) })
    }

    pub fn geometry(&self) -> &Geometry {
        self.field.geometry()
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ExplicitEuler,
    /// Same stencils with the sign of the interior velocity flipped: a
    /// backward-heat control that harness checks must reject.
    SignReversedControl,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt_safety: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub scheme: Scheme,
}

impl SolverConfig {
    pub fn new(t_end: f64, snapshot_stride: usize) -> Self {
        Self { dt_safety: DEFAULT_SAFETY, t_end, snapshot_stride, scheme: Scheme::ExplicitEuler }
    }

    pub fn with_safety(mut self, sigma: f64) -> Self {
        self.dt_safety = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::Config(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety)));
        }
        if !self.t_end.is_finite() {
            return Err(Error::Config("t_end must be finite".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Stability-limited time step `sigma * dt_max` for the field's geometry.
pub fn cfl_dt(field: &Field, sigma: f64) -> f64 {
    geometry_dt(field.geometry(), sigma)
}

pub(crate) fn geometry_dt(geometry: &Geometry, sigma: f64) -> f64 {
    match geometry {
        Geometry::Interval(g) => sigma * g.h() * g.h() / 2.0,
        Geometry::Radial { grid, dim } => {
            let h = grid.h();
            // drift budget 1 / (1 + (n-1) h / max(r, h)) is tightest at r <= h
            sigma * h * h / 2.0 / (1.0 + (*dim as f64 - 1.0))
        }
        Geometry::Slab(g) => {
            let (h1, h2) = (g.x1().h(), g.x2().h());
            sigma / (2.0 / (h1 * h1) + 2.0 / (h2 * h2))
        }
    }
}

/// Preallocated stepping machinery for one geometry and policy.
struct Integrator {
    geometry: Geometry,
    policy: Arc<BoundaryPolicy>,
    sign: f64,
    scratch: Vec<f64>,
}

impl Integrator {
    fn new(geometry: Geometry, policy: Arc<BoundaryPolicy>, scheme: Scheme) -> Self {
        let sign = match scheme {
            Scheme::ExplicitEuler => 1.0,
            Scheme::SignReversedControl => -1.0,
        };
        let n = match &geometry {
            Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => g.len(),
            Geometry::Slab(_) => 0,
        };
        Self { geometry, policy, sign, scratch: vec![0.0; n] }
    }

    /// Writes `u(t + dt)` into `out`; returns the largest magnitude written.
    fn advance(&mut self, u: &[f64], out: &mut [f64], t: f64, dt: f64) -> f64 {
        match self.geometry.clone() {
            Geometry::Interval(g) => self.advance_interval(&g, u, out, t, dt),
            Geometry::Radial { grid, dim } => self.advance_radial(&grid, dim, u, out, t, dt),
            Geometry::Slab(g) => self.advance_slab(&g, u, out, t, dt),
        }
    }

    fn dirichlet(&self, face: Face, out: &mut [f64], t_new: f64) -> f64 {
        let mut m: f64 = 0.0;
        if let Some(FaceCondition::Dirichlet { base, speed, .. }) = self.policy.condition(face) {
            for (k, b) in face.nodes(&self.geometry).into_iter().zip(base) {
                out[k] = b + speed * t_new;
                m = m.max(out[k].abs());
            }
        }
        m
    }

    fn advance_interval(&mut self, g: &Grid1D, u: &[f64], out: &mut [f64], t: f64, dt: f64) -> f64 {
        let n = g.n_cells();
        let inv_h = 1.0 / g.h();
        let h = g.h();
        let mut theta = std::mem::take(&mut self.scratch);
        for i in 0..n {
            theta[i] = ((u[i + 1] - u[i]) * inv_h).atan();
        }
        let c = self.sign * dt * inv_h;
        let mut m: f64 = 0.0;
        for i in 1..n {
            let v = u[i] + c * (theta[i] - theta[i - 1]);
            out[i] = v;
            m = m.max(v.abs());
        }
        let t_new = t + dt;
        for (face, node, inner) in [(Face::Left, 0usize, 0usize), (Face::Right, n, n - 1)] {
            let outward = if face == Face::Left { -1.0 } else { 1.0 };
            match self.policy.condition(face) {
                Some(FaceCondition::Dirichlet { .. }) => {
                    m = m.max(self.dirichlet(face, out, t_new));
                }
                Some(cond @ (FaceCondition::NeumannSlope { .. } | FaceCondition::TailReservoir { .. })) => {
                    let (flux, tail) = match cond {
                        FaceCondition::NeumannSlope { slope } => (slope.atan(), 0.0),
                        FaceCondition::TailReservoir { tail } => (outward * FRAC_PI_2, *tail),
                        FaceCondition::Dirichlet { .. } => unreachable!(),
                    };
                    let net = if face == Face::Left { theta[inner] - flux } else { flux - theta[inner] };
                    let v = u[node] + self.sign * dt * net / (0.5 * h + tail);
                    out[node] = v;
                    m = m.max(v.abs());
                }
                None => unreachable!("validated policy"),
            }
        }
        self.scratch = theta;
        m
    }

    fn advance_radial(&mut self, g: &Grid1D, dim: usize, u: &[f64], out: &mut [f64], t: f64, dt: f64) -> f64 {
        let n = g.n_cells();
        let h = g.h();
        let inv_h = 1.0 / h;
        let drift = dim as f64 - 1.0;
        let theta = &mut self.scratch;
        for i in 0..n {
            theta[i] = ((u[i + 1] - u[i]) * inv_h).atan();
        }
        let s = self.sign * dt;
        let mut m: f64 = 0.0;
        out[0] = u[0] + s * 2.0 * dim as f64 * (u[1] - u[0]) * inv_h * inv_h;
        m = m.max(out[0].abs());
        for i in 1..n {
            let r = g.node(i);
            let rate = (theta[i] - theta[i - 1]) * inv_h + drift * (u[i + 1] - u[i - 1]) * 0.5 * inv_h / r;
            let v = u[i] + s * rate;
            out[i] = v;
            m = m.max(v.abs());
        }
        m.max(self.dirichlet(Face::Outer, out, t + dt))
    }

    fn advance_slab(&mut self, g: &Grid2D, u: &[f64], out: &mut [f64], t: f64, dt: f64) -> f64 {
        let (n1, n2) = (g.n1(), g.n2());
        let (h1, h2) = (g.x1().h(), g.x2().h());
        let (i2h1, i2h2) = (0.5 / h1, 0.5 / h2);
        let (ih11, ih22, ih12) = (1.0 / (h1 * h1), 1.0 / (h2 * h2), 0.5 / (h1 * h2));
        let s = self.sign * dt;
        let mut m: f64 = 0.0;
        for j in 1..n2 - 1 {
            let row = j * n1;
            for i in 1..n1 - 1 {
                let k = row + i;
                let c = u[k];
                let (e, w, nn, ss) = (u[k + 1], u[k - 1], u[k + n1], u[k - n1]);
                let p1 = (e - w) * i2h1;
                let p2 = (nn - ss) * i2h2;
                let d11 = (e - 2.0 * c + w) * ih11;
                let d22 = (nn - 2.0 * c + ss) * ih22;
                let inv = 1.0 / (1.0 + p1 * p1 + p2 * p2);
                let a11 = (1.0 + p2 * p2) * inv;
                let a22 = (1.0 + p1 * p1) * inv;
                let a12 = -p1 * p2 * inv;
                let cross = e + w + nn + ss - 2.0 * c;
                let d12 = if a12 >= 0.0 {
                    (u[k + n1 + 1] + u[k - n1 - 1] - cross) * ih12
                } else {
                    (cross - u[k + n1 - 1] - u[k - n1 + 1]) * ih12
                };
                let v = c + s * (a11 * d11 + 2.0 * a12 * d12 + a22 * d22);
                out[k] = v;
                m = m.max(v.abs());
            }
        }
        let t_new = t + dt;
        for face in [Face::X1Lo, Face::X1Hi] {
            match self.policy.condition(face) {
                Some(FaceCondition::Dirichlet { .. }) => m = m.max(self.dirichlet(face, out, t_new)),
                Some(FaceCondition::NeumannSlope { slope }) => {
                    for j in 1..n2 - 1 {
                        let row = j * n1;
                        let v = if face == Face::X1Lo {
                            (4.0 * out[row + 1] - out[row + 2] - 2.0 * h1 * slope) / 3.0
                        } else {
                            (4.0 * out[row + n1 - 2] - out[row + n1 - 3] + 2.0 * h1 * slope) / 3.0
                        };
                        let idx = if face == Face::X1Lo { row } else { row + n1 - 1 };
                        out[idx] = v;
                        m = m.max(v.abs());
                    }
                }
                _ => unreachable!("validated policy"),
            }
        }
        m = m.max(self.dirichlet(Face::X2Lo, out, t_new));
        m.max(self.dirichlet(Face::X2Hi, out, t_new))
    }
}

fn checked_dt(state: &FlowState, dt: f64) -> Result<()> {
    let limit = cfl_dt(&state.field, 1.0);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    Ok(())
}

fn step_impl(state: &FlowState, dt: f64, scheme: Scheme) -> Result<FlowState> {
    let mut integ = Integrator::new(state.geometry().clone(), state.policy.clone(), scheme);
    let mut out = vec![0.0; state.field.len()];
    let m = integ.advance(state.values(), &mut out, state.t, dt);
    if !(m <= BLOW_UP_LIMIT) {
        let k = out.iter().position(|v| !(v.abs() <= BLOW_UP_LIMIT)).unwrap_or(0);
        return Err(Error::NonFinite(k));
    }
    Ok(FlowState {
        t: state.t + dt,
        field: Field::from_parts(state.geometry().clone(), out),
        policy: state.policy.clone(),
    })
}

/// One explicit step on an interval.
pub fn step_interval(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !matches!(state.geometry(), Geometry::Interval(_)) {
        return Err(Error::GeometryMismatch("step_interval needs an interval state".into()));
    }
    checked_dt(state, dt)?;
    step_impl(state, dt, Scheme::ExplicitEuler)
}

/// One explicit step of the radial reduction.
pub fn step_radial(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !matches!(state.geometry(), Geometry::Radial { .. }) {
        return Err(Error::GeometryMismatch("step_radial needs a radial state".into()));
    }
    checked_dt(state, dt)?;
    step_impl(state, dt, Scheme::ExplicitEuler)
}

/// One explicit step on the truncated slab.
pub fn step_slab2d(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !matches!(state.geometry(), Geometry::Slab(_)) {
        return Err(Error::GeometryMismatch("step_slab2d needs a slab state".into()));
    }
    checked_dt(state, dt)?;
    step_impl(state, dt, Scheme::ExplicitEuler)
}

/// One explicit step on any geometry.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState> {
    checked_dt(state, dt)?;
    step_impl(state, dt, Scheme::ExplicitEuler)
}

/// One explicit step without the stability guard, for probing what happens
/// beyond the limit.
pub fn step_unguarded(state: &FlowState, dt: f64) -> Result<FlowState> {
    step_impl(state, dt, Scheme::ExplicitEuler)
}

/// Ordered snapshots of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    snapshots: Vec<FlowState>,
    steps: Vec<usize>,
    config: SolverConfig,
    dt: f64,
}

impl Trajectory {
    pub fn snapshots(&self) -> &[FlowState] {
        &self.snapshots
    }

    /// Step index of every snapshot.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// The (uniform) step size used.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &FlowState {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &FlowState {
        self.snapshots.last().expect("trajectories hold at least the initial snapshot")
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn geometry(&self) -> &Geometry {
        self.first().geometry()
    }

    /// Assemble a trajectory from externally produced snapshots (times must increase).
    pub fn from_snapshots(snapshots: Vec<FlowState>, config: SolverConfig) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::Config("a trajectory needs at least one snapshot".into()));
        }
        if snapshots.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Config("snapshot times must increase strictly".into()));
        }
        if snapshots.iter().any(|s| s.geometry() != snapshots[0].geometry()) {
            return Err(Error::GeometryMismatch("snapshots on different grids".into()));
        }
        let steps = (0..snapshots.len()).collect();
        Ok(Self { snapshots, steps, config, dt: f64::NAN })
    }

    /// Glue a continuation run that starts from this trajectory's last snapshot.
    pub fn append(&mut self, more: Trajectory) -> Result<()> {
        let end = self.last();
        if more.first().t != end.t || more.first().values() != end.values() {
            return Err(Error::Config("continuation must start from the last snapshot".into()));
        }
        if more.geometry() != self.geometry() {
            return Err(Error::GeometryMismatch("continuation on a different grid".into()));
        }
        let offset = *self.steps.last().expect("non-empty");
        self.snapshots.extend(more.snapshots.into_iter().skip(1));
        self.steps.extend(more.steps.into_iter().skip(1).map(|s| s + offset));
        self.config.t_end = more.config.t_end;
        if self.dt != more.dt {
            self.dt = f64::NAN;
        }
        Ok(())
    }
}

/// Abort carrying everything recorded up to the last good state.
#[derive(Debug)]
pub struct SolverAbort {
    pub partial: Trajectory,
    pub step: usize,
    pub t: f64,
    pub reason: String,
}

impl fmt::Display for SolverAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "solver aborted at step {} (t = {}): {}", self.step, self.t, self.reason)
    }
}

impl std::error::Error for SolverAbort {}

impl From<Box<SolverAbort>> for Error {
    fn from(a: Box<SolverAbort>) -> Self {
        Error::SolverAbort { step: a.step, t: a.t, reason: a.reason }
    }
}

/// Integrate from `initial` to `cfg.t_end` with `dt = min(cfl_dt, remaining)`.
///
/// Snapshots are taken every `snapshot_stride` steps and at the final time.
pub fn evolve(initial: &FlowState, cfg: &SolverConfig) -> std::result::Result<Trajectory, Box<SolverAbort>> {
    let abort = |partial: Trajectory, step: usize, t: f64, reason: String| {
        Box::new(SolverAbort { partial, step, t, reason })
    };
    let dt_max = cfl_dt(&initial.field, cfg.dt_safety);
    let mut traj = Trajectory { snapshots: vec![initial.clone()], steps: vec![0], config: *cfg, dt: dt_max };
    if let Err(e) = cfg.validate() {
        return Err(abort(traj, 0, initial.t, e.to_string()));
    }
    if cfg.t_end < initial.t {
        return Err(abort(traj, 0, initial.t, format!("t_end {} precedes the start {}", cfg.t_end, initial.t)));
    }
    let geometry = initial.geometry().clone();
    let mut integ = Integrator::new(geometry.clone(), initial.policy.clone(), cfg.scheme);
    let mut cur = initial.values().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut t = initial.t;
    let mut step = 0usize;
    while t < cfg.t_end {
        let remaining = cfg.t_end - t;
        let (dt, last) = if remaining <= dt_max { (remaining, true) } else { (dt_max, false) };
        let m = integ.advance(&cur, &mut next, t, dt);
        step += 1;
        if !(m <= BLOW_UP_LIMIT) {
            let reason = if next.iter().any(|v| !v.is_finite()) {
                "non-finite value".to_string()
            } else {
                format!("|u| exceeded {BLOW_UP_LIMIT:e}")
            };
            let last_good = FlowState {
                t,
                field: Field::from_parts(geometry.clone(), cur),
                policy: initial.policy.clone(),
            };
            if traj.last().t < t {
                traj.snapshots.push(last_good);
                traj.steps.push(step - 1);
            }
            return Err(abort(traj, step, t, reason));
        }
        std::mem::swap(&mut cur, &mut next);
        t = if last { cfg.t_end } else { t + dt };
        if last || step.is_multiple_of(cfg.snapshot_stride) {
            traj.snapshots.push(FlowState {
                t,
                field: Field::from_parts(geometry.clone(), cur.clone()),
                policy: initial.policy.clone(),
            });
            traj.steps.push(step);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn interval_state(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> FlowState {
        let field = Field::sample_interval(Grid1D::new(lo, hi, n).unwrap(), f).unwrap();
        let policy = BoundaryPolicy::translating(&field, 0.0);
        FlowState::new(0.0, field, policy).unwrap()
    }

    #[test]
    fn cfl_formulas() {
        let s = interval_state(0.0, 1.0, 100, |x| x);
        assert!((cfl_dt(&s.field, 0.4) - 2e-5).abs() < 1e-18);
        let s2 = interval_state(0.0, 1.0, 200, |x| x);
        assert!((cfl_dt(&s.field, 0.4) / cfl_dt(&s2.field, 0.4) - 4.0).abs() < 1e-12);
        let radial = Field::sample_radial(Grid1D::new(0.0, 1.0, 100).unwrap(), 3, |r| r).unwrap();
        assert!((cfl_dt(&radial, 1.0) - 1e-4 / 6.0).abs() < 1e-18);
        let slab = Field::sample_slab(Grid2D::slab(1.0, 0.5, 1.0, 0.1).unwrap(), |_, _| 0.0).unwrap();
        assert!((cfl_dt(&slab, 1.0) - 0.01 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn affine_interval_data_is_stationary() {
        let s = interval_state(-1.0, 1.0, 40, |x| 0.7 * x - 0.2);
        let mut policy = BoundaryPolicy::translating(&s.field, 0.0);
        for (_, c) in policy.faces.iter_mut() {
            if let FaceCondition::Dirichlet { speed, .. } = c {
                *speed = 0.0;
            }
        }
        let s = FlowState::new(0.0, s.field.clone(), policy).unwrap();
        let dt = cfl_dt(&s.field, 0.4);
        let mut cur = s.clone();
        for _ in 0..200 {
            cur = step_interval(&cur, dt).unwrap();
        }
        for (a, b) in cur.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn cfl_violation_rejected() {
        let s = interval_state(0.0, 1.0, 10, |x| x * x);
        let limit = cfl_dt(&s.field, 1.0);
        assert!(matches!(step_interval(&s, 1.01 * limit), Err(Error::CflViolation { .. })));
        assert!(step_unguarded(&s, 1.01 * limit).is_ok());
        assert!(matches!(step_radial(&s, 0.5 * limit), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn paraboloid_origin_rate_is_one() {
        for dim in [2usize, 3, 5] {
            let field =
                Field::sample_radial(Grid1D::new(0.0, 2.0, 40).unwrap(), dim, |r| r * r / (2.0 * dim as f64)).unwrap();
            let policy = BoundaryPolicy::translating(&field, 0.0);
            let s = FlowState::new(0.0, field, policy).unwrap();
            let dt = cfl_dt(&s.field, 0.5);
            let next = step_radial(&s, dt).unwrap();
            let rate = (next.values()[0] - s.values()[0]) / dt;
            assert!((rate - 1.0).abs() < 1e-12, "dim {dim}: {rate}");
        }
    }

    #[test]
    fn policy_validation() {
        let s = interval_state(0.0, 1.0, 10, |x| x);
        let g = s.geometry().clone();
        let bad = BoundaryPolicy::new(vec![(Face::Left, FaceCondition::NeumannSlope { slope: 0.0 })]);
        assert!(bad.validate(&g).is_err());
        let slab = Field::sample_slab(Grid2D::slab(1.0, 0.5, 1.0, 0.1).unwrap(), |_, _| 0.0).unwrap();
        let p = BoundaryPolicy::translating(&slab, 0.0);
        assert!(p.validate(slab.geometry()).is_ok());
        let neumann_x2 = p.clone().with_face(Face::X2Lo, FaceCondition::NeumannSlope { slope: 0.0 });
        assert!(matches!(neumann_x2.validate(slab.geometry()), Err(Error::Policy(_))));
        let neumann_x1 = p.with_face(Face::X1Hi, FaceCondition::NeumannSlope { slope: 1.0 });
        assert!(neumann_x1.validate(slab.geometry()).is_ok());
    }

    #[test]
    fn evolve_to_start_time_keeps_single_snapshot() {
        let s = interval_state(0.0, 1.0, 16, |x| x * x);
        let traj = evolve(&s, &SolverConfig::new(0.0, 5)).unwrap();
        assert_eq!(traj.len(), 1);
    }

    #[test]
    fn evolve_reports_blow_up_with_last_good_state() {
        let field =
            Field::sample_slab(Grid2D::slab(1.0, 0.5, 1.0, 0.1).unwrap(), |x1, x2| 0.1 * (x1 * 7.0).sin() * x2).unwrap();
        let policy = BoundaryPolicy::translating(&field, 0.0);
        let s = FlowState::new(0.0, field, policy).unwrap();
        let mut cfg = SolverConfig::new(10.0, 1000).with_safety(1.0);
        cfg.scheme = Scheme::SignReversedControl;
        let err = evolve(&s, &cfg).unwrap_err();
        assert!(err.step > 0);
        assert!(err.partial.last().values().iter().all(|v| v.is_finite()));
        assert!(err.partial.last().t <= err.t);
    }
}
