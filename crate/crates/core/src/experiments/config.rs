use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::diagnostics::FitWindow;
use crate::grid::{Geometry, Grid1D, Grid2D};
use crate::solver::{Scheme, DEFAULT_SAFETY};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "grim_reaper_1d")]
    GrimReaper1d,
    #[serde(rename = "slab2d_plane")]
    Slab2dPlane,
    #[serde(rename = "slab2d_delta_wing")]
    Slab2dDeltaWing,
    #[serde(rename = "radial_bowl")]
    RadialBowl,
    #[serde(rename = "delta_wing_extract")]
    DeltaWingExtract,
    #[serde(rename = "custom")]
    Custom,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GrimReaper1d => "grim_reaper_1d",
            Self::Slab2dPlane => "slab2d_plane",
            Self::Slab2dDeltaWing => "slab2d_delta_wing",
            Self::RadialBowl => "radial_bowl",
            Self::DeltaWingExtract => "delta_wing_extract",
            Self::Custom => "custom",
        }
    }
}

/// Geometry keys. Which ones are needed depends on the kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub h: f64,
    /// Half-width `a` of the 1D truncation `[-a, a]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    None,
    /// `amplitude * cos^2(pi rho / (2 width))` for `rho = |x - center| < width`.
    Bump {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
    },
    /// Seeded cosine modes under a smooth cutoff, rescaled to sup-norm `amplitude`.
    Fourier {
        seed: u64,
        n_modes: usize,
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Perturbation),
    Many(Vec<Perturbation>),
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Perturbation>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(p) => vec![p],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_safety")]
    pub dt_safety: f64,
    pub t_end: f64,
    /// Approximate number of snapshots after the initial one.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

fn default_safety() -> f64 {
    DEFAULT_SAFETY
}

fn default_snapshots() -> usize {
    50
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryChoice {
    /// Lumped vertical tails (1D only).
    Reservoir,
    /// `u(x_b, t) = u0(x_b) + t`.
    Translating,
    /// `u(x_b, t) = ubar(x_b) + t`.
    Exact,
    /// Slope `tan(theta)` on both x1 faces (tilted plane only), translating on x2 faces.
    Neumann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsToggles {
    #[serde(default = "yes")]
    pub harnack: bool,
    #[serde(default)]
    pub harnack_alpha: f64,
    #[serde(default = "yes")]
    pub continuity: bool,
    #[serde(default = "default_continuity_delta")]
    pub continuity_delta: f64,
    #[serde(default)]
    pub insensitivity: bool,
    /// Keep running past `t_end` until the fit residual settles.
    #[serde(default)]
    pub run_to_steady: bool,
    #[serde(default = "default_extensions")]
    pub max_extensions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pancake_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1_bracket: Option<f64>,
}

fn yes() -> bool {
    true
}

fn default_continuity_delta() -> f64 {
    0.1
}

fn default_extensions() -> usize {
    4
}

impl Default for DiagnosticsToggles {
    fn default() -> Self {
        Self {
            harnack: true,
            harnack_alpha: 0.0,
            continuity: true,
            continuity_delta: default_continuity_delta(),
            insensitivity: false,
            run_to_steady: false,
            max_extensions: default_extensions(),
            pancake_lambda: None,
            gradient_mu: None,
            c1_bracket: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub x1: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<[f64; 2]>,
}

/// Continuation schedule for wing extraction: `(h, duration)` from coarse to fine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingConfig {
    #[serde(default = "default_ell")]
    pub seed_ell: f64,
    #[serde(default)]
    pub levels: Vec<[f64; 2]>,
    #[serde(default = "default_wing_safety")]
    pub dt_safety: f64,
}

fn default_ell() -> f64 {
    1.0
}

fn default_wing_safety() -> f64 {
    0.9
}

impl Default for WingConfig {
    fn default() -> Self {
        Self { seed_ell: default_ell(), levels: Vec::new(), dt_safety: default_wing_safety() }
    }
}

/// One scenario, as read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub geometry: GeometryConfig,
    #[serde(default, deserialize_with = "one_or_many")]
    pub perturbation: Vec<Perturbation>,
    /// Declared sup-norm budget of the perturbation.
    pub c0_budget: f64,
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryChoice>,
    /// Evaluate the perturbation at `x1 = 0` only (slab data that is affine in x1).
    #[serde(default)]
    pub affine_in_x1: bool,
    #[serde(default)]
    pub diagnostics: DiagnosticsToggles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wing: Option<WingConfig>,
}

/// Command-line overrides applied on top of a file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a scenario file; a relative `profile_path` is resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(p), Some(dir)) = (cfg.profile_path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        if let Some(h) = o.h {
            self.geometry.h = h;
        }
        if let Some(t) = o.t_end {
            self.solver.t_end = t;
        }
        if let Some(s) = o.seed {
            for p in &mut self.perturbation {
                if let Perturbation::Fourier { seed, .. } = p {
                    *seed = s;
                }
            }
        }
        self.validate()
    }

    fn need(&self, v: Option<f64>, key: &str) -> Result<f64> {
        v.ok_or_else(|| Error::Config(format!("{} scenarios need geometry.{key}", self.kind.as_str())))
    }

    /// Structural checks that do not need a grid or a profile.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if !(g.h > 0.0 && g.h.is_finite()) {
            return Err(Error::Config(format!("geometry.h must be positive, got {}", g.h)));
        }
        if !(self.c0_budget >= 0.0 && self.c0_budget.is_finite()) {
            return Err(Error::Config("c0_budget must be a finite nonnegative number".into()));
        }
        if !(self.solver.t_end > 0.0 && self.solver.t_end.is_finite()) {
            return Err(Error::Config("solver.t_end must be positive".into()));
        }
        if !(self.solver.dt_safety > 0.0 && self.solver.dt_safety <= 1.0) {
            return Err(Error::Config("solver.dt_safety must lie in (0, 1]".into()));
        }
        if self.solver.snapshots == 0 {
            return Err(Error::Config("solver.snapshots must be >= 1".into()));
        }
        match self.kind {
            ScenarioKind::GrimReaper1d => {
                let a = self.half_width();
                if !(a > 0.0 && a < FRAC_PI_2) {
                    return Err(Error::Config(format!("geometry.a must lie in (0, pi/2), got {a}")));
                }
                if matches!(self.boundary, Some(BoundaryChoice::Neumann)) {
                    return Err(Error::Config("neumann boundaries are for the tilted plane".into()));
                }
            }
            ScenarioKind::Slab2dPlane | ScenarioKind::DeltaWingExtract => {
                let b = self.need(g.b, "b")?;
                self.need(g.delta, "delta")?;
                self.need(g.l, "l")?;
                if !(b > FRAC_PI_2) {
                    return Err(Error::Config(format!("slab half-width b must exceed pi/2, got {b}")));
                }
                if matches!(self.boundary, Some(BoundaryChoice::Reservoir)) {
                    return Err(Error::Config("reservoir boundaries are 1D only".into()));
                }
            }
            ScenarioKind::RadialBowl => {
                let r = self.need(g.r_max, "r_max")?;
                if r < 10.0 {
                    return Err(Error::Config(format!("radial bowl scenarios need r_max >= 10, got {r}")));
                }
                if self.dim() < 2 {
                    return Err(Error::Config("radial bowl scenarios need dim >= 2".into()));
                }
                if matches!(self.boundary, Some(BoundaryChoice::Reservoir | BoundaryChoice::Neumann)) {
                    return Err(Error::Config("radial scenarios take translating or exact boundaries".into()));
                }
            }
            ScenarioKind::Slab2dDeltaWing | ScenarioKind::Custom => {
                if self.profile_path.is_none() {
                    return Err(Error::Config(format!("{} scenarios need profile_path", self.kind.as_str())));
                }
                let neumann_ok = self.kind == ScenarioKind::Slab2dDeltaWing;
                if matches!(self.boundary, Some(BoundaryChoice::Reservoir))
                    || (!neumann_ok && matches!(self.boundary, Some(BoundaryChoice::Neumann)))
                {
                    return Err(Error::Config("unsupported boundary choice for a tabulated scenario".into()));
                }
            }
        }
        for p in &self.perturbation {
            match p {
                Perturbation::None => {}
                Perturbation::Bump { amplitude, width, center } => {
                    if !(width.is_finite() && *width > 0.0) || !amplitude.is_finite() {
                        return Err(Error::Config("bump needs a finite amplitude and a positive width".into()));
                    }
                    if center.len() > 2 {
                        return Err(Error::Config("bump center has at most two coordinates".into()));
                    }
                }
                Perturbation::Fourier { n_modes, amplitude, cutoff, .. } => {
                    if *n_modes == 0 || !amplitude.is_finite() {
                        return Err(Error::Config("fourier needs n_modes >= 1 and a finite amplitude".into()));
                    }
                    if let Some(c) = cutoff {
                        if !(*c > 0.0) {
                            return Err(Error::Config("fourier cutoff must be positive".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn half_width(&self) -> f64 {
        self.geometry.a.unwrap_or(1.45)
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim.unwrap_or(2)
    }

    /// Perturbations with compact support away from the boundary (no Fourier ripple).
    pub fn compact_perturbation(&self) -> bool {
        self.perturbation.iter().all(|p| !matches!(p, Perturbation::Fourier { .. }))
    }

    /// The grid this scenario evolves on (tabulated kinds use the table's grid instead).
    pub fn geometry_grid(&self) -> Result<Geometry> {
        let g = &self.geometry;
        match self.kind {
            ScenarioKind::GrimReaper1d => {
                let a = self.half_width();
                Ok(Geometry::Interval(Grid1D::with_spacing(-a, a, g.h)?))
            }
            ScenarioKind::Slab2dPlane | ScenarioKind::DeltaWingExtract => Ok(Geometry::Slab(Grid2D::slab(
                self.need(g.b, "b")?,
                self.need(g.delta, "delta")?,
                self.need(g.l, "l")?,
                g.h,
            )?)),
            ScenarioKind::RadialBowl => {
                Geometry::radial(Grid1D::with_spacing(0.0, self.need(g.r_max, "r_max")?, g.h)?, self.dim())
            }
            ScenarioKind::Slab2dDeltaWing | ScenarioKind::Custom => {
                Err(Error::Config("tabulated scenarios take their grid from the profile".into()))
            }
        }
    }

    /// The configured window, or a kind-specific default.
    pub fn fit_window(&self, geometry: &Geometry) -> FitWindow {
        if let Some(w) = &self.window {
            return FitWindow { x1: (w.x1[0], w.x1[1]), x2: w.x2.map(|x| (x[0], x[1])) };
        }
        default_window(geometry)
    }
}

/// Kind-independent default window: 1D keeps 0.45 clear of each end, slabs keep
/// 0.5 clear in x1 and 0.25 clear in x2 of the Dirichlet faces, radial uses half the radius.
pub fn default_window(geometry: &Geometry) -> FitWindow {
    match geometry {
        Geometry::Interval(g) => {
            let half = (0.5 * (g.hi() - g.lo()) - 0.45).max(0.25 * (g.hi() - g.lo()));
            let mid = 0.5 * (g.lo() + g.hi());
            FitWindow::interval(mid - half, mid + half)
        }
        Geometry::Radial { grid, .. } => FitWindow::interval(0.0, 0.5 * grid.hi()),
        Geometry::Slab(g) => {
            let (l, w) = (g.x1().hi(), g.x2().hi());
            let x1 = (l - 0.5).max(0.5 * l);
            let x2 = (w - 0.25).max(0.5 * w);
            FitWindow::rect((-x1, x1), (-x2, x2))
        }
    }
}

fn cos2_cutoff(s: f64) -> f64 {
    if s < 1.0 {
        (FRAC_PI_2 * s).cos().powi(2)
    } else {
        0.0
    }
}

/// Default radius of the Fourier cutoff for a geometry.
fn default_cutoff(geometry: &Geometry) -> f64 {
    match geometry {
        Geometry::Interval(g) => 0.8 * 0.5 * (g.hi() - g.lo()),
        Geometry::Radial { grid, .. } => 0.4 * grid.hi(),
        Geometry::Slab(g) => 0.8 * g.x1().hi().min(g.x2().hi()),
    }
}

/// Nodal values of one perturbation. Fourier ripples are rescaled so the
/// larger of their sup on a fixed reference lattice and their nodal sup
/// equals `amplitude`.
pub fn perturbation_values(p: &Perturbation, geometry: &Geometry, affine_in_x1: bool) -> Result<Vec<f64>> {
    let n = geometry.node_count();
    let point = |k: usize| {
        let (x, y) = geometry.point(k);
        if affine_in_x1 {
            match geometry {
                Geometry::Slab(_) => (0.0, y),
                _ => (x, y),
            }
        } else {
            (x, y)
        }
    };
    match p {
        Perturbation::None => Ok(vec![0.0; n]),
        Perturbation::Bump { amplitude, center, width } => {
            let c = (center.first().copied().unwrap_or(0.0), center.get(1).copied().unwrap_or(0.0));
            Ok((0..n)
                .map(|k| {
                    let (x, y) = point(k);
                    let rho = match geometry {
                        Geometry::Slab(_) => (x - c.0).hypot(y - c.1),
                        _ => (x - c.0).abs(),
                    };
                    amplitude * cos2_cutoff(rho / width)
                })
                .collect())
        }
        Perturbation::Fourier { seed, n_modes, amplitude, cutoff } => {
            let r = cutoff.unwrap_or_else(|| default_cutoff(geometry));
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let modes: Vec<(f64, f64, f64, f64, f64)> = (1..=*n_modes)
                .map(|k| {
                    let a = rng.gen_range(-1.0..1.0) / k as f64;
                    let p1 = rng.gen_range(0.0..2.0 * PI);
                    let k2 = rng.gen_range(1..=*n_modes) as f64;
                    let p2 = rng.gen_range(0.0..2.0 * PI);
                    (a, k as f64, p1, k2, p2)
                })
                .collect();
            let eval = |x: f64, y: f64| -> f64 {
                let rho = match geometry {
                    Geometry::Interval(_) => x.abs(),
                    Geometry::Radial { .. } => x,
                    Geometry::Slab(_) => x.hypot(y),
                };
                let cut = cos2_cutoff(rho / r);
                if cut == 0.0 {
                    return 0.0;
                }
                let sum: f64 = modes
                    .iter()
                    .map(|&(a, k1, p1, k2, p2)| match geometry {
                        // even in r so the origin stays smooth
                        Geometry::Radial { .. } => a * (k1 * PI * x / r).cos(),
                        Geometry::Interval(_) => a * (k1 * PI * x / r + p1).cos(),
                        Geometry::Slab(_) => a * (k1 * PI * y / r + p1).cos() * (k2 * PI * x / r + p2).cos(),
                    })
                    .sum();
                sum * cut
            };
            let raw: Vec<f64> = (0..n)
                .map(|k| {
                    let (x, y) = point(k);
                    eval(x, y)
                })
                .collect();
            // normalise on a fixed lattice so the ripple does not depend on the grid
            const M: usize = 400;
            let lattice = |i: usize| -r + 2.0 * r * i as f64 / M as f64;
            let reference = match geometry {
                Geometry::Slab(_) if !affine_in_x1 => (0..=M)
                    .flat_map(|i| (0..=M).map(move |j| (lattice(i), lattice(j))))
                    .map(|(x, y)| eval(x, y).abs())
                    .fold(0.0f64, f64::max),
                Geometry::Slab(_) => (0..=M).map(|j| eval(0.0, lattice(j)).abs()).fold(0.0f64, f64::max),
                Geometry::Radial { .. } => (0..=M).map(|i| eval(lattice(i).abs(), 0.0).abs()).fold(0.0f64, f64::max),
                Geometry::Interval(_) => (0..=M).map(|i| eval(lattice(i), 0.0).abs()).fold(0.0f64, f64::max),
            };
            let nodal = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sup = reference.max(nodal);
            if sup == 0.0 {
                return Ok(raw);
            }
            Ok(raw.into_iter().map(|v| v * amplitude / sup).collect())
        }
    }
}

/// Sum of all configured perturbations, checked against the declared budget.
pub fn total_perturbation(cfg: &ScenarioConfig, geometry: &Geometry) -> Result<Vec<f64>> {
    let mut total = vec![0.0; geometry.node_count()];
    for p in &cfg.perturbation {
        for (t, v) in total.iter_mut().zip(perturbation_values(p, geometry, cfg.affine_in_x1)?) {
            *t += v;
        }
    }
    let sup = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup > cfg.c0_budget * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::Config(format!(
            "perturbation sup-norm {sup:.6e} exceeds the declared budget c0_budget = {}",
            cfg.c0_budget
        )));
    }
    if cfg.kind == ScenarioKind::GrimReaper1d {
        let Geometry::Interval(g) = geometry else { unreachable!("1D scenarios use interval grids") };
        let margin = crate::diagnostics::WINDOW_MARGIN as f64 * g.h();
        for p in &cfg.perturbation {
            if let Perturbation::Bump { center, width, .. } = p {
                let c = center.first().copied().unwrap_or(0.0);
                if c - width <= g.lo() + margin || c + width >= g.hi() - margin {
                    return Err(Error::Config(format!(
                        "bump support [{}, {}] must stay {margin} clear of the truncation ends",
                        c - width,
                        c + width
                    )));
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRIM: &str = r#"
name = "bump"
kind = "grim_reaper_1d"
c0_budget = 0.2

[geometry]
h = 0.01

[perturbation]
type = "bump"
amplitude = 0.2
width = 0.6

[solver]
t_end = 1.0
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ScenarioConfig::from_toml(GRIM).unwrap();
        assert_eq!(cfg.kind, ScenarioKind::GrimReaper1d);
        assert_eq!(cfg.perturbation.len(), 1);
        assert_eq!(cfg.solver.dt_safety, DEFAULT_SAFETY);
        let again = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_budget_overrun_and_unknown_keys() {
        let cfg = ScenarioConfig::from_toml(&GRIM.replace("c0_budget = 0.2", "c0_budget = 0.1")).unwrap();
        let geom = cfg.geometry_grid().unwrap();
        assert!(matches!(total_perturbation(&cfg, &geom), Err(Error::Config(_))));
        assert!(ScenarioConfig::from_toml(&GRIM.replace("t_end", "t_stop")).is_err());
        assert!(ScenarioConfig::from_toml(&GRIM.replace("grim_reaper_1d", "slab2d_plane")).is_err());
    }

    #[test]
    fn fourier_is_seeded_and_normalised() {
        let geom = Geometry::Interval(Grid1D::with_spacing(-1.4, 1.4, 0.01).unwrap());
        let p = Perturbation::Fourier { seed: 7, n_modes: 5, amplitude: 0.3, cutoff: None };
        let a = perturbation_values(&p, &geom, false).unwrap();
        let b = perturbation_values(&p, &geom, false).unwrap();
        assert_eq!(a, b);
        let sup = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(sup <= 0.3 && sup > 0.29);
        assert_eq!(a[0], 0.0);
    }
}
