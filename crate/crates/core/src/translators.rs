//! Reference translators: closed forms, the radial bowl ODE, cylinder
//! shrinkers, tabulated profiles, and the translator-equation residual
//! `Q(Du, D^2u) - 1`.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{self, Field, Geometry, Grid1D, Grid2D};

/// Residual bound a computed bowl table has to meet on `[0, r_max - 1]`.
pub const BOWL_RESIDUAL_TARGET: f64 = 1e-6;

/// Value, gradient and Hessian of a graph function at a point.
///
/// One-axis profiles use only the first gradient entry and `d2u[0][0]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub du: [f64; 2],
    pub d2u: [[f64; 2]; 2],
}

impl Jet {
    fn one_axis(u: f64, du: f64, d2u: f64) -> Self {
        Self { u, du: [du, 0.0], d2u: [[d2u, 0.0], [0.0, 0.0]] }
    }
}

/// `Q(p, A) = (delta_ij - p_i p_j / (1 + |p|^2)) A_ij` for a graph over the plane.
pub fn q_operator(p: [f64; 2], a: [[f64; 2]; 2]) -> f64 {
    let w = 1.0 + p[0] * p[0] + p[1] * p[1];
    a[0][0] + a[1][1] - (p[0] * p[0] * a[0][0] + 2.0 * p[0] * p[1] * a[0][1] + p[1] * p[1] * a[1][1]) / w
}

/// Radial form of `Q` for an `dim`-dimensional rotationally symmetric graph.
pub fn q_radial(dim: usize, r: f64, ur: f64, urr: f64) -> f64 {
    if r == 0.0 {
        dim as f64 * urr
    } else {
        urr / (1.0 + ur * ur) + (dim as f64 - 1.0) * ur / r
    }
}

/// The grim reaper `-ln cos x` with its first two derivatives.
pub fn grim_reaper(x: f64) -> Result<[f64; 3]> {
    if !(x.abs() < FRAC_PI_2) {
        return Err(Error::Domain(format!("grim reaper needs |x| < pi/2, got {x}")));
    }
    let c = x.cos();
    Ok([-c.ln(), x.tan(), 1.0 / (c * c)])
}

/// Tilt `arccos(pi / (2b))` of the grim reaper plane fitting a slab of half-width `b`.
pub fn tilt_angle(b: f64) -> Result<f64> {
    // b slightly below pi/2 from decimal round trips still means the untilted plane
    if !(b >= FRAC_PI_2 * (1.0 - 1e-14)) {
        return Err(Error::Domain(format!("tilted grim reaper planes need b >= pi/2, got {b}")));
    }
    Ok((FRAC_PI_2 / b).min(1.0).acos())
}

/// `x1 tan(theta) - ln(cos(x2 cos theta)) / cos^2(theta)` with derivatives.
pub fn tilted_grim_reaper(x1: f64, x2: f64, b: f64) -> Result<Jet> {
    let theta = tilt_angle(b)?;
    tilted_with_angle(x1, x2, b, theta)
}

fn tilted_with_angle(x1: f64, x2: f64, b: f64, theta: f64) -> Result<Jet> {
    if !(x2.abs() < b) {
        return Err(Error::Domain(format!("tilted grim reaper needs |x2| < b = {b}, got {x2}")));
    }
    let (ct, tt) = (theta.cos(), theta.tan());
    let y = x2 * ct;
    let cy = y.cos();
    Ok(Jet {
        u: x1 * tt - cy.ln() / (ct * ct),
        du: [tt, y.tan() / ct],
        d2u: [[0.0, 0.0], [0.0, 1.0 / (cy * cy)]],
    })
}

/// Radius `sqrt(-2(n-k)t)` of the sphere factor of the shrinking cylinder `S^{n-k} x R^k`.
pub fn cylinder_radius(n: usize, k: usize, t: f64) -> Result<f64> {
    if n < 2 || k < 1 || k > n - 1 {
        return Err(Error::Domain(format!("cylinders need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")));
    }
    if !(t < 0.0) {
        return Err(Error::Domain(format!("shrinking cylinders live at t < 0, got {t}")));
    }
    Ok((-2.0 * (n - k) as f64 * t).sqrt())
}

/// Pointwise translator residual; boundary nodes carry `None`.
#[derive(Clone, Debug)]
pub struct NodalResidual {
    geometry: Geometry,
    values: Vec<Option<f64>>,
}

impl NodalResidual {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values[k]
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs_where(|_, _| true)
    }

    /// Sup of `|Q - 1|` over available nodes whose coordinates satisfy `keep`.
    pub fn sup_abs_where(&self, keep: impl Fn(f64, f64) -> bool) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| {
                let (x, y) = self.geometry.point(k);
                v.filter(|_| keep(x, y)).map(f64::abs)
            })
            .fold(0.0, f64::max)
    }
}

/// `Q(Du, D^2u) - 1` at every interior node of `f`.
pub fn translator_residual(f: &Field) -> Result<NodalResidual> {
    let geom = f.geometry().clone();
    let values = match &geom {
        Geometry::Interval(_) => {
            let (p, a) = (grid::d1(f, 0)?, grid::d2(f, 0)?);
            (0..f.len())
                .map(|k| {
                    (!geom.is_boundary(k)).then(|| {
                        let p = p.values()[k];
                        a.values()[k] / (1.0 + p * p) - 1.0
                    })
                })
                .collect()
        }
        Geometry::Radial { grid, dim } => {
            let (p, a) = (grid::d1(f, 0)?, grid::d2(f, 0)?);
            (0..f.len())
                .map(|k| {
                    (!geom.is_boundary(k))
                        .then(|| q_radial(*dim, grid.node(k), p.values()[k], a.values()[k]) - 1.0)
                })
                .collect()
        }
        Geometry::Slab(_) => {
            let (p1, p2) = (grid::d1(f, 0)?, grid::d1(f, 1)?);
            let (a11, a12, a22) = grid::hessian(f)?;
            (0..f.len())
                .map(|k| {
                    (!geom.is_boundary(k)).then(|| {
                        let p = [p1.values()[k], p2.values()[k]];
                        let a = [[a11.values()[k], a12.values()[k]], [a12.values()[k], a22.values()[k]]];
                        q_operator(p, a) - 1.0
                    })
                })
                .collect()
        }
    };
    Ok(NodalResidual { geometry: geom, values })
}

/// Header metadata carried by tabulated profiles and their files.
#[derive(Clone, Debug, PartialEq)]
pub struct TableMeta {
    pub kind: String,
    pub n: usize,
    pub b: Option<f64>,
    pub theta: Option<f64>,
    pub residual_sup: f64,
    /// Extra `key=value` pairs (for example the snapshot time of a saved state).
    pub extra: Vec<(String, String)>,
}

impl TableMeta {
    pub fn new(kind: &str, n: usize, residual_sup: f64) -> Self {
        Self { kind: kind.to_string(), n, b: None, theta: None, residual_sup, extra: Vec::new() }
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn with_extra(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.retain(|(k, _)| k != key);
        self.extra.push((key.to_string(), value.to_string()));
        self
    }
}

/// Finite-difference derivative fields of a slab table.
#[derive(Clone, Debug)]
struct SlabDerivatives {
    p1: Field,
    p2: Field,
    a11: Field,
    a12: Field,
    a22: Field,
}

/// A sampled translator (radial or slab) with its metadata.
#[derive(Clone, Debug)]
pub struct Tabulated {
    meta: TableMeta,
    field: Field,
    slab: Option<Box<SlabDerivatives>>,
}

impl Tabulated {
    pub fn new(meta: TableMeta, field: Field) -> Result<Self> {
        let slab = match field.geometry() {
            Geometry::Slab(_) => {
                let (a11, a12, a22) = grid::hessian(&field)?;
                Some(Box::new(SlabDerivatives {
                    p1: grid::d1(&field, 0)?,
                    p2: grid::d1(&field, 1)?,
                    a11,
                    a12,
                    a22,
                }))
            }
            Geometry::Radial { .. } => None,
            Geometry::Interval(_) => {
                return Err(Error::Table("tabulated profiles are radial or slab tables".into()))
            }
        };
        Ok(Self { meta, field, slab })
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn eval_radial(&self, r: f64) -> Result<(Jet, f64)> {
        let grid = *self.field.geometry().axis_grid(0)?;
        let r = r.abs();
        let (i, s) = grid.locate(r)?;
        let u = self.field.values();
        let last = grid.n_cells() as isize;
        // even extension through the origin, clamped stencil at the far end
        let at = |k: isize| -> f64 {
            let k = k.abs();
            u[k.min(last) as usize]
        };
        let base = (i as isize - 1).min(last - 3);
        let xs: Vec<f64> = (0..4).map(|m| (base + m) as f64).collect();
        let ys: Vec<f64> = (0..4).map(|m| at(base + m)).collect();
        let x = i as f64 + s;
        let (v, dv, ddv) = lagrange4(&xs, &ys, x);
        let h = grid.h();
        let d4 = (0..5).map(|m| at(base + m)).collect::<Vec<_>>();
        let fourth = d4[0] - 4.0 * d4[1] + 6.0 * d4[2] - 4.0 * d4[3] + d4[4];
        let w: f64 = xs.iter().map(|xk| x - xk).product();
        let err = (fourth * w / 24.0).abs();
        Ok((Jet::one_axis(v, dv / h, ddv / (h * h)), err))
    }

    fn eval_slab(&self, x1: f64, x2: f64) -> Result<(Jet, f64)> {
        let d = self.slab.as_ref().expect("slab derivatives are built with slab tables");
        let u = grid::bilinear(&self.field, x1, x2)?;
        let p = [grid::bilinear(&d.p1, x1, x2)?, grid::bilinear(&d.p2, x1, x2)?];
        let a12 = grid::bilinear(&d.a12, x1, x2)?;
        let a = [[grid::bilinear(&d.a11, x1, x2)?, a12], [a12, grid::bilinear(&d.a22, x1, x2)?]];
        let Geometry::Slab(g) = self.field.geometry() else { unreachable!() };
        let h2 = g.x1().h().max(g.x2().h()).powi(2);
        let err = h2 / 8.0 * (a[0][0].abs() + 2.0 * a12.abs() + a[1][1].abs());
        Ok((Jet { u, du: p, d2u: a }, err))
    }
}

/// Value and first two derivatives (in index units) of the cubic through four points.
fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut v, mut dv, mut ddv) = (0.0, 0.0, 0.0);
    for k in 0..4 {
        let others: Vec<f64> = (0..4).filter(|&m| m != k).map(|m| xs[m]).collect();
        let denom: f64 = others.iter().map(|xm| xs[k] - xm).product();
        let (a, b, c) = (x - others[0], x - others[1], x - others[2]);
        v += ys[k] * a * b * c / denom;
        dv += ys[k] * (b * c + a * c + a * b) / denom;
        ddv += ys[k] * 2.0 * (a + b + c) / denom;
    }
    (v, dv, ddv)
}

/// Reference translators used as barriers, fit targets and initial data.
#[derive(Clone, Debug)]
pub enum TranslatorProfile {
    /// `-ln cos x` over `(-pi/2, pi/2)`.
    GrimReaper,
    /// Grim reaper plane over the slab of half-width `b`, tilted by `theta = arccos(pi/(2b))`.
    GrimReaperPlane { b: f64, theta: f64 },
    /// Rotationally symmetric bowl, tabulated from the radial ODE.
    Bowl(Tabulated),
    /// Shrinking cylinder `S^{n-k} x R^k`, represented by its radius only.
    CylinderShrinker { n: usize, k: usize },
    /// Any other sampled translator (for instance an extracted Delta-wing).
    Tabulated(Tabulated),
}

/// Profile value with an interpolation-error estimate (zero for closed forms).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    pub jet: Jet,
    pub interp_error: f64,
}

impl TranslatorProfile {
    pub fn grim_reaper_plane(b: f64) -> Result<Self> {
        Ok(TranslatorProfile::GrimReaperPlane { b, theta: tilt_angle(b)? })
    }

    pub fn cylinder(n: usize, k: usize) -> Result<Self> {
        cylinder_radius(n, k, -1.0)?;
        Ok(TranslatorProfile::CylinderShrinker { n, k })
    }

    pub fn kind(&self) -> &str {
        match self {
            TranslatorProfile::GrimReaper => "grim_reaper_1d",
            TranslatorProfile::GrimReaperPlane { theta, .. } if *theta > 0.0 => "tilted_grim_reaper_plane",
            TranslatorProfile::GrimReaperPlane { .. } => "grim_reaper_plane",
            TranslatorProfile::Bowl(_) => "bowl",
            TranslatorProfile::CylinderShrinker { .. } => "cylinder_shrinker",
            TranslatorProfile::Tabulated(t) => &t.meta.kind,
        }
    }

    /// Graph dimension `n` of `u: R^n -> R`.
    pub fn dim(&self) -> usize {
        match self {
            TranslatorProfile::GrimReaper => 1,
            TranslatorProfile::GrimReaperPlane { .. } => 2,
            TranslatorProfile::Bowl(t) | TranslatorProfile::Tabulated(t) => t.meta.n,
            TranslatorProfile::CylinderShrinker { n, .. } => *n,
        }
    }

    pub fn slab_half_width(&self) -> Option<f64> {
        match self {
            TranslatorProfile::GrimReaper => Some(FRAC_PI_2),
            TranslatorProfile::GrimReaperPlane { b, .. } => Some(*b),
            TranslatorProfile::Bowl(_) | TranslatorProfile::CylinderShrinker { .. } => None,
            TranslatorProfile::Tabulated(t) => t.meta.b,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            TranslatorProfile::GrimReaperPlane { theta, .. } => Some(*theta),
            TranslatorProfile::Tabulated(t) => t.meta.theta,
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&Tabulated> {
        match self {
            TranslatorProfile::Bowl(t) | TranslatorProfile::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    /// Residual bound attached to a tabulated profile.
    pub fn residual_sup(&self) -> Option<f64> {
        self.table().map(|t| t.meta.residual_sup)
    }

    /// True when the profile depends on a single radial or transverse coordinate.
    pub fn is_one_axis(&self) -> bool {
        match self {
            TranslatorProfile::GrimReaper | TranslatorProfile::Bowl(_) => true,
            TranslatorProfile::Tabulated(t) => matches!(t.field.geometry(), Geometry::Radial { .. }),
            _ => false,
        }
    }

    /// Sample the profile at `point` (`[x]`, `[r]` or `[x1, x2]`).
    pub fn eval(&self, point: &[f64]) -> Result<ProfileSample> {
        let coord = |k: usize| {
            point
                .get(k)
                .copied()
                .ok_or_else(|| Error::Domain(format!("profile {} needs {} coordinates", self.kind(), k + 1)))
        };
        let (jet, interp_error) = match self {
            TranslatorProfile::GrimReaper => {
                let [u, du, d2u] = grim_reaper(coord(0)?)?;
                (Jet::one_axis(u, du, d2u), 0.0)
            }
            TranslatorProfile::GrimReaperPlane { b, theta } => {
                (tilted_with_angle(coord(0)?, coord(1)?, *b, *theta)?, 0.0)
            }
            TranslatorProfile::Bowl(t) => t.eval_radial(coord(0)?)?,
            TranslatorProfile::Tabulated(t) => match t.field.geometry() {
                Geometry::Radial { .. } => t.eval_radial(coord(0)?)?,
                _ => t.eval_slab(coord(0)?, coord(1)?)?,
            },
            TranslatorProfile::CylinderShrinker { .. } => {
                return Err(Error::Domain("cylinder shrinkers carry a radius only".into()))
            }
        };
        Ok(ProfileSample { jet, interp_error })
    }

    /// Profile value at the coordinates of a geometry node.
    pub fn value_at(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            TranslatorProfile::GrimReaperPlane { .. } => Ok(self.eval(&[x, y])?.jet.u),
            TranslatorProfile::Tabulated(t) if matches!(t.field.geometry(), Geometry::Slab(_)) => {
                Ok(self.eval(&[x, y])?.jet.u)
            }
            _ => Ok(self.eval(&[x])?.jet.u),
        }
    }

    /// Sample the profile on every node of `geometry`.
    pub fn sample_on(&self, geometry: &Geometry) -> Result<Field> {
        let values = (0..geometry.node_count())
            .map(|k| {
                let (x, y) = geometry.point(k);
                self.value_at(x, y)
            })
            .collect::<Result<Vec<_>>>()?;
        Field::new(geometry.clone(), values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let t = self
            .table()
            .ok_or_else(|| Error::Table(format!("{} is a closed form, nothing to tabulate", self.kind())))?;
        write_table(path, &t.meta, &t.field)
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a radial or slab table in the line-oriented profile format.
pub fn table_to_string(meta: &TableMeta, field: &Field) -> Result<String> {
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_else(|| "none".into());
    let mut out = format!(
        "# kind={} n={} b={} theta={} residual_sup={}\n",
        meta.kind,
        meta.n,
        opt(meta.b),
        opt(meta.theta),
        fmt17(meta.residual_sup)
    );
    if !meta.extra.is_empty() {
        let extras: Vec<String> = meta.extra.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "# {}", extras.join(" "));
    }
    let vals = field.values();
    match field.geometry() {
        Geometry::Radial { grid, .. } | Geometry::Interval(grid) => {
            for (i, v) in vals.iter().enumerate() {
                let _ = writeln!(out, "{},{}", fmt17(grid.node(i)), fmt17(*v));
            }
        }
        Geometry::Slab(g) => {
            for j in 0..g.n2() {
                for i in 0..g.n1() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt17(g.x1().node(i)),
                        fmt17(g.x2().node(j)),
                        fmt17(vals[g.idx(i, j)])
                    );
                }
            }
        }
    }
    Ok(out)
}

pub fn write_table(path: &Path, meta: &TableMeta, field: &Field) -> Result<()> {
    std::fs::write(path, table_to_string(meta, field)?)?;
    Ok(())
}

/// Parse the profile format. Radial tables come back with radial geometry
/// when they start at `r = 0` and `n >= 2`, otherwise as an interval.
pub fn table_from_str(text: &str) -> Result<(TableMeta, Field)> {
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for tok in rest.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    keys.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Table(format!("line {}: {e}", lineno + 1)))?;
        rows.push(row);
    }
    let get = |k: &str| keys.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    let num = |k: &str| -> Result<Option<f64>> {
        match get(k) {
            None => Ok(None),
            Some(v) if v == "none" => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Table(format!("bad value for {k}: {v}"))),
        }
    };
    let kind = get("kind").ok_or_else(|| Error::Table("missing kind".into()))?;
    let n: usize = get("n")
        .ok_or_else(|| Error::Table("missing n".into()))?
        .parse()
        .map_err(|_| Error::Table("bad n".into()))?;
    let standard = ["kind", "n", "b", "theta", "residual_sup"];
    let meta = TableMeta {
        kind,
        n,
        b: num("b")?,
        theta: num("theta")?,
        residual_sup: num("residual_sup")?.unwrap_or(f64::NAN),
        extra: keys.iter().filter(|(k, _)| !standard.contains(&k.as_str())).cloned().collect(),
    };
    if rows.is_empty() {
        return Err(Error::Table("no data rows".into()));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Table("rows of unequal width".into()));
    }
    let field = match width {
        2 => {
            let lo = rows[0][0];
            let hi = rows[rows.len() - 1][0];
            let g = Grid1D::new(lo, hi, rows.len() - 1)?;
            let geom = if lo == 0.0 && n >= 2 { Geometry::radial(g, n)? } else { Geometry::Interval(g) };
            Field::new(geom, rows.iter().map(|r| r[1]).collect())?
        }
        3 => {
            let n1 = rows.iter().take_while(|r| r[1] == rows[0][1]).count();
            if n1 < 2 || !rows.len().is_multiple_of(n1) {
                return Err(Error::Table("slab rows do not form a rectangle".into()));
            }
            let n2 = rows.len() / n1;
            let g = Grid2D::new(
                Grid1D::new(rows[0][0], rows[n1 - 1][0], n1 - 1)?,
                Grid1D::new(rows[0][1], rows[rows.len() - 1][1], n2 - 1)?,
            );
            Field::new(Geometry::Slab(g), rows.iter().map(|r| r[2]).collect())?
        }
        w => return Err(Error::Table(format!("rows must have 2 or 3 columns, found {w}"))),
    };
    Ok((meta, field))
}

pub fn read_table(path: &Path) -> Result<(TableMeta, Field)> {
    table_from_str(&std::fs::read_to_string(path)?)
}

/// Load a saved profile. Bowl tables come back as [`TranslatorProfile::Bowl`].
pub fn load_profile(path: &Path) -> Result<TranslatorProfile> {
    let (meta, field) = read_table(path)?;
    let bowl = meta.kind == "bowl";
    let t = Tabulated::new(meta, field)?;
    Ok(if bowl { TranslatorProfile::Bowl(t) } else { TranslatorProfile::Tabulated(t) })
}

/// Right-hand side of the radial translator ODE as a first-order system in `(u, u')`.
fn bowl_rhs(dim: f64, r: f64, v: f64) -> f64 {
    (1.0 + v * v) * (1.0 - (dim - 1.0) * v / r)
}

/// Four-term Taylor expansion of the bowl at the origin: `(u, u')`.
fn bowl_series(dim: f64, r: f64) -> (f64, f64) {
    let a2 = 1.0 / (2.0 * dim);
    let a4 = 1.0 / (4.0 * dim.powi(3) * (dim + 2.0));
    let a6 = -(dim - 3.0) / (6.0 * dim.powi(5) * (dim + 2.0) * (dim + 4.0));
    let r2 = r * r;
    let u = r2 * (a2 + r2 * (a4 + r2 * a6));
    let du = r * (2.0 * a2 + r2 * (4.0 * a4 + 6.0 * a6 * r2));
    (u, du)
}

/// Tabulate the `dim`-dimensional bowl on `[0, r_max]` with spacing close to `h`.
///
/// The origin is handled by the series on `[0, 10h]`, the rest by classical RK4.
/// Fails with the achieved residual when the table misses [`BOWL_RESIDUAL_TARGET`].
pub fn bowl_profile(dim: usize, r_max: f64, h: f64) -> Result<TranslatorProfile> {
    if dim < 2 {
        return Err(Error::Domain(format!("the bowl needs graph dimension >= 2, got {dim}")));
    }
    if !(r_max >= 10.0) {
        return Err(Error::Domain(format!("bowl tables need r_max >= 10, got {r_max}")));
    }
    if !(h > 0.0 && h <= 1e-3 * r_max * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("bowl step must satisfy 0 < h <= 1e-3 r_max, got {h}")));
    }
    let grid = Grid1D::with_spacing(0.0, r_max, h)?;
    let h = grid.h();
    let d = dim as f64;
    let n_series = 10.min(grid.n_cells());
    let mut u = Vec::with_capacity(grid.len());
    let mut v = 0.0;
    for i in 0..=n_series {
        let (ui, vi) = bowl_series(d, grid.node(i));
        u.push(ui);
        v = vi;
    }
    let mut y = *u.last().unwrap();
    for i in n_series..grid.n_cells() {
        let r = grid.node(i);
        let k1u = v;
        let k1v = bowl_rhs(d, r, v);
        let k2u = v + 0.5 * h * k1v;
        let k2v = bowl_rhs(d, r + 0.5 * h, k2u);
        let k3u = v + 0.5 * h * k2v;
        let k3v = bowl_rhs(d, r + 0.5 * h, k3u);
        let k4u = v + h * k3v;
        let k4v = bowl_rhs(d, r + h, k4u);
        y += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        u.push(y);
    }
    let field = Field::new(Geometry::radial(grid, dim)?, u)?;
    let residual = translator_residual(&field)?.sup_abs_where(|r, _| r <= r_max - 1.0);
    if residual > BOWL_RESIDUAL_TARGET {
        return Err(Error::ResidualTarget { achieved: residual, target: BOWL_RESIDUAL_TARGET });
    }
    let meta = TableMeta::new("bowl", dim, residual);
    Ok(TranslatorProfile::Bowl(Tabulated::new(meta, field)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grim_reaper_values() {
        assert_eq!(grim_reaper(0.0).unwrap(), [0.0, 0.0, 1.0]);
        let [u, _, _] = grim_reaper(PI / 3.0).unwrap();
        assert!((u - std::f64::consts::LN_2).abs() < 1e-15);
        let a = grim_reaper(0.7).unwrap();
        let b = grim_reaper(-0.7).unwrap();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], -b[1]);
        assert!(grim_reaper(FRAC_PI_2).is_err());
        assert!(grim_reaper(-2.0).is_err());
    }

    #[test]
    fn tilted_plane_degenerates_and_solves_translator_equation() {
        let b = FRAC_PI_2;
        for (x1, x2) in [(0.0, 0.3), (5.0, -1.2), (-3.0, 1.5)] {
            let j = tilted_grim_reaper(x1, x2, b).unwrap();
            let g = grim_reaper(x2).unwrap();
            assert!((j.u - g[0]).abs() < 1e-14);
            assert_eq!(j.du[0], 0.0);
        }
        let b = 0.9 * PI;
        let theta = tilt_angle(b).unwrap();
        for (x1, x2) in [(0.0, 0.0), (2.0, 2.5), (-7.0, -2.7), (1.3, 0.4)] {
            let j = tilted_grim_reaper(x1, x2, b).unwrap();
            assert_eq!(j.du[0], theta.tan());
            assert_eq!(j.d2u[0][0], 0.0);
            assert!((q_operator(j.du, j.d2u) - 1.0).abs() < 1e-10);
            let m = tilted_grim_reaper(x1, -x2, b).unwrap();
            assert_eq!(m.du[1], -j.du[1]);
        }
        assert!(tilted_grim_reaper(0.0, b, b).is_err());
        assert!(tilt_angle(1.0).is_err());
    }

    #[test]
    fn cylinder_radius_formula() {
        assert!((cylinder_radius(2, 1, -1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((cylinder_radius(3, 1, -0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        for t in [-0.1, -1.0, -7.5] {
            let r = cylinder_radius(4, 2, t).unwrap();
            assert!((r * r / -t - 4.0).abs() < 1e-12);
        }
        assert!(cylinder_radius(2, 1, 0.0).is_err());
        assert!(cylinder_radius(3, 3, -1.0).is_err());
    }

    #[test]
    fn residual_of_affine_field_is_minus_one() {
        let g = Grid1D::new(-1.0, 1.0, 20).unwrap();
        let f = Field::sample_interval(g, |x| 0.3 + 2.0 * x).unwrap();
        let r = translator_residual(&f).unwrap();
        assert!(r.get(0).is_none() && r.get(20).is_none());
        for k in 1..20 {
            assert!((r.get(k).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grim_reaper_residual_is_second_order() {
        let sup = |n: usize| {
            let g = Grid1D::new(-1.3, 1.3, n).unwrap();
            let f = Field::sample_interval(g, |x| -x.cos().ln()).unwrap();
            translator_residual(&f).unwrap().sup_abs()
        };
        let fine = sup(2600);
        assert!(fine <= 1e-5, "residual {fine}");
        let order = grid::observed_order(sup(650), sup(1300));
        assert!((1.9..=2.1).contains(&order), "order {order}");
    }

    #[test]
    fn tilted_residual_drops_fourfold_per_halving() {
        let b = FRAC_PI_2 + 0.4;
        let at_point = |h: f64| {
            let g = Grid2D::new(Grid1D::with_spacing(-1.0, 1.0, h).unwrap(), Grid1D::with_spacing(-1.5, 1.5, h).unwrap());
            let f = Field::sample_slab(g, |x1, x2| tilted_grim_reaper(x1, x2, b).unwrap().u).unwrap();
            let r = translator_residual(&f).unwrap();
            let Geometry::Slab(g) = f.geometry() else { unreachable!() };
            // node (0.5, 1.0)
            let i = ((0.5 + 1.0) / g.x1().h()).round() as usize;
            let j = ((1.0 + 1.5) / g.x2().h()).round() as usize;
            r.get(g.idx(i, j)).unwrap().abs()
        };
        let ratio = at_point(0.05) / at_point(0.025);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bowl_basics() {
        let p = bowl_profile(2, 12.0, 1e-3).unwrap();
        let t = p.table().unwrap();
        let u = t.field().values();
        let h = t.field().geometry().h();
        assert!((2.0 * (u[1] - u[0]) / (h * h) - 0.5).abs() < 1e-6);
        assert!(p.residual_sup().unwrap() <= BOWL_RESIDUAL_TARGET);
        // node reproduction
        let r = t.field().geometry().point(777).0;
        assert_eq!(p.eval(&[r]).unwrap().jet.u, u[777]);
        assert!(matches!(bowl_profile(2, 12.0, 0.1), Err(Error::Domain(_))));
        assert!(matches!(bowl_profile(2, 12.0, 0.012), Err(Error::ResidualTarget { .. })));
        assert!(bowl_profile(1, 12.0, 1e-3).is_err());
    }

    #[test]
    fn bowl_midpoint_matches_finer_table() {
        let coarse = bowl_profile(2, 10.0, 2e-3).unwrap();
        let fine = bowl_profile(2, 10.0, 1e-3).unwrap();
        for r in [0.003, 0.5011, 3.0, 7.777] {
            let a = coarse.eval(&[r]).unwrap();
            let b = fine.eval(&[r]).unwrap();
            assert!((a.jet.u - b.jet.u).abs() < 1e-6, "r = {r}");
            assert!(a.interp_error < 1e-6);
        }
    }

    #[test]
    fn table_round_trip_keeps_17_digits() {
        let p = bowl_profile(3, 10.0, 5e-3).unwrap();
        let t = p.table().unwrap();
        let text = table_to_string(t.meta(), t.field()).unwrap();
        assert!(text.starts_with("# kind=bowl n=3 b=none theta=none residual_sup="));
        let (meta, field) = table_from_str(&text).unwrap();
        assert_eq!(meta.n, 3);
        assert_eq!(field.values(), t.field().values());
        assert!(matches!(field.geometry(), Geometry::Radial { dim: 3, .. }));
    }

    #[test]
    fn slab_table_round_trip_and_eval() {
        let b = FRAC_PI_2 + 0.3;
        let g = Grid2D::slab(b, 0.4, 2.0, 0.05).unwrap();
        let f = Field::sample_slab(g, |x1, x2| tilted_grim_reaper(x1, x2, b).unwrap().u).unwrap();
        let meta = TableMeta::new("tabulated", 2, 0.0).with_extra("t", 1.5);
        let text = table_to_string(&meta, &f).unwrap();
        let (m2, f2) = table_from_str(&text).unwrap();
        assert_eq!(m2.extra("t"), Some("1.5"));
        assert_eq!(f2, f);
        let p = TranslatorProfile::Tabulated(Tabulated::new(m2, f2).unwrap());
        let s = p.eval(&[0.3, 0.1]).unwrap();
        let exact = tilted_grim_reaper(0.3, 0.1, b).unwrap();
        assert!((s.jet.u - exact.u).abs() < 1e-3);
        assert!((s.jet.du[0] - exact.du[0]).abs() < 1e-9);
        assert!(p.eval(&[5.0, 0.0]).is_err());
    }

    #[test]
    fn closed_form_eval() {
        let plane = TranslatorProfile::grim_reaper_plane(FRAC_PI_2).unwrap();
        for x1 in [-4.0, 0.0, 11.0] {
            assert_eq!(plane.eval(&[x1, 0.0]).unwrap().jet.u, 0.0);
        }
        assert_eq!(plane.kind(), "grim_reaper_plane");
        assert_eq!(TranslatorProfile::grim_reaper_plane(2.0).unwrap().kind(), "tilted_grim_reaper_plane");
        assert!(TranslatorProfile::cylinder(2, 1).unwrap().eval(&[0.0]).is_err());
        assert!(TranslatorProfile::GrimReaper.eval(&[2.0]).is_err());
    }
}
