//! Uniform structured grids and sampled fields.
//!
//! Three geometries are supported: a closed interval, a truncated slab
//! rectangle `[-L, L] x [-b + delta, b - delta]`, and a radial half-line
//! `[0, r_max]` carrying the ambient graph dimension. All derivative
//! operators are second order: centered at interior nodes, three-point
//! one-sided at boundary nodes (four-point for second derivatives), and
//! even-extension at the radial origin.

use crate::error::{Error, Result};

/// Minimum number of cells accepted along any axis.
pub const MIN_CELLS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n_cells: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self { lo, hi, n_cells, h: (hi - lo) / n_cells as f64 })
    }

    /// Grid whose spacing is as close to `h` as the extent allows.
    pub fn with_spacing(lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        let n = ((hi - lo) / h).round().max(1.0) as usize;
        Self::new(lo, hi, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.hi
        } else {
            self.lo + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Cell index `i` and fraction `s in [0, 1]` with `x = node(i) + s h`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !self.contains(x) {
            return Err(Error::OutOfBounds(x));
        }
        let pos = (x - self.lo) / self.h;
        let i = (pos.floor() as usize).min(self.n_cells - 1);
        Ok((i, (pos - i as f64).clamp(0.0, 1.0)))
    }

    /// Every-other-node coarsening.
    pub fn coarsen(&self) -> Result<Self> {
        if !self.n_cells.is_multiple_of(2) {
            return Err(Error::OddCellCount(self.n_cells));
        }
        Self::new(self.lo, self.hi, self.n_cells / 2)
    }

    /// Grid with half the spacing over the same extent.
    pub fn refine(&self) -> Self {
        Self { lo: self.lo, hi: self.hi, n_cells: 2 * self.n_cells, h: self.h / 2.0 }
    }
}

/// Truncated slab: `x1` is the longitudinal axis, `x2` the transverse one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    x1: Grid1D,
    x2: Grid1D,
}

impl Grid2D {
    pub fn new(x1: Grid1D, x2: Grid1D) -> Self {
        Self { x1, x2 }
    }

    /// `[-l, l] x [-b + delta, b - delta]` with spacing close to `h` on both axes.
    pub fn slab(b: f64, delta: f64, l: f64, h: f64) -> Result<Self> {
        if !(delta > 0.0) || !(b - delta > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "transverse extent must sit strictly inside (-b, b): b = {b}, delta = {delta}"
            )));
        }
        Ok(Self {
            x1: Grid1D::with_spacing(-l, l, h)?,
            x2: Grid1D::with_spacing(-(b - delta), b - delta, h)?,
        })
    }

    pub fn x1(&self) -> &Grid1D {
        &self.x1
    }

    pub fn x2(&self) -> &Grid1D {
        &self.x2
    }

    /// Nodes along `x1` (the fast index).
    pub fn n1(&self) -> usize {
        self.x1.len()
    }

    pub fn n2(&self) -> usize {
        self.x2.len()
    }

    pub fn len(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n1() + i
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let n1 = self.n1();
        (self.x1.node(k % n1), self.x2.node(k / n1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Interval(Grid1D),
    /// Radial profile of an `dim`-dimensional rotationally symmetric graph.
    Radial { grid: Grid1D, dim: usize },
    Slab(Grid2D),
}

impl Geometry {
    pub fn radial(grid: Grid1D, dim: usize) -> Result<Self> {
        if grid.lo() != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "radial grids start at r = 0, got {}",
                grid.lo()
            )));
        }
        if dim < 2 {
            return Err(Error::InvalidGrid(format!("radial graphs need dimension >= 2, got {dim}")));
        }
        Ok(Geometry::Radial { grid, dim })
    }

    pub fn node_count(&self) -> usize {
        match self {
            Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => g.len(),
            Geometry::Slab(g) => g.len(),
        }
    }

    pub fn axes(&self) -> usize {
        match self {
            Geometry::Slab(_) => 2,
            _ => 1,
        }
    }

    pub fn axis_grid(&self, axis: usize) -> Result<&Grid1D> {
        match (self, axis) {
            (Geometry::Interval(g), 0) | (Geometry::Radial { grid: g, .. }, 0) => Ok(g),
            (Geometry::Slab(g), 0) => Ok(g.x1()),
            (Geometry::Slab(g), 1) => Ok(g.x2()),
            _ => Err(Error::AxisOutOfRange { axis, dims: self.axes() }),
        }
    }

    /// Dimension of the graph (the `n` in `u: R^n -> R`).
    pub fn graph_dim(&self) -> usize {
        match self {
            Geometry::Interval(_) => 1,
            Geometry::Radial { dim, .. } => *dim,
            Geometry::Slab(_) => 2,
        }
    }

    /// Smallest spacing over all axes.
    pub fn h(&self) -> f64 {
        match self {
            Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => g.h(),
            Geometry::Slab(g) => g.x1().h().min(g.x2().h()),
        }
    }

    /// True for nodes on the outer boundary (the radial origin is interior).
    pub fn is_boundary(&self, k: usize) -> bool {
        match self {
            Geometry::Interval(g) => k == 0 || k == g.n_cells(),
            Geometry::Radial { grid, .. } => k == grid.n_cells(),
            Geometry::Slab(g) => {
                let (i, j) = (k % g.n1(), k / g.n1());
                i == 0 || j == 0 || i + 1 == g.n1() || j + 1 == g.n2()
            }
        }
    }

    /// Coordinates of node `k` (second entry is zero for one-axis geometries).
    pub fn point(&self, k: usize) -> (f64, f64) {
        match self {
            Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => (g.node(k), 0.0),
            Geometry::Slab(g) => g.point(k),
        }
    }

    pub fn same_shape(&self, other: &Geometry) -> bool {
        self == other
    }
}

/// A graph function sampled on a grid. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    geometry: Geometry,
    values: Vec<f64>,
}

impl Field {
    pub fn new(geometry: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.node_count() {
            return Err(Error::GeometryMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                geometry.node_count()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { geometry, values })
    }

    /// Constructor for values already known to be finite and correctly sized.
    pub(crate) fn from_parts(geometry: Geometry, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), geometry.node_count());
        Self { geometry, values }
    }

    pub fn sample(geometry: Geometry, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..geometry.node_count())
            .map(|k| {
                let (x, y) = geometry.point(k);
                f(x, y)
            })
            .collect();
        Self::new(geometry, values)
    }

    pub fn sample_interval(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(Geometry::Interval(grid), |x, _| f(x))
    }

    pub fn sample_radial(grid: Grid1D, dim: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(Geometry::radial(grid, dim)?, |r, _| f(r))
    }

    pub fn sample_slab(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::sample(Geometry::Slab(grid), f)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.geometry.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if !self.geometry.same_shape(&other.geometry) {
            return Err(Error::GeometryMismatch("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Field::new(self.geometry.clone(), values)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_axis(f: &Field, axis: usize, needed: usize) -> Result<&Grid1D> {
    let g = f.geometry.axis_grid(axis)?;
    if g.len() < needed {
        return Err(Error::TooFewNodes { axis, needed, found: g.len() });
    }
    Ok(g)
}

/// Applies a 1D stencil kernel along `axis` for every line of the field.
fn along_axis(f: &Field, axis: usize, kernel: impl Fn(&[f64], &mut [f64])) -> Field {
    let mut out = vec![0.0; f.len()];
    match &f.geometry {
        Geometry::Interval(_) | Geometry::Radial { .. } => kernel(&f.values, &mut out),
        Geometry::Slab(g) => {
            let (n1, n2) = (g.n1(), g.n2());
            if axis == 0 {
                for j in 0..n2 {
                    kernel(&f.values[j * n1..(j + 1) * n1], &mut out[j * n1..(j + 1) * n1]);
                }
            } else {
                let mut line = vec![0.0; n2];
                let mut res = vec![0.0; n2];
                for i in 0..n1 {
                    for j in 0..n2 {
                        line[j] = f.values[j * n1 + i];
                    }
                    kernel(&line, &mut res);
                    for j in 0..n2 {
                        out[j * n1 + i] = res[j];
                    }
                }
            }
        }
    }
    Field::from_parts(f.geometry.clone(), out)
}

fn first_diff_line(u: &[f64], out: &mut [f64], h: f64, even_origin: bool) {
    let n = u.len();
    for i in 1..n - 1 {
        out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    out[0] = if even_origin { 0.0 } else { (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h) };
    out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
}

fn second_diff_line(u: &[f64], out: &mut [f64], h: f64, even_origin: bool) {
    let n = u.len();
    let h2 = h * h;
    for i in 1..n - 1 {
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    }
    out[0] = if even_origin {
        2.0 * (u[1] - u[0]) / h2
    } else if n >= 4 {
        (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2
    } else {
        (u[0] - 2.0 * u[1] + u[2]) / h2
    };
    out[n - 1] = if n >= 4 {
        (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / h2
    } else {
        (u[n - 1] - 2.0 * u[n - 2] + u[n - 3]) / h2
    };
}

/// First derivative along `axis`.
pub fn d1(f: &Field, axis: usize) -> Result<Field> {
    let h = check_axis(f, axis, 3)?.h();
    let even = matches!(f.geometry, Geometry::Radial { .. });
    Ok(along_axis(f, axis, |u, out| first_diff_line(u, out, h, even)))
}

/// Second derivative along `axis`.
pub fn d2(f: &Field, axis: usize) -> Result<Field> {
    let h = check_axis(f, axis, 3)?.h();
    let even = matches!(f.geometry, Geometry::Radial { .. });
    Ok(along_axis(f, axis, |u, out| second_diff_line(u, out, h, even)))
}

/// `(d11, d12, d22)` of a slab field; `d12` is the centered cross stencil in the interior.
pub fn hessian(f: &Field) -> Result<(Field, Field, Field)> {
    if !matches!(f.geometry, Geometry::Slab(_)) {
        return Err(Error::GeometryMismatch("hessian needs a slab field".into()));
    }
    let d11 = d2(f, 0)?;
    let d22 = d2(f, 1)?;
    let d12 = d1(&d1(f, 0)?, 1)?;
    Ok((d11, d12, d22))
}

/// Every-other-node coarsening along every axis.
pub fn restrict(f: &Field) -> Result<Field> {
    match &f.geometry {
        Geometry::Interval(g) => {
            let c = g.coarsen()?;
            Field::new(Geometry::Interval(c), f.values.iter().step_by(2).copied().collect())
        }
        Geometry::Radial { grid, dim } => {
            let c = grid.coarsen()?;
            Field::new(Geometry::Radial { grid: c, dim: *dim }, f.values.iter().step_by(2).copied().collect())
        }
        Geometry::Slab(g) => {
            let c = Grid2D::new(g.x1().coarsen()?, g.x2().coarsen()?);
            let mut values = Vec::with_capacity(c.len());
            for j in (0..g.n2()).step_by(2) {
                for i in (0..g.n1()).step_by(2) {
                    values.push(f.values[g.idx(i, j)]);
                }
            }
            Field::new(Geometry::Slab(c), values)
        }
    }
}

/// Piecewise-linear interpolation of a one-axis field.
pub fn linterp(f: &Field, x: f64) -> Result<f64> {
    let g = match &f.geometry {
        Geometry::Interval(g) | Geometry::Radial { grid: g, .. } => g,
        Geometry::Slab(_) => return Err(Error::GeometryMismatch("use bilinear for slab fields".into())),
    };
    let (i, s) = g.locate(x)?;
    if s == 0.0 || x == g.node(i) {
        return Ok(f.values[i]);
    }
    if s == 1.0 || x == g.node(i + 1) {
        return Ok(f.values[i + 1]);
    }
    Ok((1.0 - s) * f.values[i] + s * f.values[i + 1])
}

/// Bilinear interpolation of a slab field.
pub fn bilinear(f: &Field, x1: f64, x2: f64) -> Result<f64> {
    let g = match &f.geometry {
        Geometry::Slab(g) => g,
        _ => return Err(Error::GeometryMismatch("bilinear needs a slab field".into())),
    };
    let (i, s) = g.x1().locate(x1)?;
    let (j, r) = g.x2().locate(x2)?;
    let v = |a: usize, b: usize| f.values[g.idx(a, b)];
    Ok((1.0 - r) * ((1.0 - s) * v(i, j) + s * v(i + 1, j)) + r * ((1.0 - s) * v(i, j + 1) + s * v(i + 1, j + 1)))
}

/// Four-point Lagrange stencil around `x` (shifted inward at the ends).
fn cubic_weights(g: &Grid1D, x: f64) -> Result<(usize, [f64; 4])> {
    let (i, _) = g.locate(x)?;
    let start = i.saturating_sub(1).min(g.n_cells() - 3);
    let t = (x - g.node(start)) / g.h();
    let w = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    Ok((start, w))
}

/// Tensor-product cubic interpolation of a slab field (fourth order).
pub fn bicubic(f: &Field, x1: f64, x2: f64) -> Result<f64> {
    let g = match &f.geometry {
        Geometry::Slab(g) => g,
        _ => return Err(Error::GeometryMismatch("bicubic needs a slab field".into())),
    };
    let (i0, w1) = cubic_weights(g.x1(), x1)?;
    let (j0, w2) = cubic_weights(g.x2(), x2)?;
    let mut acc = 0.0;
    for (b, wb) in w2.iter().enumerate() {
        let row: f64 = w1.iter().enumerate().map(|(a, wa)| wa * f.values[g.idx(i0 + a, j0 + b)]).sum();
        acc += wb * row;
    }
    Ok(acc)
}

/// Measured order `log2(e_coarse / e_fine)`.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64, n: usize) -> Grid1D {
        Grid1D::new(lo, hi, n).unwrap()
    }

    #[test]
    fn bicubic_reproduces_cubics() {
        let g = Grid2D::slab(1.5, 0.2, 2.0, 0.1).unwrap();
        let p = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + y - 0.5;
        let f = Field::sample_slab(g, p).unwrap();
        for (x, y) in [(0.03, -0.71), (-1.96, 1.27), (1.999, 1.3)] {
            assert!((bicubic(&f, x, y).unwrap() - p(x, y)).abs() < 1e-11);
        }
        assert!(bicubic(&f, 2.5, 0.0).is_err());
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        let g = interval(-1.3, 1.3, 1040);
        assert_eq!(g.len(), 1041);
        assert_eq!(g.node(0), -1.3);
        assert_eq!(g.node(1040), 1.3);
        assert!((g.node(520)).abs() < 1e-15);
        assert!(Grid2D::slab(1.0, 0.0, 2.0, 0.1).is_err());
        assert!(Grid2D::slab(1.0, 1.0, 2.0, 0.1).is_err());
        assert!(Geometry::radial(interval(0.1, 1.0, 10), 2).is_err());
    }

    #[test]
    fn affine_exactness_every_geometry() {
        let f = Field::sample_interval(interval(-1.0, 2.0, 30), |x| 3.0 * x + 2.0).unwrap();
        assert!(d1(&f, 0).unwrap().values().iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(d2(&f, 0).unwrap().values().iter().all(|v| v.abs() < 1e-9));

        let g = Grid2D::slab(1.5, 0.2, 2.0, 0.1).unwrap();
        let f = Field::sample_slab(g, |x, y| 0.5 * x - 2.0 * y + 1.0).unwrap();
        assert!(d1(&f, 0).unwrap().values().iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(d1(&f, 1).unwrap().values().iter().all(|v| (v + 2.0).abs() < 1e-12));
        let (a, b, c) = hessian(&f).unwrap();
        for h in [a, b, c] {
            assert!(h.sup_abs() < 1e-9);
        }
        assert!(matches!(d1(&f, 2), Err(Error::AxisOutOfRange { axis: 2, dims: 2 })));
    }

    #[test]
    fn quadratic_exactness() {
        let g = interval(0.0, 1.0, 10);
        let f = Field::sample_interval(g, |x| x * x).unwrap();
        let d = d1(&f, 0).unwrap();
        assert!((d.values()[5] - 1.0).abs() < 1e-14);
        assert!(d2(&f, 0).unwrap().values().iter().all(|v| (v - 2.0).abs() < 1e-10));

        let s = Grid2D::slab(1.5, 0.3, 1.0, 0.1).unwrap();
        let f = Field::sample_slab(s, |x, y| x * y).unwrap();
        let (d11, d12, d22) = hessian(&f).unwrap();
        assert!(d11.sup_abs() < 1e-10 && d22.sup_abs() < 1e-10);
        assert!(d12.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn convergence_order_of_sine_derivatives() {
        let orders = |op: fn(&Field, usize) -> Result<Field>, exact: fn(f64) -> f64| {
            let errs: Vec<f64> = [40, 80]
                .iter()
                .map(|&n| {
                    let f = Field::sample_interval(interval(-1.0, 1.0, n), f64::sin).unwrap();
                    let d = op(&f, 0).unwrap();
                    // boundary nodes included: one-sided stencils are second order too
                    let g = d.geometry().axis_grid(0).unwrap();
                    (0..g.len()).map(|i| (d.values()[i] - exact(g.node(i))).abs()).fold(0.0, f64::max)
                })
                .collect();
            observed_order(errs[0], errs[1])
        };
        let p1 = orders(d1, f64::cos);
        let p2 = orders(d2, |x| -x.sin());
        assert!((1.9..=2.1).contains(&p1), "d1 order {p1}");
        assert!((1.9..=2.1).contains(&p2), "d2 order {p2}");
    }

    #[test]
    fn radial_origin_uses_even_extension() {
        let g = interval(0.0, 1.0, 20);
        let f = Field::sample_radial(g, 2, |r| r * r / 4.0).unwrap();
        assert_eq!(d1(&f, 0).unwrap().values()[0], 0.0);
        assert!((d2(&f, 0).unwrap().values()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn restrict_and_linterp() {
        let f = Field::sample_interval(interval(0.0, 1.0, 10), |x| x * x).unwrap();
        for i in [0, 3, 7, 10] {
            let g = f.geometry().axis_grid(0).unwrap();
            assert_eq!(linterp(&f, g.node(i)).unwrap(), f.values()[i]);
        }
        assert!((linterp(&f, 0.1 + 0.05).unwrap() - (0.01 + 0.04) / 2.0).abs() < 1e-15);
        assert!(linterp(&f, 1.2).is_err());

        let h02 = Field::sample_interval(interval(0.0, 1.6, 8), |x| x * x).unwrap();
        assert!((linterp(&h02, 0.1).unwrap() - 0.02).abs() < 1e-15);

        let affine = Field::sample_interval(interval(-1.0, 1.0, 16), |x| 2.0 * x - 0.5).unwrap();
        let coarse = restrict(&affine).unwrap();
        for x in [-0.93, -0.2, 0.0, 0.41, 0.999] {
            assert!((linterp(&coarse, x).unwrap() - (2.0 * x - 0.5)).abs() < 1e-14);
        }
        let odd = Field::sample_interval(interval(0.0, 1.0, 9), |x| x).unwrap();
        assert!(matches!(restrict(&odd), Err(Error::OddCellCount(9))));
    }

    #[test]
    fn non_finite_values_rejected() {
        let g = Geometry::Interval(interval(0.0, 1.0, 8));
        let mut v = vec![0.0; 9];
        v[4] = f64::NAN;
        assert!(matches!(Field::new(g, v), Err(Error::NonFinite(4))));
    }
}
