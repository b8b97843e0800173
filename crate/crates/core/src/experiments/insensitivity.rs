use crate::barriers::CheckOutcome;
use crate::grid::{bicubic, Field, Geometry};
use crate::solver::evolve;
use crate::{Error, Result};

use super::config::{Perturbation, ScenarioConfig, ScenarioKind};
use super::scenario::{prepare, solver_config};

/// Sup over the window nodes of `coarse` of `|coarse - interp(fine)|`.
fn window_gap(coarse: &Field, other: &Field, nodes: &[usize]) -> Result<f64> {
    let g = coarse.geometry();
    let mut worst = 0.0f64;
    for &k in nodes {
        let (x1, x2) = g.point(k);
        worst = worst.max((coarse.values()[k] - bicubic(other, x1, x2)?).abs());
    }
    Ok(worst)
}

fn final_field(cfg: &ScenarioConfig) -> Result<Field> {
    let prep = prepare(cfg)?;
    let sc = solver_config(cfg, &prep.initial);
    Ok(evolve(&prep.initial, &sc)?.last().field.clone())
}

/// Result of the boundary-insensitivity audit.
#[derive(Clone, Debug, PartialEq)]
pub struct Insensitivity {
    /// `sup |u_h - u_{h/2}|` on the window.
    pub level: f64,
    /// Window gap after growing `L` by half.
    pub wider: f64,
    /// Window gap after halving `delta`.
    pub thinner: f64,
}

impl Insensitivity {
    pub fn ratio(&self) -> f64 {
        self.wider.max(self.thinner) / self.level.max(1e-14)
    }
}

/// Rerun a slab scenario with `h/2`, `1.5 L` and `delta/2` and compare final
/// fields on the base window. Fourier cutoffs are pinned to the base geometry
/// so every variant starts from the same perturbation.
pub fn measure_insensitivity(cfg: &ScenarioConfig) -> Result<Insensitivity> {
    if cfg.kind != ScenarioKind::Slab2dPlane {
        return Err(Error::Config("the insensitivity audit runs on slab2d_plane scenarios".into()));
    }
    let mut base = cfg.clone();
    base.diagnostics.insensitivity = false;
    base.output = None;
    let geometry = base.geometry_grid()?;
    let Geometry::Slab(g) = &geometry else { unreachable!("slab kinds build slab grids") };
    let pin = 0.8 * g.x1().hi().min(g.x2().hi());
    for p in &mut base.perturbation {
        if let Perturbation::Fourier { cutoff, .. } = p {
            cutoff.get_or_insert(pin);
        }
    }
    if base.window.is_none() {
        let w = base.fit_window(&geometry);
        base.window = Some(super::config::WindowConfig {
            x1: [w.x1.0, w.x1.1],
            x2: w.x2.map(|x| [x.0, x.1]),
        });
    }
    let nodes = base.fit_window(&geometry).nodes(&geometry)?;
    let u = final_field(&base)?;

    let mut fine = base.clone();
    fine.geometry.h *= 0.5;
    let mut wide = base.clone();
    wide.geometry.l = Some(1.5 * base.geometry.l.expect("validated"));
    let mut thin = base.clone();
    thin.geometry.delta = Some(0.5 * base.geometry.delta.expect("validated"));

    Ok(Insensitivity {
        level: window_gap(&u, &final_field(&fine)?, &nodes)?,
        wider: window_gap(&u, &final_field(&wide)?, &nodes)?,
        thinner: window_gap(&u, &final_field(&thin)?, &nodes)?,
    })
}

/// Pass iff both domain changes move the windowed solution by at most ten
/// times the measured `h` to `h/2` difference.
pub fn insensitivity_check(cfg: &ScenarioConfig) -> Result<CheckOutcome> {
    let m = measure_insensitivity(cfg)?;
    Ok(CheckOutcome::at_most(
        "boundary_insensitivity",
        m.ratio(),
        10.0,
        format!("level={:.3e} L*1.5 gap={:.3e} delta/2 gap={:.3e}", m.level, m.wider, m.thinner),
    ))
}
