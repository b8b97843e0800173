//! Two ordered initial graphs stay ordered under the stable scheme. Past the
//! stability limit the same pair crosses after one step.

use mcf_lab::barriers::avoidance_check;
use mcf_lab::grid::{Field, Geometry, Grid1D};
use mcf_lab::solver::{cfl_dt, evolve, step_unguarded, BoundaryPolicy, FlowState, SolverConfig};
use mcf_lab::translators::TranslatorProfile;

fn state(f: &Field) -> mcf_lab::Result<FlowState> {
    FlowState::new(0.0, f.clone(), BoundaryPolicy::translating(f, 0.0))
}

fn main() -> mcf_lab::Result<()> {
    let g = Geometry::Interval(Grid1D::with_spacing(-1.45, 1.45, 0.02)?);
    let bar = TranslatorProfile::GrimReaper.sample_on(&g)?;
    let lower = bar.zip_with(&Field::sample(g.clone(), |x, _| 0.1 * (5.0 * x).sin())?, |a, b| a + b)?;
    let upper = lower.zip_with(&Field::sample(g.clone(), |x, _| 0.02 + 0.05 * x * x)?, |a, b| a + b)?;

    let sc = SolverConfig::new(0.5, 1);
    let a = evolve(&state(&lower)?, &sc)?;
    let b = evolve(&state(&upper)?, &sc)?;
    let report = avoidance_check(&a, &b)?;
    println!("stable dt={:.3e}: {} snapshots, {} violations", a.dt(), a.len(), report.violations);

    let dt = 8.0 * cfl_dt(&lower, 1.0);
    let mut bump = vec![0.0; g.node_count()];
    bump[g.node_count() / 2] = 1e-3;
    let spike = Field::new(g.clone(), bump)?;
    let flat = Field::sample(g.clone(), |_, _| 0.0)?;
    let s = step_unguarded(&state(&spike)?, dt)?;
    let f = step_unguarded(&state(&flat)?, dt)?;
    let dip = s.values().iter().zip(f.values()).map(|(x, y)| y - x).fold(f64::MIN, f64::max);
    println!("unstable dt={dt:.3e}: spike dips {dip:.3e} below the flat graph");
    Ok(())
}
