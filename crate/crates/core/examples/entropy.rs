//! Gaussian density ratios and the entropy of a few curves.

use mcf_lab::diagnostics::{entropy_estimate, f_functional, CurveSample};
use mcf_lab::grid::{Geometry, Grid1D};
use mcf_lab::translators::TranslatorProfile;

fn main() -> mcf_lab::Result<()> {
    let line = CurveSample::segment([-40.0, 0.0], [40.0, 0.0], 16001)?;
    println!("line       F(0, 1)  = {:.12}", f_functional(&line, [0.0, 0.0], 1.0)?);

    let circle = CurveSample::circle([0.0, 0.0], 2f64.sqrt(), 512)?;
    let e = entropy_estimate(&circle)?;
    println!("circle     entropy  = {:.8} at x0=({:.1e}, {:.1e}) t={:.6}", e.value, e.x0[0], e.x0[1], e.t);
    println!("           sqrt(2 pi / e) = {:.8}", (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt());
    for (name, c) in [("translated", circle.translated([4.0, -2.0])), ("dilated x3", circle.dilated(3.0))] {
        println!("{name:<10} entropy  = {:.8}", entropy_estimate(&c)?.value);
    }

    let g = TranslatorProfile::GrimReaper.sample_on(&Geometry::Interval(Grid1D::with_spacing(-1.5, 1.5, 0.005)?))?;
    println!("grim reaper on [-1.5, 1.5] entropy = {:.6}", entropy_estimate(&CurveSample::from_graph(&g)?)?.value);
    Ok(())
}
