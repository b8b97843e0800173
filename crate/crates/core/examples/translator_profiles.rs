//! Sample the three translator families and measure their discrete residuals.

use std::f64::consts::PI;

use mcf_lab::grid::{Geometry, Grid1D, Grid2D};
use mcf_lab::translators::{bowl_profile, translator_residual, TranslatorProfile};

fn main() -> mcf_lab::Result<()> {
    for h in [0.01, 0.005, 0.0025] {
        let g = Geometry::Interval(Grid1D::with_spacing(-1.3, 1.3, h)?);
        let r = translator_residual(&TranslatorProfile::GrimReaper.sample_on(&g)?)?.sup_abs();
        println!("grim reaper     h={h:<7} residual={r:.3e}");
    }

    let b = 0.9 * PI;
    let plane = TranslatorProfile::grim_reaper_plane(b)?;
    println!("tilted plane    b={b:.4} theta={:.6} tan={:.6}", plane.theta().unwrap(), plane.theta().unwrap().tan());
    for h in [0.025, 0.0125] {
        let g = Geometry::Slab(Grid2D::slab(b, 0.4, 2.0, h)?);
        let r = translator_residual(&plane.sample_on(&g)?)?.sup_abs();
        println!("tilted plane    h={h:<7} residual={r:.3e}");
    }

    let bowl = bowl_profile(2, 20.0, 0.0025)?;
    let u2 = bowl.eval(&[0.0])?.jet.d2u[0][0];
    println!("bowl (m=2)      residual={:.3e} u''(0)={u2:.9}", bowl.residual_sup().unwrap());
    for r in [1.0, 5.0, 10.0, 20.0] {
        let u = bowl.eval(&[r])?.jet.u;
        println!("  r={r:<4} u={u:>12.6}  u - r^2/2 + ln r = {:.6}", u - 0.5 * r * r + f64::ln(r));
    }
    Ok(())
}
