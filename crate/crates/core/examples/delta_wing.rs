//! Extract a Delta-wing on a coarse two-level schedule and report its checks.
//! `scenarios/wing_extract.toml` is the full-resolution version.

use std::f64::consts::FRAC_PI_2;

use mcf_lab::experiments::{extract_delta_wing, extraction_checks, WingParams};

fn main() -> mcf_lab::Result<()> {
    let b = FRAC_PI_2 + 0.3;
    let mut params = WingParams::with_final_spacing(0.3, 8.0, 0.05);
    params.levels = vec![(0.1, 200.0), (0.05, 10.0)];
    let w = extract_delta_wing(b, &params)?;
    for l in &w.levels {
        println!("level h={:<5} t={:<6} window residual={:.3e}", l.h, l.t_end, l.window_residual);
    }
    println!("tan(theta)={:.6} max |du/dx1|={:.6}", w.tan_theta(), w.slope_max);
    for c in extraction_checks(&w) {
        println!("{c}");
    }
    if let Some(path) = std::env::args().nth(1) {
        w.profile.save(path.as_ref())?;
        println!("saved {path}");
    }
    Ok(())
}
