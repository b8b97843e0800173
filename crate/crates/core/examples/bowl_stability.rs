//! Rippled bowl in graph dimension 2: the post-fit distance decays.

use std::path::Path;

use mcf_lab::experiments::{run_scenario, ScenarioConfig};

fn main() -> mcf_lab::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/bowl_ripple.toml");
    let cfg = ScenarioConfig::load(&path)?;
    let bundle = run_scenario(&cfg)?;
    for r in bundle.records.iter().step_by(5) {
        println!("t={:>6.2} sup_dist={:.4e} c0={:+.4e}", r.t, r.sup_dist.unwrap(), r.c0_fit.unwrap());
    }
    print!("{}", bundle.summary());
    Ok(())
}
