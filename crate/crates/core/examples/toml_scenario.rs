//! Run a scenario file (default: the plane splitting case) and write its outputs.
//!
//! `cargo run --release --example toml_scenario -- path/to/file.toml out_dir`

use std::path::PathBuf;

use mcf_lab::experiments::{run_scenario, Overrides, ScenarioConfig};

fn main() -> mcf_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/plane_splitting.toml"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("mcf-lab-demo"));
    let mut cfg = ScenarioConfig::load(&path)?;
    cfg.apply(&Overrides { out: Some(out.clone()), ..Default::default() })?;
    let bundle = run_scenario(&cfg)?;
    print!("{}", bundle.summary());
    println!("outputs in {}", out.display());
    std::process::exit(bundle.exit_code());
}
