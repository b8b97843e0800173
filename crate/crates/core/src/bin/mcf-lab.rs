use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcf_lab::experiments::{
    check_suite, extract_delta_wing, extraction_checks, fit_snapshot, profile_from_spec, run_scenario, sweep_dir,
    Overrides, ScenarioConfig, WingParams,
};
use mcf_lab::grid::{Geometry, Grid2D};
use mcf_lab::translators::{bowl_profile, table_to_string, TableMeta, TranslatorProfile};
use mcf_lab::Error;

#[derive(Parser)]
#[command(name = "mcf-lab", version, about = "Graphical mean curvature flow experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid spacing override.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Final time override.
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
    /// Seed override for Fourier perturbations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file.
    Run { config: PathBuf },
    /// Run every scenario file in a directory.
    Sweep { dir: PathBuf },
    /// Run an invariant suite: formulas, operators, profiles or all.
    Check { suite: String },
    /// Tabulate a translator.
    Profile {
        #[command(subcommand)]
        which: ProfileCmd,
    },
    /// Fit a saved snapshot table against a profile (`grim-reaper`, `tilted:<b>` or a table).
    Fit {
        trajectory: PathBuf,
        profile: String,
        #[arg(long)]
        c1_bracket: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ProfileCmd {
    Bowl {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 20.0)]
        r_max: f64,
    },
    Tilted {
        b: f64,
        #[arg(long, default_value_t = 0.4)]
        delta: f64,
        #[arg(long, default_value_t = 3.0)]
        l: f64,
    },
    ExtractWing {
        b: f64,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        #[arg(long, default_value_t = 8.0)]
        l: f64,
    },
}

fn code(e: &Error) -> u8 {
    match e {
        Error::SolverAbort { .. } => 3,
        _ => 2,
    }
}

fn emit(out: Option<&Path>, name: &str, text: &str, quiet: bool) -> Result<(), Error> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            if !quiet {
                println!("wrote {}", path.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn table_text(profile: &TranslatorProfile) -> Result<String, Error> {
    let t = profile.table().ok_or_else(|| Error::Table("profile has no table".into()))?;
    table_to_string(t.meta(), t.field())
}

fn run(cli: Cli) -> Result<u8, Error> {
    let overrides = Overrides { out: cli.out.clone(), h: cli.h, t_end: cli.t_end, seed: cli.seed };
    let say = |s: &str| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.cmd {
        Cmd::Run { config } => {
            let mut cfg = ScenarioConfig::load(config)?;
            cfg.apply(&overrides)?;
            let bundle = run_scenario(&cfg)?;
            say(bundle.summary().trim_end());
            Ok(bundle.exit_code() as u8)
        }
        Cmd::Sweep { dir } => {
            let summary = sweep_dir(dir, &overrides)?;
            say(summary.table().trim_end());
            for r in summary.rows.iter().filter(|r| r.error.is_some() || r.abort.is_some()) {
                eprintln!("{}: {}", r.name, r.error.as_deref().or(r.abort.as_deref()).unwrap_or_default());
            }
            Ok(summary.exit_code() as u8)
        }
        Cmd::Check { suite } => {
            let outcomes = check_suite(suite)?;
            for o in &outcomes {
                say(&o.to_string());
            }
            Ok(if outcomes.iter().all(|o| o.passed()) { 0 } else { 1 })
        }
        Cmd::Profile { which } => match which {
            ProfileCmd::Bowl { dim, r_max } => {
                let h = cli.h.unwrap_or((1e-3 * r_max).min(0.0025));
                let p = bowl_profile(*dim, *r_max, h)?;
                emit(cli.out.as_deref(), &format!("bowl_n{dim}.tbl"), &table_text(&p)?, cli.quiet)?;
                Ok(0)
            }
            ProfileCmd::Tilted { b, delta, l } => {
                let p = TranslatorProfile::grim_reaper_plane(*b)?;
                let geometry = Geometry::Slab(Grid2D::slab(*b, *delta, *l, cli.h.unwrap_or(0.05))?);
                let field = p.sample_on(&geometry)?;
                let meta = TableMeta { b: Some(*b), theta: p.theta(), ..TableMeta::new("tilted_grim_reaper_plane", 2, 0.0) };
                let text = table_to_string(&meta, &field)?;
                emit(cli.out.as_deref(), "tilted.tbl", &text, cli.quiet)?;
                Ok(0)
            }
            ProfileCmd::ExtractWing { b, delta, l } => {
                let params = WingParams::with_final_spacing(*delta, *l, cli.h.unwrap_or(1.0 / 80.0));
                let w = extract_delta_wing(*b, &params)?;
                let checks = extraction_checks(&w);
                for c in &checks {
                    eprintln!("{c}");
                }
                emit(cli.out.as_deref(), "delta_wing.tbl", &table_text(&w.profile)?, cli.quiet)?;
                Ok(if checks.iter().all(|c| c.passed()) { 0 } else { 1 })
            }
        },
        Cmd::Fit { trajectory, profile, c1_bracket } => {
            let p = profile_from_spec(profile)?;
            let (t, fit) = fit_snapshot(trajectory, &p, None, *c1_bracket)?;
            println!(
                "t={t} c0={:.9e} c1={:.9e} residual={:.3e} sup_dist={:.3e}{}",
                fit.c0,
                fit.c1,
                fit.residual,
                fit.sup_dist,
                if fit.flagged { " (c1 on bracket edge)" } else { "" }
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}
