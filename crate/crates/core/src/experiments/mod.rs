//! Scenario files, the run harness, sweeps, wing extraction and invariant suites.

pub mod config;
pub mod insensitivity;
pub mod scenario;
pub mod suites;
pub mod wing;

pub use config::{BoundaryChoice, Overrides, Perturbation, ScenarioConfig, ScenarioKind};
pub use insensitivity::{insensitivity_check, measure_insensitivity, Insensitivity};
pub use scenario::{
    prepare, reproduce_c0, run_scenario, C0Verdict, CheckLine, Prepared, ReportBundle, CSV_HEADER, QUASI_STEADY,
};
pub use suites::{check_suite, fit_snapshot, profile_from_spec, sweep, sweep_dir, SweepRow, SweepSummary};
pub use wing::{extract_delta_wing, extraction_checks, WingExtraction, WingParams};
