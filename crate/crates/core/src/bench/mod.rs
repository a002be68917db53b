//! Benchmark harness: random plants, parallel suites, performance profiles,
//! persistence and the `hinf` command line.

mod cli;
mod plants;
mod profile;
mod suite;

pub use cli::{cli_main, run_cli};
pub use plants::{random_plant, PlantSpec, MIN_PLANT_NORM};
pub use profile::{
    default_tau_grid, performance_profile, tau_grid, write_profile_csv, ProfileCurve,
};
pub use suite::{
    format_sig, plant_seed, read_records_csv, run_suite, session_seed, summarize,
    write_records_csv, MethodSummary, RunRecord, SuiteConfig, SuiteSummary, RECORDS_HEADER,
};
