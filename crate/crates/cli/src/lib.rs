//! Command-line front end: frame export, run manifests and the subcommands
//! behind the `nlgames` binary.

pub mod cli;
pub mod commands;
pub mod error;
pub mod export;
pub mod manifest;

pub use cli::{main_with, Cli, Command};
pub use commands::{
    cmd_census, cmd_check_linear, cmd_classify, cmd_count, cmd_derive, cmd_explore, cmd_simulate,
    SimulationSummary, Solver,
};
pub use error::{exit, CliError};
pub use export::{export_frame, frame_name, FrameFormat};
pub use manifest::{parse_init, resolve_matrix, RunManifest, RunSpec};
