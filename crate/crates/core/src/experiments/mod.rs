//! Figure-reproduction commands, their configuration and output tables.

pub mod commands;
pub mod config;
pub mod plot;
pub mod table;

pub use commands::{cmd_avg_sweep, cmd_chsh, cmd_dynamics, cmd_eigen_sweep, cmd_ensemble_sweep, run, VERSION};
pub use config::{Command, Format, RunConfig, StateSpec, DEFAULT_SEED};
pub use plot::{emit_plot_script, Figure};
pub use table::{Cell, Column, ResultTable};
