//! Configuration files, figure sweeps, summary reports and their CSV output.

pub mod config;
pub mod figures;
pub mod summary;
pub mod table;

pub use config::{parse_config, ConfigError, ConfigErrorKind, RunConfig};
pub use figures::{reproduce_figure, Figure};
pub use summary::{
    linearize_table, noise_table, nonlinearity_table, offset_table, optimize_table, run_report,
    ConfigBudget, ErrorBudget, OffsetEntry,
};
pub use table::{Cell, SweepResult, Table, TableError};
