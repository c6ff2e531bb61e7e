//! Configuration, check orchestration and report output for `geolen`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod outputs;
pub mod report;
pub mod suite;

pub use config::{load_config, parse_config, ConfigError, RunConfig, SuiteConfig};
pub use report::{CheckRow, RunReport};
pub use suite::run_suite;
