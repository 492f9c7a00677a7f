//! Batch front end: resolves a run configuration from flags and an optional
//! JSON file, runs one command over a table of `(n, link, R)` cells and
//! renders CSV or JSON.

pub mod config;
pub mod error;
pub mod run;
pub mod verify;

pub use config::{parse_link_spec, parse_r_ladder, parse_run_config, Command, Format, LinkSpec, PartialConfig, RunConfig};
pub use error::{ParseError, RunError};
pub use run::{render, run, Table};
