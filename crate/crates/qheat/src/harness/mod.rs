//! Configuration ingestion, sweep orchestration, CSV persistence, and the
//! pieces behind the `qheat` command-line tool.

pub mod config;
pub mod csv;
pub mod presets;
pub mod sweep;
