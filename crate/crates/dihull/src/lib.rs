//! Instance formats, corpus generation and the experiment runner behind the
//! `dihull` command line tool.

pub mod config;
pub mod corpus;
pub mod format;
pub mod run;

pub use config::{ExperimentConfig, ExperimentReport, Mode, Task, Verdict};
pub use format::{HullPointJson, Instance, Loaded, MapTable, Num};
pub use run::{load_config, run, run_in, HarnessError};
