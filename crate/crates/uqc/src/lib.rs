//! File formats, experiment orchestration and the `uqc` command line on top
//! of [`uqc_core`].

pub mod cache;
pub mod config;
pub mod experiment;
pub mod export;
pub mod spec;
