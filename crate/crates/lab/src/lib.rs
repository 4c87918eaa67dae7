//! File formats, experiment runners and the command-line front end for
//! `projlab-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;

pub use projlab_core as core_lib;
