//! File formats, run configuration and subcommands behind the `chancal` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod geometry;
