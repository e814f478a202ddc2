//! File formats, configuration and the command-line front end for `bvm-core`.

pub mod cli;
pub mod config;
pub mod format;
pub mod parallel;
pub mod report;
