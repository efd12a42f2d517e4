//! File formats, reports and the command-line driver around
//! [`skilift_core`].

pub mod cli;
pub mod commands;
pub mod formats;
pub mod report;
