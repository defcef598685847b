//! File formats, reports and the command-line front end for
//! [`fairgroup_core`].

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod model_io;
pub mod report;
