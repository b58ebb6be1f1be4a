//! Command-line driver for `compactify-core`: model files, CSV export,
//! JSON reports and the acceptance suite.

pub mod chain;
pub mod cli;
pub mod io;
pub mod report;
pub mod verify;
