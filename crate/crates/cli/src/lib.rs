//! Configuration-driven front end for the blow-up laboratory: named,
//! reproducible experiments with machine-readable reports.

pub mod config;
pub mod report;
pub mod runner;
pub mod scenarios;
