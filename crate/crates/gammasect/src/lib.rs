//! Command-line front end, parallel drivers and report formats for
//! `gammasect-core`.

pub mod cli;
pub mod parallel;
pub mod report;
