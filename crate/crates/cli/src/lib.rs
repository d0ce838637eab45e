//! Command-line front end for `polypart`: instance files, report files and
//! fixed-seed verification suites.

pub mod commands;
pub mod instance;
pub mod report;
pub mod suites;
