//! Command-line front end: expression parser, verification commands and report output.

pub mod parse;
pub mod run;
