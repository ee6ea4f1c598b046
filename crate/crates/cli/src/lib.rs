//! Command-line front end: code files, command dispatch and report rendering.

pub mod codefile;
pub mod commands;
pub mod error;
