//! Library surface of the `rds-ss` command-line tool: subcommand handlers,
//! file formats, and the run manifest. The binary in `main.rs` is a thin
//! argument-parsing shell over [`commands`].

pub mod commands;
pub mod errors;
pub mod formats;
pub mod manifest;
