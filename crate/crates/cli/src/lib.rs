//! Library surface of the command-line tool: config parsing, ingestion
//! padding, and the command implementations. The `wtconv` binary is a thin
//! argument-parsing shell over this.

pub mod commands;
pub mod common;
pub mod config;
pub mod ingest;
