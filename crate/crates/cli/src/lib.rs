//! Library side of the `mcell` binary: config parsing and the
//! subcommand implementations, split out so integration tests can call
//! them directly.

pub mod commands;
pub mod config;
