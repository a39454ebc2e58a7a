//! Report builders behind the `seqrac` command-line tool.

pub mod emit;
pub mod reports;
pub mod config;
pub mod manifest;
pub mod verify;
