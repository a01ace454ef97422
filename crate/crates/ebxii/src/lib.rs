//! File formats, data sets, the parallel study runner and command
//! implementations for the `ebxii` tool. The numerics live in
//! [`ebxii_core`].

pub mod commands;
pub mod config;
pub mod data;
pub mod report;
pub mod study;
pub mod syntax;
