//! Std companion to `tame-opt-core`: JSON body files, report serialization
//! (JSON and CSV), documented exceptional sets for the fixtures, a
//! rayon-parallel survey driver, and the `tame-opt` CLI.

pub mod exceptional;
pub mod format;
pub mod parallel;

pub use tame_opt_core as core;

/// Schema tag stamped on every emitted JSON document.
pub const SCHEMA: &str = "tame-opt-lab/1";
