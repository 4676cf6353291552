//! Mesh input, result output, case files and the benchmark harness for the
//! `subswe-core` subgrid shallow water solver.

pub mod case_file;
pub mod gmsh;
pub mod harness;
pub mod output;

pub use subswe_core;
