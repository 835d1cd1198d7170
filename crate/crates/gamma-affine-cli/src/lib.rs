//! Configuration parsing, the bundled example catalogue, and suite
//! orchestration behind the `gamma-affine` binary.

pub mod catalogue;
pub mod config;
pub mod suites;
