//! Benchmark instances, sweeps and performance metrics.
//!
//! [`problems`] generates the five benchmark classes and the LQR KKT
//! matrices; [`runner`] solves them with the library or with emitted
//! solvers and writes `records.csv`, `sgm.csv`, `profiles.svg` and
//! `ldl_compare.csv`.

pub mod external;
pub mod ldl_compare;
pub mod metrics;
pub mod problems;
pub mod rng;
pub mod runner;
pub mod svg;

pub use metrics::{normalize, performance_profiles, shifted_geometric_mean, Curve, Profiles};
pub use problems::{Class, ALL_CLASSES};
pub use runner::{run_bench, BenchConfig, BenchError, BenchRecord, BenchReport, Sizes, SolverKind};
