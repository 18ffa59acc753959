//! Interior-point solver for quadratic-objective second-order cone programs
//!
//! ```text
//! minimize    1/2 x'Px + c'x
//! subject to  Ax = b,  Gx + s = h,  s in K
//! ```
//!
//! with `K` a nonnegative orthant times second-order cones.
//!
//! The iteration itself lives in [`runtime`], a set of allocation-free
//! sources shared with generated solvers. This crate adds problem
//! validation, the QSF-JSON file format, approximate minimum degree
//! ordering, and a sparse `LDL^T` backend.

pub mod cones;
pub mod ipm;
pub mod kkt;
pub mod problem;
pub mod qsf;
pub mod runtime;
pub mod sparse;

pub use ipm::{check_optimality, solve, Solver};
pub use kkt::Ordering;
pub use problem::{ConeSpec, ProblemData, ProblemError, Settings, Solution, SparseMat, SparseSym, Status};
