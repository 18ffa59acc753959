//! Solvers and kernels emitted at build time, compiled into this crate so
//! tests can call them directly and compare against the library.
//!
//! `toy`, `rkf`, `lcvx`, `lasso`, `portfolio` and `oscmass` are complete
//! generated solvers; `ldl_t5`, `ldl_t15` and `ldl_t50` are unrolled
//! factorizations of LQR KKT matrices.

pub mod cases;

include!(concat!(env!("OUT_DIR"), "/mods.rs"));
