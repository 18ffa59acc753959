//! Allocation-free solver runtime.
//!
//! These sources are compiled into the library and also copied verbatim into
//! every generated solver, so the two share one implementation of the cone
//! operations and the interior-point loop. They may only refer to each other
//! through `super::` paths.

pub mod cone;
pub mod solver;
pub mod utils;

/// `(file name, source text)` of each runtime module, for emission.
pub const SOURCES: [(&str, &str); 3] = [
    ("cone.rs", include_str!("cone.rs")),
    ("solver.rs", include_str!("solver.rs")),
    ("utils.rs", include_str!("utils.rs")),
];
