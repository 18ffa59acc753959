//! Generator for standalone solvers specialized to one sparsity pattern.
//!
//! [`plan`] runs the ordering and symbolic factorization once, at generation
//! time, and traces every sparse kernel the solver needs into a
//! [`KernelProgram`]. [`emit`] renders the plan as a Rust crate that has no
//! dependencies, performs no heap allocation while solving, and shares the
//! interior-point driver with the library, so both run the same iteration
//! on the same data.

pub mod emit;
pub mod ir;
pub mod unroll;

use std::path::PathBuf;

use forge_core::kkt::{KktLayout, Ordering};
use forge_core::{ProblemData, ProblemError};

pub use emit::{emit, render_files, EmitError, EmitReport};
pub use ir::KernelProgram;
pub use unroll::{unroll_ldl, unroll_ldl_solve, unroll_spmv, unroll_symv};

/// Default warning threshold for the total scalar operation count.
pub const DEFAULT_OP_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EmitOptions {
    /// Package name of the emitted crate.
    pub crate_name: String,
    /// Emit the `runtest` binary.
    pub test_runner: bool,
    /// Emission warns when the kernels exceed this many scalar operations.
    pub op_budget: usize,
    /// Statements per generated function; long kernels are split into parts
    /// to keep compile times manageable.
    pub chunk: usize,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions { crate_name: "custom_solver".into(), test_runner: true, op_budget: DEFAULT_OP_BUDGET, chunk: 2000 }
    }
}

/// A problem whose sparsity pattern and cones are fixed. Its values are the
/// defaults the generated `load_data` installs.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub problem: ProblemData,
    pub out_dir: PathBuf,
    pub options: EmitOptions,
}

/// Every kernel of a generated solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernels {
    pub p_mul: KernelProgram,
    pub a_mul: KernelProgram,
    pub at_mul: KernelProgram,
    pub g_mul: KernelProgram,
    pub gt_mul: KernelProgram,
    /// `K x` on the permuted KKT values, without regularization.
    pub kkt_mul: KernelProgram,
    pub ldl_factor: KernelProgram,
    pub ldl_solve: KernelProgram,
}

impl Kernels {
    pub fn all(&self) -> [(&'static str, &KernelProgram); 8] {
        [
            ("p_mul", &self.p_mul),
            ("a_mul", &self.a_mul),
            ("at_mul", &self.at_mul),
            ("g_mul", &self.g_mul),
            ("gt_mul", &self.gt_mul),
            ("kkt_mul", &self.kkt_mul),
            ("ldl_factor", &self.ldl_factor),
            ("ldl_solve", &self.ldl_solve),
        ]
    }

    pub fn op_count(&self) -> usize {
        self.all().iter().map(|(_, k)| k.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenPlan {
    pub spec: GenSpec,
    /// KKT slot sources, ordering and `L` pattern.
    pub layout: KktLayout,
    pub kernels: Kernels,
}

/// Orders and symbolically factors the KKT pattern of `spec` and unrolls
/// all kernels. Depends only on the patterns and cones, never on values.
pub fn plan(spec: &GenSpec) -> Result<GenPlan, ProblemError> {
    let prob = &spec.problem;
    prob.validate()?;
    let layout = KktLayout::new(prob, Ordering::Amd);
    let kernels = Kernels {
        p_mul: unroll_symv(&prob.P),
        a_mul: unroll_spmv(&prob.A, false),
        at_mul: unroll_spmv(&prob.A, true),
        g_mul: unroll_spmv(&prob.G, false),
        gt_mul: unroll_spmv(&prob.G, true),
        kkt_mul: unroll_symv(&layout.sym.kperm),
        ldl_factor: unroll_ldl(&layout.sym, &layout.signs),
        ldl_solve: unroll_ldl_solve(&layout.sym),
    };
    Ok(GenPlan { spec: spec.clone(), layout, kernels })
}
