//! Linear, nonlinear and constrained solvers.
//!
//! Transient systems are advanced with a θ-scheme; flux systems are solved by a
//! minimum-norm projection or, given an objective, a dense simplex.

mod flux;
mod linear;
mod lp;
mod nnls;
mod nullspace;
mod qp;
mod transient;

pub use flux::{solve_flux, solve_flux_with_bounds, FluxSolution, FluxStatus};
pub use linear::{condition_estimate, solve_dense, solve_linear};
pub use lp::{linprog, LpSolution, LpStatus};
pub use nnls::{nnls, NnlsSolution};
pub use nullspace::{left_null_space_basis, null_space_basis, rank, DEFAULT_RANK_TOL};
pub use qp::min_norm_point;
pub use transient::{
    integrate_transient, step_transient, Nonlinear, SolverConfig, StepResult, TransientSummary, CLIP_THRESHOLD,
};
