//! Exact optimal transport and fused Gromov-Wasserstein over dense matrices.

mod exact;
mod fgw;
mod gw;
mod types;

pub use exact::{solve_exact_ot, OtSolution};
pub use fgw::{
    fused_objective, line_search, permutation_plan, solve_fgw, solve_fgw_multistart, FgwInit,
    FgwResult, SolverOptions,
};
pub use gw::{gw_gradient, gw_gradient_raw, gw_objective, gw_objective_raw};
pub use types::{
    uniform_weights, CostMatrix, ProbVector, StructureMatrix, TransportPlan, MARGINAL_TOL, MASS_TOL,
};
