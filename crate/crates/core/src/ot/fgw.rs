//! Fused Gromov-Wasserstein by conditional gradient.
//!
//! The fused objective
//!
//! ```text
//! f(P) = (1 - λ) ⟨C, P⟩ + λ k Σ (A_ii' - B_jj')² P_ij P_i'j'
//! ```
//!
//! is minimised over the couplings of `u` and `v`. Each iteration linearises
//! `f` at the current plan, solves the resulting linear transport problem
//! exactly, and moves towards that vertex by the exact minimiser of the
//! (quadratic) objective along the segment. The GW term is not convex, so the
//! result is a stationary point that depends on the starting plan.

use ndarray::{Array2, ArrayView2};

use super::exact::solve_linear;
use super::gw::{cross, gradient_unchecked, objective_unchecked};
use super::types::{frobenius, CostMatrix, ProbVector, StructureMatrix, TransportPlan, MARGINAL_TOL};
use crate::error::{Error, Result};

/// Starting plan for the conditional-gradient iterations.
#[derive(Debug, Clone, Default)]
pub enum FgwInit {
    /// The independent coupling `u vᵀ`.
    #[default]
    Product,
    /// A caller-supplied feasible plan.
    Plan(TransportPlan),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop once the relative objective decrease of an iteration falls below this.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub init: FgwInit,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rel_tol: 1e-9,
            max_iter: 1000,
            init: FgwInit::Product,
        }
    }
}

impl SolverOptions {
    pub fn with_init(mut self, init: FgwInit) -> Self {
        self.init = init;
        self
    }
}

/// Outcome of a fused solve, with the objective split into its linear and
/// structural parts at the returned plan.
#[derive(Debug, Clone)]
pub struct FgwResult {
    /// `(1 - λ) · wmd_component + λ · k · smd_component`.
    pub distance: f64,
    pub plan: TransportPlan,
    /// `⟨C, P⟩` at the returned plan.
    pub wmd_component: f64,
    /// GW objective at the returned plan.
    pub smd_component: f64,
    pub k: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after initialisation and after every accepted step.
    pub trace: Vec<f64>,
    /// Set when the structural term was dropped because both structures
    /// were indistinguishable; the result is then a pure linear transport.
    pub structure_fallback: bool,
}

impl FgwResult {
    /// `k · smd_component`, the structural share on the cost scale.
    pub fn scaled_smd(&self) -> f64 {
        self.k * self.smd_component
    }
}

/// Value of the fused objective at an arbitrary plan matrix.
pub fn fused_objective(
    cost: ArrayView2<f64>,
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    plan: ArrayView2<f64>,
    lambda: f64,
    k: f64,
) -> f64 {
    let linear = frobenius(cost, plan);
    let structural = if lambda * k == 0.0 {
        0.0
    } else {
        objective_unchecked(a, b, plan)
    };
    (1.0 - lambda) * linear + lambda * k * structural
}

/// Exact step along `delta = Q - P` for the fused objective.
///
/// Along the segment the objective is `α τ² + β τ + f(P)`, with
/// `α = -2 λ k ⟨Δ, A Δ Bᵀ⟩` and
/// `β = (1 - λ) ⟨C, Δ⟩ - 2 λ k (⟨Δ, A P Bᵀ⟩ + ⟨P, A Δ Bᵀ⟩)`.
/// The marginal part of the GW term is constant because `Δ` has zero row and
/// column sums. Panics if the shapes are inconsistent.
pub fn line_search(
    delta: ArrayView2<f64>,
    cost: ArrayView2<f64>,
    a: &StructureMatrix,
    b: &StructureMatrix,
    plan: ArrayView2<f64>,
    lambda: f64,
    k: f64,
) -> f64 {
    let (alpha, beta) = segment_coefficients(delta, cost, a.view(), b.view(), plan, lambda, k);
    minimise_on_unit_interval(alpha, beta)
}

fn segment_coefficients(
    delta: ArrayView2<f64>,
    cost: ArrayView2<f64>,
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    plan: ArrayView2<f64>,
    lambda: f64,
    k: f64,
) -> (f64, f64) {
    let linear = (1.0 - lambda) * frobenius(cost, delta);
    let weight = lambda * k;
    if weight == 0.0 {
        return (0.0, linear);
    }
    let a_delta_b = cross(a, b, delta);
    let a_plan_b = cross(a, b, plan);
    let alpha = -2.0 * weight * frobenius(delta, a_delta_b.view());
    let beta = linear
        - 2.0 * weight * (frobenius(delta, a_plan_b.view()) + frobenius(plan, a_delta_b.view()));
    (alpha, beta)
}

pub(crate) fn minimise_on_unit_interval(alpha: f64, beta: f64) -> f64 {
    if alpha > 0.0 {
        (-beta / (2.0 * alpha)).clamp(0.0, 1.0)
    } else if alpha + beta < 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Minimises the fused objective over couplings of `u` and `v` from the
/// starting plan in `opts`.
#[allow(clippy::too_many_arguments)]
pub fn solve_fgw(
    cost: &CostMatrix,
    a: &StructureMatrix,
    b: &StructureMatrix,
    u: &ProbVector,
    v: &ProbVector,
    lambda: f64,
    k: f64,
    opts: &SolverOptions,
) -> Result<FgwResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidScale(k));
    }
    let (n, m) = (u.len(), v.len());
    if cost.shape() != (n, m) || a.dim() != n || b.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "cost {:?}, structures {}x{} and {}x{}, marginals {n} and {m}",
            cost.shape(),
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }

    let mut plan = match &opts.init {
        FgwInit::Product => TransportPlan::product(u, v).into_inner(),
        FgwInit::Plan(p) => {
            if p.shape() != (n, m) {
                return Err(Error::DimensionMismatch(format!(
                    "initial plan is {:?}, expected {n}x{m}",
                    p.shape()
                )));
            }
            TransportPlan::new(p.as_array().clone(), u.clone(), v.clone())?.into_inner()
        }
    };

    let (c, av, bv) = (cost.view(), a.view(), b.view());
    let structural = lambda * k != 0.0;
    let objective = |p: ArrayView2<f64>| fused_objective(c, av, bv, p, lambda, k);

    let mut value = objective(plan.view());
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..opts.max_iter {
        let grad = if structural {
            let mut g = gradient_unchecked(av, bv, plan.view());
            g.mapv_inplace(|x| lambda * k * x);
            g.scaled_add(1.0 - lambda, &c);
            g
        } else {
            c.mapv(|x| (1.0 - lambda) * x)
        };
        let target = solve_linear(grad.view(), u, v)?.plan.into_inner();
        let delta = &target - &plan;
        let (alpha, beta) =
            segment_coefficients(delta.view(), c, av, bv, plan.view(), lambda, k);
        let tau = minimise_on_unit_interval(alpha, beta);
        if tau == 0.0 {
            converged = true;
            break;
        }
        let next: Array2<f64> = if tau == 1.0 {
            target
        } else {
            &plan * (1.0 - tau) + &target * tau
        };
        let next_value = objective(next.view());
        if next_value > value {
            // Only round-off can push the exact step uphill.
            converged = true;
            break;
        }
        let decrease = value - next_value;
        plan = next;
        iterations += 1;
        trace.push(next_value);
        let previous = value;
        value = next_value;
        if decrease <= opts.rel_tol * previous.abs() {
            converged = true;
            break;
        }
    }

    let wmd_component = frobenius(c, plan.view());
    let smd_component = objective_unchecked(av, bv, plan.view());
    let distance = (1.0 - lambda) * wmd_component + lambda * k * smd_component;
    let plan = TransportPlan::from_parts_unchecked(plan, u.clone(), v.clone());
    debug_assert!(plan.marginal_error() <= MARGINAL_TOL);
    Ok(FgwResult {
        distance,
        plan,
        wmd_component,
        smd_component,
        k,
        lambda,
        iterations,
        converged,
        trace,
        structure_fallback: false,
    })
}

/// Runs [`solve_fgw`] from the product coupling and from every plan in
/// `starts`, returning the lowest-distance result (earliest on ties).
#[allow(clippy::too_many_arguments)]
pub fn solve_fgw_multistart(
    cost: &CostMatrix,
    a: &StructureMatrix,
    b: &StructureMatrix,
    u: &ProbVector,
    v: &ProbVector,
    lambda: f64,
    k: f64,
    opts: &SolverOptions,
    starts: &[TransportPlan],
) -> Result<FgwResult> {
    let product = opts.clone().with_init(FgwInit::Product);
    let mut best = solve_fgw(cost, a, b, u, v, lambda, k, &product)?;
    for start in starts {
        let run_opts = opts.clone().with_init(FgwInit::Plan(start.clone()));
        let run = solve_fgw(cost, a, b, u, v, lambda, k, &run_opts)?;
        if run.distance < best.distance {
            best = run;
        }
    }
    Ok(best)
}

/// The scaled permutation plan `P_{i, perm[i]} = 1/n` between uniform
/// distributions of equal size.
pub fn permutation_plan(perm: &[usize]) -> Result<TransportPlan> {
    let n = perm.len();
    let u = super::types::uniform_weights(n)?;
    let mut plan = Array2::zeros((n, n));
    for (i, &j) in perm.iter().enumerate() {
        if j >= n {
            return Err(Error::DimensionMismatch(format!(
                "permutation entry {j} out of range for n = {n}"
            )));
        }
        plan[[i, j]] = 1.0 / n as f64;
    }
    TransportPlan::new(plan, u.clone(), u)
}
