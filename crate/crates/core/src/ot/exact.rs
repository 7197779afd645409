//! Exact linear optimal transport.
//!
//! The transportation problem is solved with the primal transportation
//! simplex: a north-west-corner basis, node potentials on the spanning tree
//! of basic cells, and Bland's lowest-index rule for both the entering and
//! the leaving cell. Bland's rule makes the pivot sequence deterministic and
//! rules out cycling on the heavily degenerate problems produced by uniform
//! marginals. Every returned plan is a vertex of the feasible polytope, so it
//! has at most `n + m - 1` positive entries.

use ndarray::{Array2, ArrayView2};

use super::types::{frobenius, CostMatrix, ProbVector, TransportPlan};
use crate::error::{Error, Result};

/// An optimal coupling together with its cost `⟨C, P⟩`.
#[derive(Debug, Clone)]
pub struct OtSolution {
    pub plan: TransportPlan,
    pub cost: f64,
    pub pivots: usize,
}

/// Minimises `Σ C_ij P_ij` over couplings of `u` and `v`.
pub fn solve_exact_ot(cost: &CostMatrix, u: &ProbVector, v: &ProbVector) -> Result<OtSolution> {
    let (n, m) = cost.shape();
    if n != u.len() || m != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost is {n}x{m} but marginals have lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    solve_linear(cost.view(), u, v)
}

/// Same as [`solve_exact_ot`] but accepts any finite cost, including negative
/// entries. Used for the linearised subproblems of the fused solver.
pub(crate) fn solve_linear(
    cost: ArrayView2<f64>,
    u: &ProbVector,
    v: &ProbVector,
) -> Result<OtSolution> {
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("cost matrix"));
    }
    let (n, m) = cost.dim();
    let mut simplex = TransportSimplex::new(cost, u.as_slice(), v.as_slice());
    let pivots = simplex.run()?;
    debug_assert_eq!(simplex.basis.iter().filter(|b| **b).count(), n + m - 1);
    let plan = Array2::from_shape_vec((n, m), simplex.flow).expect("flow has n*m entries");
    let cost_value = frobenius(cost, plan.view());
    Ok(OtSolution {
        plan: TransportPlan::from_parts_unchecked(plan, u.clone(), v.clone()),
        cost: cost_value,
        pivots,
    })
}

struct TransportSimplex<'a> {
    cost: ArrayView2<'a, f64>,
    n: usize,
    m: usize,
    flow: Vec<f64>,
    basis: Vec<bool>,
    tol: f64,
}

impl<'a> TransportSimplex<'a> {
    fn new(cost: ArrayView2<'a, f64>, u: &[f64], v: &[f64]) -> Self {
        let (n, m) = cost.dim();
        let mut flow = vec![0.0; n * m];
        let mut basis = vec![false; n * m];

        // North-west corner rule; always yields n + m - 1 basic cells.
        let mut row_left = u.to_vec();
        let mut col_left = v.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let x = row_left[i].min(col_left[j]).max(0.0);
            flow[i * m + j] = x;
            basis[i * m + j] = true;
            row_left[i] -= x;
            col_left[j] -= x;
            if i == n - 1 && j == m - 1 {
                break;
            }
            if i == n - 1 {
                j += 1;
            } else if j == m - 1 || row_left[i] <= col_left[j] {
                i += 1;
            } else {
                j += 1;
            }
        }

        let scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        TransportSimplex {
            cost,
            n,
            m,
            flow,
            basis,
            tol: 1e-12 * scale.max(f64::MIN_POSITIVE),
        }
    }

    fn run(&mut self) -> Result<usize> {
        let limit = 10_000 + 200 * self.n * self.m * (self.n + self.m);
        let mut pivots = 0;
        let mut tree = Tree::new(self.n, self.m);
        loop {
            tree.rebuild(&self.basis, self.m);
            let (row_pot, col_pot) = tree.potentials(self.cost);
            let entering = (0..self.n * self.m).find(|&idx| {
                if self.basis[idx] {
                    return false;
                }
                let (i, j) = (idx / self.m, idx % self.m);
                self.cost[[i, j]] - row_pot[i] - col_pot[j] < -self.tol
            });
            let Some(entering) = entering else {
                return Ok(pivots);
            };
            if pivots >= limit {
                return Err(Error::SimplexStalled(pivots));
            }
            self.pivot(&tree, entering);
            pivots += 1;
        }
    }

    fn pivot(&mut self, tree: &Tree, entering: usize) {
        let (ei, ej) = (entering / self.m, entering % self.m);
        // Path in the tree from column node `ej` back to row node `ei`; its
        // cells alternate between losing and gaining flow.
        let path = tree.path(self.n + ej, ei);
        let mut leaving = usize::MAX;
        let mut theta = f64::INFINITY;
        for &cell in path.iter().step_by(2) {
            let f = self.flow[cell];
            if f < theta || (f == theta && cell < leaving) {
                theta = f;
                leaving = cell;
            }
        }
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                self.flow[cell] = (self.flow[cell] - theta).max(0.0);
            } else {
                self.flow[cell] += theta;
            }
        }
        self.flow[entering] = theta;
        self.flow[leaving] = 0.0;
        self.basis[leaving] = false;
        self.basis[entering] = true;
    }
}

/// Spanning tree of basic cells over `n` row nodes and `m` column nodes.
struct Tree {
    n: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Tree {
    fn new(n: usize, m: usize) -> Self {
        Tree {
            n,
            adjacency: vec![Vec::new(); n + m],
        }
    }

    fn rebuild(&mut self, basis: &[bool], m: usize) {
        for adj in &mut self.adjacency {
            adj.clear();
        }
        for (idx, _) in basis.iter().enumerate().filter(|(_, b)| **b) {
            let (i, j) = (idx / m, idx % m);
            self.adjacency[i].push((self.n + j, idx));
            self.adjacency[self.n + j].push((i, idx));
        }
    }

    fn potentials(&self, cost: ArrayView2<f64>) -> (Vec<f64>, Vec<f64>) {
        let total = self.adjacency.len();
        let mut pot = vec![0.0; total];
        let mut seen = vec![false; total];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(node) = stack.pop() {
            for &(next, _) in &self.adjacency[node] {
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                let (i, j) = if node < self.n {
                    (node, next - self.n)
                } else {
                    (next, node - self.n)
                };
                pot[next] = cost[[i, j]] - pot[node];
                stack.push(next);
            }
        }
        let col = pot.split_off(self.n);
        (pot, col)
    }

    /// Cells along the unique tree path from `from` to `to`.
    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let total = self.adjacency.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; total];
        let mut seen = vec![false; total];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(node) = stack.pop() {
            if node == to {
                break;
            }
            for &(next, cell) in &self.adjacency[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    stack.push(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = to;
        while node != from {
            let (prev, cell) = parent[node].expect("basis forms a spanning tree");
            cells.push(cell);
            node = prev;
        }
        cells.reverse();
        cells
    }
}
