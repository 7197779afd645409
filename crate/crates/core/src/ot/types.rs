use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`ProbVector`].
pub const MASS_TOL: f64 = 1e-12;
/// Tolerance on plan marginals and structure row sums.
pub const MARGINAL_TOL: f64 = 1e-9;

/// A discrete probability distribution over the tokens of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Array1<f64>);

impl ProbVector {
    /// Wraps `weights`, which must already be non-negative and sum to one.
    pub fn new(weights: impl Into<Array1<f64>>) -> Result<Self> {
        let weights = weights.into();
        check_mass(weights.view())?;
        Ok(ProbVector(weights))
    }

    /// Rescales non-negative `weights` so they sum to one.
    pub fn normalized(weights: impl Into<Array1<f64>>) -> Result<Self> {
        let weights = weights.into();
        if weights.is_empty() {
            return Err(Error::InvalidProbVector("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProbVector(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total = weights.sum();
        if total <= 0.0 {
            return Err(Error::InvalidProbVector("zero total mass".into()));
        }
        ProbVector::new(weights / total)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("ProbVector is contiguous")
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.0
    }
}

fn check_mass(weights: ArrayView1<f64>) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidProbVector("empty weight vector".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidProbVector(format!(
            "entry {w} is negative or non-finite"
        )));
    }
    let total = weights.sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidProbVector(format!(
            "entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Uniform weights `1/n` on `n` tokens.
pub fn uniform_weights(n: usize) -> Result<ProbVector> {
    if n == 0 {
        return Err(Error::InvalidProbVector(
            "uniform weights need at least one token".into(),
        ));
    }
    ProbVector::new(Array1::from_elem(n, 1.0 / n as f64))
}

/// Pairwise ground costs between two token sequences. Entries are finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(Array2<f64>);

impl CostMatrix {
    pub fn new(costs: Array2<f64>) -> Result<Self> {
        if costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("cost matrix"));
        }
        if let Some(c) = costs.iter().find(|c| **c < 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "cost entries must be non-negative, found {c}"
            )));
        }
        Ok(CostMatrix(costs))
    }

    /// An all-zero `n × m` cost, used when only structure matters.
    pub fn zeros(n: usize, m: usize) -> Self {
        CostMatrix(Array2::zeros((n, m)))
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    /// Mean of all entries.
    pub fn mean(&self) -> f64 {
        self.0.mean().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        CostMatrix::new(&self.0 * factor)
    }
}

/// Square intra-sentence structure, typically a self-attention matrix.
///
/// Structure matrices need not be symmetric. When `row_normalized` is set
/// every row is non-negative and sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    values: Array2<f64>,
    row_normalized: bool,
}

impl StructureMatrix {
    /// A general square matrix with finite entries.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::InvalidStructure(format!(
                "structure matrix must be square, got {r}x{c}"
            )));
        }
        if r == 0 {
            return Err(Error::InvalidStructure("empty structure matrix".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("structure matrix"));
        }
        Ok(StructureMatrix {
            values,
            row_normalized: false,
        })
    }

    /// A matrix whose rows must already be stochastic within `1e-9`.
    pub fn row_stochastic(values: Array2<f64>) -> Result<Self> {
        let mut s = StructureMatrix::new(values)?;
        for (i, row) in s.values.axis_iter(Axis(0)).enumerate() {
            if row.iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidStructure(format!(
                    "row {i} has a negative entry"
                )));
            }
            let total = row.sum();
            if (total - 1.0).abs() > MARGINAL_TOL {
                return Err(Error::InvalidStructure(format!(
                    "row {i} sums to {total}, expected 1"
                )));
            }
        }
        s.row_normalized = true;
        Ok(s)
    }

    /// Divides every row by its sum. Returns the matrix together with the
    /// largest deviation of an input row sum from one.
    pub fn renormalized(mut values: Array2<f64>) -> Result<(Self, f64)> {
        StructureMatrix::new(values.clone())?;
        let mut worst = 0.0f64;
        for (i, mut row) in values.axis_iter_mut(Axis(0)).enumerate() {
            if row.iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidStructure(format!(
                    "row {i} has a negative entry"
                )));
            }
            let total = row.sum();
            if total <= 0.0 {
                return Err(Error::InvalidStructure(format!("row {i} has zero mass")));
            }
            let dev = (total - 1.0).abs();
            worst = worst.max(dev);
            // Rows already within round-off are left untouched so that
            // repeated normalisation is idempotent.
            if dev > MASS_TOL {
                row.mapv_inplace(|v| v / total);
            }
        }
        Ok((
            StructureMatrix {
                values,
                row_normalized: true,
            },
            worst,
        ))
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_row_normalized(&self) -> bool {
        self.row_normalized
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.values
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {n}x{n} structure",
                perm.len()
            )));
        }
        let values = Array2::from_shape_fn((n, n), |(i, j)| self.values[[perm[i], perm[j]]]);
        Ok(StructureMatrix {
            values,
            row_normalized: self.row_normalized,
        })
    }
}

/// A coupling between two distributions: non-negative with prescribed marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    plan: Array2<f64>,
    row_marginal: ProbVector,
    col_marginal: ProbVector,
}

impl TransportPlan {
    /// Validates that `plan` is non-negative with row sums `u` and column
    /// sums `v` within `1e-9`.
    pub fn new(plan: Array2<f64>, u: ProbVector, v: ProbVector) -> Result<Self> {
        let (n, m) = plan.dim();
        if n != u.len() || m != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "plan is {n}x{m} but marginals have lengths {} and {}",
                u.len(),
                v.len()
            )));
        }
        if plan.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("transport plan"));
        }
        if let Some(p) = plan.iter().find(|p| **p < 0.0) {
            return Err(Error::InvalidProbVector(format!(
                "transport plan has negative entry {p}"
            )));
        }
        let rows = plan.sum_axis(Axis(1));
        let cols = plan.sum_axis(Axis(0));
        let row_err = max_abs_diff(rows.view(), u.view());
        let col_err = max_abs_diff(cols.view(), v.view());
        if row_err > MARGINAL_TOL || col_err > MARGINAL_TOL {
            return Err(Error::InvalidProbVector(format!(
                "plan marginals off by {row_err:e} (rows) and {col_err:e} (columns)"
            )));
        }
        Ok(TransportPlan {
            plan,
            row_marginal: u,
            col_marginal: v,
        })
    }

    /// The independent coupling `u vᵀ`.
    pub fn product(u: &ProbVector, v: &ProbVector) -> Self {
        let plan = outer(u.view(), v.view());
        TransportPlan {
            plan,
            row_marginal: u.clone(),
            col_marginal: v.clone(),
        }
    }

    pub(crate) fn from_parts_unchecked(
        plan: Array2<f64>,
        row_marginal: ProbVector,
        col_marginal: ProbVector,
    ) -> Self {
        TransportPlan {
            plan,
            row_marginal,
            col_marginal,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.plan.dim()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.plan.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.plan
    }

    pub fn row_marginal(&self) -> &ProbVector {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &ProbVector {
        &self.col_marginal
    }

    /// Number of entries strictly greater than zero.
    pub fn support_size(&self) -> usize {
        self.plan.iter().filter(|p| **p > 0.0).count()
    }

    /// Largest absolute violation of either marginal constraint.
    pub fn marginal_error(&self) -> f64 {
        let rows = self.plan.sum_axis(Axis(1));
        let cols = self.plan.sum_axis(Axis(0));
        max_abs_diff(rows.view(), self.row_marginal.view())
            .max(max_abs_diff(cols.view(), self.col_marginal.view()))
    }

    /// `⟨C, P⟩`, the linear transport cost of this plan.
    pub fn linear_cost(&self, cost: &CostMatrix) -> Result<f64> {
        if cost.shape() != self.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cost is {:?}, plan is {:?}",
                cost.shape(),
                self.shape()
            )));
        }
        Ok(frobenius(cost.view(), self.plan.view()))
    }

    pub fn transposed(&self) -> Self {
        TransportPlan {
            plan: self.plan.t().to_owned(),
            row_marginal: self.col_marginal.clone(),
            col_marginal: self.row_marginal.clone(),
        }
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.plan
    }
}

pub(crate) fn outer(u: ArrayView1<f64>, v: ArrayView1<f64>) -> Array2<f64> {
    Array2::from_shape_fn((u.len(), v.len()), |(i, j)| u[i] * v[j])
}

pub(crate) fn frobenius(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn max_abs_diff(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
