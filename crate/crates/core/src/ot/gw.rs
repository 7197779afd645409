//! Squared-loss Gromov-Wasserstein objective between two structure matrices.
//!
//! With `L(a, b) = (a - b)²` the quadruple sum
//! `Σ (A_ii' - B_jj')² P_ij P_i'j'` separates into a term that depends only
//! on the marginals of `P` and a cross term `-2 ⟨P, A P Bᵀ⟩`, giving an
//! `O(n²m + nm²)` evaluation instead of `O(n²m²)`.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::types::{frobenius, StructureMatrix, TransportPlan};
use crate::error::{Error, Result};

/// GW objective of `plan` between structures `a` (n×n) and `b` (m×m).
pub fn gw_objective(a: &StructureMatrix, b: &StructureMatrix, plan: &TransportPlan) -> Result<f64> {
    check_dims(a.view(), b.view(), plan.view())?;
    Ok(objective_unchecked(a.view(), b.view(), plan.view()))
}

/// Gradient of [`gw_objective`] with respect to the plan entries.
pub fn gw_gradient(
    a: &StructureMatrix,
    b: &StructureMatrix,
    plan: &TransportPlan,
) -> Result<Array2<f64>> {
    check_dims(a.view(), b.view(), plan.view())?;
    Ok(gradient_unchecked(a.view(), b.view(), plan.view()))
}

/// The GW objective evaluated on an arbitrary non-negative matrix `p`. The
/// marginal term uses the actual row and column sums of `p`, so this is the
/// quadruple sum itself for any `p`, feasible or not.
pub fn gw_objective_raw(a: ArrayView2<f64>, b: ArrayView2<f64>, p: ArrayView2<f64>) -> Result<f64> {
    check_dims(a, b, p)?;
    Ok(objective_unchecked(a, b, p))
}

/// Gradient of [`gw_objective_raw`] at `p`.
pub fn gw_gradient_raw(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    p: ArrayView2<f64>,
) -> Result<Array2<f64>> {
    check_dims(a, b, p)?;
    Ok(gradient_unchecked(a, b, p))
}

fn check_dims(a: ArrayView2<f64>, b: ArrayView2<f64>, p: ArrayView2<f64>) -> Result<()> {
    let (n, m) = p.dim();
    if a.dim() != (n, n) || b.dim() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "structures {:?} and {:?} do not fit a {n}x{m} plan",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

pub(crate) fn objective_unchecked(a: ArrayView2<f64>, b: ArrayView2<f64>, p: ArrayView2<f64>) -> f64 {
    let u = p.sum_axis(Axis(1));
    let v = p.sum_axis(Axis(0));
    marginal_constant(a, b, &u, &v) - 2.0 * frobenius(p, cross(a, b, p).view())
}

/// `A P Bᵀ`.
pub(crate) fn cross(a: ArrayView2<f64>, b: ArrayView2<f64>, p: ArrayView2<f64>) -> Array2<f64> {
    a.dot(&p).dot(&b.t())
}

/// `Σ A_ii'² u_i u_i' + Σ B_jj'² v_j v_j'`.
pub(crate) fn marginal_constant(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    u: &Array1<f64>,
    v: &Array1<f64>,
) -> f64 {
    let a2 = a.mapv(|x| x * x);
    let b2 = b.mapv(|x| x * x);
    u.dot(&a2.dot(u)) + v.dot(&b2.dot(v))
}

pub(crate) fn gradient_unchecked(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    p: ArrayView2<f64>,
) -> Array2<f64> {
    if is_symmetric(a) && is_symmetric(b) {
        gradient_symmetric(a, b, p)
    } else {
        gradient_general(a, b, p)
    }
}

pub(crate) fn gradient_general(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    p: ArrayView2<f64>,
) -> Array2<f64> {
    let u = p.sum_axis(Axis(1));
    let v = p.sum_axis(Axis(0));
    let a2 = a.mapv(|x| x * x);
    let b2 = b.mapv(|x| x * x);
    let row_term = a2.dot(&u) + a2.t().dot(&u);
    let col_term = b2.dot(&v) + b2.t().dot(&v);
    let mixed = cross(a, b, p) + a.t().dot(&p).dot(&b);
    Array2::from_shape_fn(p.dim(), |(i, j)| {
        row_term[i] + col_term[j] - 2.0 * mixed[[i, j]]
    })
}

/// Specialisation for symmetric `A` and `B`, where both halves coincide.
pub(crate) fn gradient_symmetric(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    p: ArrayView2<f64>,
) -> Array2<f64> {
    let u = p.sum_axis(Axis(1));
    let v = p.sum_axis(Axis(0));
    let row_term = a.mapv(|x| x * x).dot(&u);
    let col_term = b.mapv(|x| x * x).dot(&v);
    let apb = cross(a, b, p);
    Array2::from_shape_fn(p.dim(), |(i, j)| {
        2.0 * (row_term[i] + col_term[j] - 2.0 * apb[[i, j]])
    })
}

fn is_symmetric(a: ArrayView2<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| a[[i, j]] == a[[j, i]]))
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;
    use crate::ot::types::{uniform_weights, ProbVector};

    #[test]
    fn constant_structures_give_zero() {
        let a = StructureMatrix::new(Array2::from_elem((3, 3), 0.3)).unwrap();
        let b = StructureMatrix::new(Array2::from_elem((2, 2), 0.3)).unwrap();
        let u = ProbVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let v = uniform_weights(2).unwrap();
        let plan = TransportPlan::product(&u, &v);
        assert!(gw_objective(&a, &b, &plan).unwrap().abs() < 1e-15);
    }

    #[test]
    fn matched_swaps_give_zero() {
        let a = StructureMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let u = uniform_weights(2).unwrap();
        let plan = TransportPlan::new(array![[0.5, 0.0], [0.0, 0.5]], u.clone(), u).unwrap();
        assert_eq!(gw_objective(&a, &a, &plan).unwrap(), 0.0);
    }

    #[test]
    fn constant_structures_have_constant_gradient() {
        let a = StructureMatrix::new(Array2::from_elem((3, 3), 0.7)).unwrap();
        let b = StructureMatrix::new(Array2::from_elem((4, 4), 0.7)).unwrap();
        let plan = TransportPlan::product(&uniform_weights(3).unwrap(), &uniform_weights(4).unwrap());
        let g = gw_gradient(&a, &b, &plan).unwrap();
        let first = g[[0, 0]];
        assert!(g.iter().all(|x| (x - first).abs() < 1e-14));
    }

    #[test]
    fn symmetric_path_agrees_with_general_path() {
        let a = array![[0.2, 0.5, 0.1], [0.5, 0.9, 0.3], [0.1, 0.3, 0.4]];
        let b = array![[1.0, 0.25], [0.25, 0.0]];
        let p = array![[0.1, 0.2], [0.3, 0.05], [0.15, 0.2]];
        let sym = gradient_symmetric(a.view(), b.view(), p.view());
        let gen = gradient_general(a.view(), b.view(), p.view());
        for (x, y) in sym.iter().zip(gen.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn mismatched_dims_rejected() {
        let a = StructureMatrix::new(Array2::eye(2)).unwrap();
        let b = StructureMatrix::new(Array2::eye(3)).unwrap();
        let plan = TransportPlan::product(&uniform_weights(2).unwrap(), &uniform_weights(2).unwrap());
        assert!(gw_objective(&a, &b, &plan).is_err());
        assert!(gw_gradient(&a, &b, &plan).is_err());
    }
}
