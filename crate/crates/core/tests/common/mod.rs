#![allow(dead_code)]

//! Random instance generators and brute-force oracles shared by the
//! integration tests. Nothing here calls into the solver code paths.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() * scale)
}

pub fn random_stochastic(rng: &mut impl Rng, n: usize) -> Array2<f64> {
    let mut m = random_matrix(rng, n, n, 1.0);
    for mut row in m.rows_mut() {
        let s = row.sum();
        row.mapv_inplace(|x| x / s);
    }
    m
}

pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `(1/n) · min_σ Σ_i C[i, σ(i)]` for a square cost.
pub fn birkhoff_min(cost: &Array2<f64>) -> f64 {
    let n = cost.nrows();
    permutations(n)
        .iter()
        .map(|p| (0..n).map(|i| cost[[i, p[i]]]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        / n as f64
}

/// Linear transport value from a generic LP solver.
pub fn lp_oracle(cost: &Array2<f64>, u: &[f64], v: &[f64]) -> f64 {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let (n, m) = cost.dim();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| problem.add_var(cost[[i, j]], (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (row, &ui) in vars.iter().zip(u) {
        let mut e = LinearExpr::empty();
        for &x in row {
            e.add(x, 1.0);
        }
        problem.add_constraint(e, ComparisonOp::Eq, ui);
    }
    // The last column constraint is implied by the others.
    for j in 0..m - 1 {
        let mut e = LinearExpr::empty();
        for row in &vars {
            e.add(row[j], 1.0);
        }
        problem.add_constraint(e, ComparisonOp::Eq, v[j]);
    }
    problem.solve().expect("LP oracle failed").objective()
}

/// `Σ_{i,i',j,j'} (A_ii' - B_jj')² P_ij P_i'j'` by direct enumeration.
pub fn gw_quadruple(a: &Array2<f64>, b: &Array2<f64>, p: &Array2<f64>) -> f64 {
    let (n, m) = p.dim();
    let mut total = 0.0;
    for i in 0..n {
        for i2 in 0..n {
            for j in 0..m {
                for j2 in 0..m {
                    let d = a[[i, i2]] - b[[j, j2]];
                    total += d * d * p[[i, j]] * p[[i2, j2]];
                }
            }
        }
    }
    total
}

pub fn linear_loop(c: &Array2<f64>, p: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for ((i, j), x) in p.indexed_iter() {
        total += c[[i, j]] * x;
    }
    total
}

/// A random feasible plan: a convex mix of the product coupling and a
/// north-west-corner vertex.
pub fn random_feasible_plan(rng: &mut impl Rng, u: &[f64], v: &[f64]) -> Array2<f64> {
    let (n, m) = (u.len(), v.len());
    let mut nw = Array2::zeros((n, m));
    let (mut r, mut c) = (u.to_vec(), v.to_vec());
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        let x = r[i].min(c[j]);
        nw[[i, j]] = x;
        r[i] -= x;
        c[j] -= x;
        if r[i] <= c[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let t: f64 = rng.random();
    Array2::from_shape_fn((n, m), |(i, j)| t * u[i] * v[j] + (1.0 - t) * nw[[i, j]])
}
