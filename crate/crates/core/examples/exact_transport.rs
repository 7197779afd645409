//! Exact optimal transport between two small discrete distributions.

use ndarray::array;
use wsmd::ot::{solve_exact_ot, CostMatrix, ProbVector};

fn main() -> wsmd::Result<()> {
    // Three suppliers, four consumers.
    let cost = CostMatrix::new(array![
        [4.0, 1.0, 3.0, 6.0],
        [2.0, 5.0, 2.0, 1.0],
        [3.0, 3.0, 1.0, 2.0],
    ])?;
    let supply = ProbVector::new(array![0.5, 0.3, 0.2])?;
    let demand = ProbVector::normalized(array![1.0, 2.0, 1.0, 1.0])?;

    let solution = solve_exact_ot(&cost, &supply, &demand)?;
    println!("optimal cost: {}", solution.cost);
    println!("pivots:       {}", solution.pivots);
    println!("plan:\n{:.3}", solution.plan.as_array());
    println!(
        "{} positive cells (a vertex has at most n + m - 1 = 6)",
        solution.plan.support_size()
    );
    println!("marginal error: {:e}", solution.plan.marginal_error());
    Ok(())
}
