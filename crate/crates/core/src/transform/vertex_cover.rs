use std::sync::Arc;

use num_bigint::BigInt;

use crate::catalog;
use crate::error::{Error, Result};
use crate::formula::{Formula, WeightRange};
use crate::io::Graph;

/// Max 2-SAT instance with `∃x Φ(x) ≥ t` iff `G` has a vertex cover of size
/// at most `k`: `¬x_v ∨ ¬x_v` with weight 1 per vertex, `x_u ∨ x_v` with
/// weight `2n` per edge, and `t = 2n·|E| + n − k`.
pub fn vc_reduce(graph: &Graph, k: usize) -> Result<Formula> {
    let n = graph.n;
    if k > n {
        return Err(Error::Precondition(format!("cover size {k} outside 0..={n}")));
    }
    let sat = catalog::d_sat(2);
    let or2 = sat.find_function(&catalog::or(2)).cloned().unwrap_or_else(|| Arc::new(catalog::or(2)));
    let nand = catalog::resolve("OR2[~x1,~x2]", &[])?;
    let nand = sat.find_function(&nand).cloned().unwrap_or(nand);
    let mut phi = Formula::new(n, WeightRange::N);
    for v in 0..n {
        phi.add(nand.clone(), vec![v, v], 1)?;
    }
    let heavy = BigInt::from(2 * n);
    for &(u, v) in &graph.edges {
        if u == v || u >= n || v >= n {
            return Err(Error::Precondition(format!("edge ({}, {}) is not a simple edge", u + 1, v + 1)));
        }
        phi.add(or2.clone(), vec![u, v], heavy.clone())?;
    }
    phi.threshold = &heavy * BigInt::from(graph.edges.len()) + BigInt::from(n - k);
    Ok(phi)
}
