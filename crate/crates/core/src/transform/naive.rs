use crate::error::{Error, Result};
use crate::mindex::MultiIndexSet;
use crate::nodes::NodeSystem;

/// Largest `|A|` accepted by [`naive_solve`].
pub const NAIVE_LIMIT: usize = 100_000;

/// Newton coefficients by forward substitution with the full multivariate
/// Newton–Vandermonde matrix `V[i][j] = Π_d Π_{k<α^{(j)}_d} (ξ_{α^{(i)}_d} - ξ_k)`.
///
/// `V` is lower triangular in co-lex order because `V[i][j] = 0` unless
/// `α^{(j)} ≤ α^{(i)}` componentwise. Rows are generated on the fly, so the
/// cost is `O(|A|² m)` time and `O(|A|)` memory.
pub fn naive_solve(samples: &[f64], set: &MultiIndexSet, nodes: &NodeSystem) -> Result<Vec<f64>> {
    let len = set.len();
    if samples.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: samples.len(),
        });
    }
    if len > NAIVE_LIMIT {
        return Err(Error::TooLarge {
            size: len,
            limit: NAIVE_LIMIT,
        });
    }
    let xi = nodes.points();
    let size = set.max_degree() as usize + 1;
    if size > xi.len() {
        return Err(Error::InvalidArgument(format!(
            "set needs {size} nodes, only {} available",
            xi.len()
        )));
    }
    // prod[a][b] = Π_{k<b} (ξ_a - ξ_k), zero for b > a.
    let mut prod = vec![0.0; size * size];
    for a in 0..size {
        let mut acc = 1.0;
        for b in 0..=a {
            prod[a * size + b] = acc;
            acc *= xi[a] - xi[b];
        }
    }
    let entry = |row: &[u32], col: &[u32]| -> f64 {
        row.iter()
            .zip(col)
            .map(|(&r, &c)| prod[r as usize * size + c as usize])
            .product()
    };

    let mut c = samples.to_vec();
    for i in 0..len {
        let row = set.get(i);
        let mut acc = c[i];
        for j in 0..i {
            let col = set.get(j);
            if col.iter().zip(row).all(|(a, b)| a <= b) {
                acc -= entry(row, col) * c[j];
            }
        }
        let diag = entry(row, row);
        if diag == 0.0 {
            return Err(Error::Singular(i));
        }
        c[i] = acc / diag;
    }
    Ok(c)
}
