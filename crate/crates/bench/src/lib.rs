//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use lpfnt_core::{NewtonSpace, NodeFamily, PNorm, Result};

/// A space on `A_{m,n,p}` with Chebyshev–Lobatto nodes.
pub fn space(m: usize, n: usize, p: f64) -> Result<Arc<NewtonSpace>> {
    Ok(Arc::new(NewtonSpace::lp(m, n, PNorm::new(p)?, NodeFamily::ChebyshevLobatto)?))
}

/// Samples of a smooth non-polynomial function on the grid of `space`.
pub fn samples(space: &NewtonSpace) -> Vec<f64> {
    space.sample(|x| {
        let r: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
        (0.3 * r).cos() / (1.0 + x.iter().map(|v| v * v).sum::<f64>())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_line_up() {
        let s = space(3, 4, 2.0).unwrap();
        assert_eq!(samples(&s).len(), s.len());
    }
}
