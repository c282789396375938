//! Univariate interpolation nodes, the non-tensorial grid and the triangular
//! Newton–Vandermonde system.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mindex::MultiIndexSet;

/// Relative slack under which two Leja products count as a tie.
const LEJA_TIE: f64 = 1e-12;

/// Candidate mesh size used to extract discrete Leja points.
const LEJA_MESH: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeFamily {
    /// Leja-ordered Chebyshev–Lobatto points.
    #[default]
    ChebyshevLobatto,
    /// Greedy discrete Leja points on a Chebyshev mesh.
    Leja,
    Custom,
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeFamily::ChebyshevLobatto => "chebyshev_lobatto",
            NodeFamily::Leja => "leja",
            NodeFamily::Custom => "custom",
        })
    }
}

impl FromStr for NodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev_lobatto" | "cl" | "chebyshev" => Ok(NodeFamily::ChebyshevLobatto),
            "leja" => Ok(NodeFamily::Leja),
            other => Err(Error::Parse(format!("unknown node family `{other}`"))),
        }
    }
}

/// Leja-ordered, pairwise distinct nodes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSystem {
    points: Vec<f64>,
    family: NodeFamily,
}

impl NodeSystem {
    /// `n + 1` nodes of the given family.
    pub fn new(family: NodeFamily, n: usize) -> Result<Self> {
        match family {
            NodeFamily::ChebyshevLobatto => {
                let mut sys = leja_order(&chebyshev_lobatto(n))?;
                sys.family = NodeFamily::ChebyshevLobatto;
                Ok(sys)
            }
            NodeFamily::Leja => Ok(NodeSystem {
                points: discrete_leja(n + 1),
                family: NodeFamily::Leja,
            }),
            NodeFamily::Custom => Err(Error::InvalidArgument(
                "custom nodes must be supplied through leja_order".into(),
            )),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }
}

/// Chebyshev–Lobatto points `cos(kπ/n)`, `k = 0..=n`.
///
/// Evaluated as `sin(π(n-2k)/(2n))` so that mirrored points are exact negatives.
pub fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    let nf = n as f64;
    (0..=n)
        .map(|k| (std::f64::consts::PI * (nf - 2.0 * k as f64) / (2.0 * nf)).sin())
        .collect()
}

/// Greedy Leja reordering.
///
/// Starts at the point of largest modulus and then repeatedly picks the
/// remaining point maximizing the product of distances to the points chosen
/// so far. Ties go to the larger value, then to the smaller original index.
pub fn leja_order(points: &[f64]) -> Result<NodeSystem> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no nodes given".into()));
    }
    if points.iter().any(|x| !x.is_finite() || x.abs() > 1.0) {
        return Err(Error::InvalidArgument("nodes must be finite and lie in [-1, 1]".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("nodes must be pairwise distinct".into()));
    }

    Ok(NodeSystem {
        points: greedy_leja(points, points.len()),
        family: NodeFamily::Custom,
    })
}

/// The first `count` points of the greedy Leja sequence over `points`.
fn greedy_leja(points: &[f64], count: usize) -> Vec<f64> {
    let mut remaining: Vec<(usize, f64)> = points.iter().copied().enumerate().collect();
    let mut chosen = Vec::with_capacity(count);
    // Running products Π_{j<k} |x - ξ_j| for each remaining candidate.
    let mut products: Vec<f64> = remaining.iter().map(|&(_, x)| x.abs()).collect();
    let mut first = true;
    while chosen.len() < count {
        let mut best = 0usize;
        for c in 1..remaining.len() {
            let (pc, pb) = (products[c], products[best]);
            let tie = (pc - pb).abs() <= LEJA_TIE * pc.abs().max(pb.abs());
            let better = if tie {
                let (xc, xb) = (remaining[c].1, remaining[best].1);
                xc > xb || (xc == xb && remaining[c].0 < remaining[best].0)
            } else {
                pc > pb
            };
            if better {
                best = c;
            }
        }
        let (_, x) = remaining.swap_remove(best);
        products.swap_remove(best);
        if first {
            // The start point is chosen by modulus only; distances start now.
            products.iter_mut().for_each(|p| *p = 1.0);
            first = false;
        }
        for (p, &(_, y)) in products.iter_mut().zip(&remaining) {
            *p *= (y - x).abs();
        }
        chosen.push(x);
    }
    chosen
}

fn discrete_leja(count: usize) -> Vec<f64> {
    greedy_leja(&chebyshev_lobatto(LEJA_MESH.max(count)), count)
}

/// Lower triangular `L[i][j] = Π_{k<j} (ξᵢ - ξ_k)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonVandermonde {
    size: usize,
    entries: Vec<f64>,
}

impl NewtonVandermonde {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Row-major entries, zero above the diagonal.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Row `i` restricted to its lower triangle `0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..i * self.size + i + 1]
    }

    /// `L[0:t, 0:t] x` for `t = x.len()`.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| self.row(i).iter().zip(x).map(|(l, v)| l * v).sum())
            .collect()
    }
}

pub fn newton_vandermonde(nodes: &NodeSystem) -> NewtonVandermonde {
    let xi = nodes.points();
    let size = xi.len();
    let mut entries = vec![0.0; size * size];
    for i in 0..size {
        let mut prod = 1.0;
        for j in 0..=i {
            entries[i * size + j] = prod;
            prod *= xi[i] - xi[j];
        }
    }
    NewtonVandermonde { size, entries }
}

/// Solves `L[0:t, 0:t] c = rhs` in place by forward substitution.
pub fn forward_substitute(l: &NewtonVandermonde, x: &mut [f64]) -> Result<()> {
    let t = x.len();
    if t > l.size() {
        return Err(Error::LengthMismatch {
            expected: l.size(),
            actual: t,
        });
    }
    for i in 0..t {
        let row = l.row(i);
        let mut acc = x[i];
        for j in 0..i {
            acc -= row[j] * x[j];
        }
        let diag = row[i];
        if diag.abs() < f64::MIN_POSITIVE {
            return Err(Error::Singular(i));
        }
        x[i] = acc / diag;
    }
    Ok(())
}

/// Univariate divided differences: `c` with `L[0:t, 0:t] c = rhs`.
pub fn triangular_solve(l: &NewtonVandermonde, rhs: &[f64], truncate_to: usize) -> Result<Vec<f64>> {
    if rhs.len() != truncate_to {
        return Err(Error::LengthMismatch {
            expected: truncate_to,
            actual: rhs.len(),
        });
    }
    let mut x = rhs.to_vec();
    forward_substitute(l, &mut x)?;
    Ok(x)
}

/// The non-tensorial grid `G = {(ξ_{α₁}, …, ξ_{α_m}) : α ∈ A}`, flat with
/// stride `m`, aligned with the co-lex order of `A`.
pub fn build_grid(set: &MultiIndexSet, nodes: &NodeSystem) -> Result<Vec<f64>> {
    let degree = set.max_degree() as usize;
    if degree >= nodes.count() {
        return Err(Error::InvalidArgument(format!(
            "set needs {} nodes, only {} available",
            degree + 1,
            nodes.count()
        )));
    }
    let xi = nodes.points();
    Ok(set.as_flat().iter().map(|&a| xi[a as usize]).collect())
}
