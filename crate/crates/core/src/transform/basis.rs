//! Univariate Newton basis, its differentiation matrix and the change of basis
//! to Legendre polynomials orthonormal under the uniform probability measure.

use crate::error::Result;
use crate::nodes::{triangular_solve, NewtonVandermonde};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(size: usize) -> Self {
        SquareMatrix {
            size,
            entries: vec![0.0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.size + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// `N_0(x), …, N_{len-1}(x)` with `N_k(x) = Π_{j<k} (x - ξ_j)`.
pub fn newton_basis(xi: &[f64], x: f64, out: &mut [f64]) {
    let mut prod = 1.0;
    for (k, o) in out.iter_mut().enumerate() {
        *o = prod;
        if k < xi.len() {
            prod *= x - xi[k];
        }
    }
}

/// `N_k'(x)` for `k < out.len()`, by the product rule on the running products.
pub fn newton_basis_derivative(xi: &[f64], x: f64, out: &mut [f64]) {
    let (mut value, mut slope) = (1.0, 0.0);
    for (k, o) in out.iter_mut().enumerate() {
        *o = slope;
        if k < xi.len() {
            slope = slope * (x - xi[k]) + value;
            value *= x - xi[k];
        }
    }
}

/// `φ_0(x), …, φ_{len-1}(x)`, `φ_k = √(2k+1) P_k`.
pub fn orthonormal_legendre(x: f64, out: &mut [f64]) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for (k, o) in out.iter_mut().enumerate() {
        *o = cur * (2.0 * k as f64 + 1.0).sqrt();
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
}

/// Newton differentiation matrix: column `j` holds the Newton coefficients of
/// `N_j'`, obtained as divided differences of `N_j'` on `ξ_0, …, ξ_{j-1}`.
/// Strictly upper triangular.
pub fn differentiation_matrix(xi: &[f64], l: &NewtonVandermonde) -> Result<SquareMatrix> {
    let size = xi.len();
    let mut d = SquareMatrix::zeros(size);
    let mut deriv = vec![0.0; size];
    for j in 1..size {
        let rhs: Vec<f64> = xi[..j]
            .iter()
            .map(|&x| {
                newton_basis_derivative(xi, x, &mut deriv[..=j]);
                deriv[j]
            })
            .collect();
        for (i, c) in triangular_solve(l, &rhs, j)?.into_iter().enumerate() {
            d.set(i, j, c);
        }
    }
    Ok(d)
}

/// Newton to orthonormal Legendre coefficients: `N_j = Σ_{i≤j} M[i][j] φ_i`.
///
/// Built from `N_{j+1} = (x - ξ_j) N_j` and the three-term relation
/// `x φ_i = β_{i+1} φ_{i+1} + β_i φ_{i-1}`, `β_i = i / √(4i² - 1)`.
pub fn legendre_change_of_basis(xi: &[f64]) -> SquareMatrix {
    let size = xi.len();
    let beta = |i: usize| {
        let f = i as f64;
        f / (4.0 * f * f - 1.0).sqrt()
    };
    let mut m = SquareMatrix::zeros(size);
    if size == 0 {
        return m;
    }
    let mut col = vec![0.0; size];
    col[0] = 1.0;
    m.set(0, 0, 1.0);
    for j in 0..size - 1 {
        let mut next = vec![0.0; size];
        for i in 0..=j {
            let c = col[i];
            next[i + 1] += beta(i + 1) * c;
            if i > 0 {
                next[i - 1] += beta(i) * c;
            }
            next[i] -= xi[j] * c;
        }
        for (i, &v) in next.iter().enumerate().take(j + 2) {
            m.set(i, j + 1, v);
        }
        col = next;
    }
    m
}
