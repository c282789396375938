use serde::Serialize;

use crate::error::{Error, Result};

/// Sweep limit of the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Real symmetric `m × m` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricMatrix {
    m: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(m: usize) -> Self {
        SymmetricMatrix {
            m,
            data: vec![0.0; m * m],
        }
    }

    /// Accepts row-major data, symmetrizing `(A + Aᵀ) / 2`.
    pub fn from_rows(m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::LengthMismatch {
                expected: m * m,
                actual: data.len(),
            });
        }
        let mut s = SymmetricMatrix { m, data };
        for i in 0..m {
            for j in i + 1..m {
                let v = 0.5 * (s.get(i, j) + s.get(j, i));
                s.set(i, j, v);
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.m + j] = v;
        self.data[j * self.m + i] = v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymmetricMatrix {
            m: self.m,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

/// `C = W Λ Wᵀ` with eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `j` of `W`, i.e. `eigenvectors[j][i] = [w_j]_i`.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// `1e-14 ‖C‖`.
///
/// Eigenvectors are normalized so that their largest-magnitude component
/// (first on ties) is positive.
pub fn eigh(c: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let m = c.dim();
    let mut a = c.data.clone();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let norm = c.frobenius();
    let target = 1e-14 * norm;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s += a[i * m + j] * a[i * m + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * m + p], a[q * m + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let (akp, akq) = (a[k * m + p], a[k * m + q]);
                    a[k * m + p] = cs * akp - sn * akq;
                    a[k * m + q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p * m + k], a[q * m + k]);
                    a[p * m + k] = cs * apk - sn * aqk;
                    a[q * m + k] = sn * apk + cs * aqk;
                }
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
                for k in 0..m {
                    let (vkp, vkq) = (v[k * m + p], v[k * m + q]);
                    v[k * m + p] = cs * vkp - sn * vkq;
                    v[k * m + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[j * m + j].total_cmp(&a[i * m + i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&j| a[j * m + j]).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| {
            let mut w: Vec<f64> = (0..m).map(|i| v[i * m + j]).collect();
            let lead = (0..m).fold(0, |b, i| if w[i].abs() > w[b].abs() { i } else { b });
            if w[lead] < 0.0 {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            w
        })
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two() {
        let e = eigh(&SymmetricMatrix::from_rows(2, vec![3.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(e.eigenvectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let e = eigh(&SymmetricMatrix::from_rows(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap()).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14 && (e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let r = 0.5f64.sqrt();
        assert!((e.eigenvectors[0][0] - r).abs() < 1e-14 && (e.eigenvectors[0][1] - r).abs() < 1e-14);
    }

    fn random_spd(m: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        let b: Vec<f64> = (0..m * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut c = SymmetricMatrix::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let v = (0..m).map(|k| b[i * m + k] * b[j * m + k]).sum();
                c.set(i, j, v);
            }
        }
        c
    }

    #[test]
    fn residuals_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in [1usize, 3, 6, 9] {
            let c = random_spd(m, &mut rng);
            let e = eigh(&c).unwrap();
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            for (lam, w) in e.eigenvalues.iter().zip(&e.eigenvectors) {
                for i in 0..m {
                    let cw: f64 = (0..m).map(|k| c.get(i, k) * w[k]).sum();
                    assert!((cw - lam * w[i]).abs() <= 1e-9 * c.frobenius());
                }
            }
            for a in 0..m {
                for b in 0..m {
                    let d: f64 = (0..m).map(|i| e.eigenvectors[a][i] * e.eigenvectors[b][i]).sum();
                    assert!((d - if a == b { 1.0 } else { 0.0 }).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn similarity_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = 5;
        let c = random_spd(m, &mut rng);
        // Orthogonal Q from the eigenvectors of another random matrix.
        let q = eigh(&random_spd(m, &mut rng)).unwrap().eigenvectors;
        let mut rotated = SymmetricMatrix::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        s += q[i][a] * c.get(a, b) * q[j][b];
                    }
                }
                rotated.set(i, j, s);
            }
        }
        let e1 = eigh(&c).unwrap().eigenvalues;
        let e2 = eigh(&rotated).unwrap().eigenvalues;
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
