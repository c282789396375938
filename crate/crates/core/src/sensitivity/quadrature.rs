use crate::error::{Error, Result};

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
///
/// Roots of `P_count` by Newton's method on the three-term recurrence, weights
/// `2 / ((1 - x²) P'(x)²)`.
pub fn gauss_legendre(count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    let n = count as f64;
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    for k in 0..count.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let dp = legendre_with_derivative(count, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[count - 1 - k] = x;
        nodes[k] = -x;
        weights[k] = w;
        weights[count - 1 - k] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_n'(x))`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}
