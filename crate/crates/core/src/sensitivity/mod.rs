//! Active subspaces: gradient covariance, its eigendecomposition and the
//! resulting activity scores, plus a Monte Carlo reference estimator.

mod eigen;
mod mc;
mod quadrature;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mindex::PNorm;
use crate::transform::NewtonInterpolant;

pub use eigen::{eigh, EigenDecomposition, SymmetricMatrix, MAX_SWEEPS};
pub use mc::{mc_reference, FiniteDifference, McOptions, McReference};
pub use quadrature::gauss_legendre;

/// Largest dimension accepted by [`grad_cov_quadrature`].
pub const QUADRATURE_MAX_DIM: usize = 4;

/// `C = ∫ ∇f ∇fᵀ dρ` for the uniform probability measure `ρ` on `[-1, 1]^m`.
///
/// Exact: each `∂ᵢf` lies in the same polynomial space, so `C[i][j]` is the
/// inner product of the orthonormal coefficient vectors of `∂ᵢf` and `∂ⱼf`.
pub fn grad_cov(interp: &NewtonInterpolant) -> Result<SymmetricMatrix> {
    let m = interp.space().dim();
    let coeffs: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| interp.differentiate(i).map(|d| d.to_orthonormal()))
        .collect::<Result<_>>()?;
    let mut c = SymmetricMatrix::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            let v = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a * b).sum();
            c.set(i, j, v);
        }
    }
    Ok(c)
}

/// [`grad_cov`] by tensor Gauss–Legendre quadrature, for validation.
pub fn grad_cov_quadrature(interp: &NewtonInterpolant, points_per_dim: usize) -> Result<SymmetricMatrix> {
    let m = interp.space().dim();
    if m > QUADRATURE_MAX_DIM {
        return Err(Error::TooLarge {
            size: m,
            limit: QUADRATURE_MAX_DIM,
        });
    }
    let (x, w) = gauss_legendre(points_per_dim)?;
    let derivs: Vec<NewtonInterpolant> = (0..m).map(|i| interp.differentiate(i)).collect::<Result<_>>()?;
    let mut evals: Vec<_> = derivs.iter().map(|d| d.evaluator()).collect();
    let scale = 0.5f64.powi(m as i32);
    let total = points_per_dim.pow(m as u32);
    let mut acc = vec![0.0; m * m];
    let mut point = vec![0.0; m];
    let mut grad = vec![0.0; m];
    for flat in 0..total {
        let mut rest = flat;
        let mut weight = scale;
        for d in 0..m {
            let k = rest % points_per_dim;
            rest /= points_per_dim;
            point[d] = x[k];
            weight *= w[k];
        }
        for (g, ev) in grad.iter_mut().zip(evals.iter_mut()) {
            *g = ev.evaluate(&point)?;
        }
        for i in 0..m {
            for j in 0..=i {
                acc[i * m + j] += weight * grad[i] * grad[j];
            }
        }
    }
    let mut c = SymmetricMatrix::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            c.set(i, j, acc[i * m + j]);
        }
    }
    Ok(c)
}

/// `θᵢ = Σ_{j≤k} λⱼ [wⱼ]ᵢ²` with a descending ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityScores {
    pub k: usize,
    pub theta: Vec<f64>,
    /// 0-based input indices by descending `θ`, ties broken by index.
    pub ranking: Vec<usize>,
}

pub fn activity_scores(eig: &EigenDecomposition, k: usize) -> Result<ActivityScores> {
    let m = eig.eigenvalues.len();
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={m}")));
    }
    let theta: Vec<f64> = (0..m)
        .map(|i| {
            (0..k)
                .map(|j| eig.eigenvalues[j] * eig.eigenvectors[j][i] * eig.eigenvectors[j][i])
                .sum::<f64>()
        })
        .collect();
    Ok(ActivityScores {
        k,
        ranking: rank_descending(&theta),
        theta,
    })
}

pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// How the active dimension `k` is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KStrategy {
    /// Largest ratio `λⱼ / λⱼ₊₁`; `k = m` when the spectrum has no gap.
    #[default]
    Gap,
    All,
    Fixed(usize),
}

impl fmt::Display for KStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KStrategy::Gap => f.write_str("gap"),
            KStrategy::All => f.write_str("all"),
            KStrategy::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for KStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gap" => Ok(KStrategy::Gap),
            "all" => Ok(KStrategy::All),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|k| k.parse().ok())
                .map(KStrategy::Fixed)
                .ok_or_else(|| Error::Parse(format!("invalid k strategy `{s}`, expected gap|all|fixed:K"))),
        }
    }
}

/// Relative margin under which consecutive eigenvalues count as equal.
const GAP_TIE: f64 = 1e-12;

pub fn choose_k(eigenvalues: &[f64], strategy: KStrategy) -> Result<usize> {
    let m = eigenvalues.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    match strategy {
        KStrategy::All => Ok(m),
        KStrategy::Fixed(k) if (1..=m).contains(&k) => Ok(k),
        KStrategy::Fixed(k) => Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={m}"))),
        KStrategy::Gap => {
            let mut best = (m, 1.0 + GAP_TIE);
            for j in 0..m - 1 {
                let (a, b) = (eigenvalues[j].max(0.0), eigenvalues[j + 1].max(0.0));
                let ratio = match (a > 0.0, b > 0.0) {
                    (_, true) => a / b,
                    (true, false) => f64::INFINITY,
                    (false, false) => 1.0,
                };
                if ratio > best.1 {
                    best = (j + 1, ratio);
                }
            }
            Ok(best.0)
        }
    }
}

/// The full polynomial pipeline result for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub model: String,
    pub m: usize,
    pub n: usize,
    #[serde(serialize_with = "serialize_p")]
    pub p: PNorm,
    pub cardinality: usize,
    pub k: usize,
    pub theta: Vec<f64>,
    /// Scores with `k = m`, i.e. the diagonal of `C`.
    pub theta_all: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// 1-based input labels by descending `θ`.
    pub ranking: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McReference>,
}

fn serialize_p<S: Serializer>(p: &PNorm, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(p.value())
    }
}

/// Covariance, eigendecomposition and scores of one interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub covariance: SymmetricMatrix,
    pub eigen: EigenDecomposition,
    pub scores: ActivityScores,
    pub scores_all: ActivityScores,
}

pub fn analyze(interp: &NewtonInterpolant, strategy: KStrategy) -> Result<Analysis> {
    let covariance = grad_cov(interp)?;
    let eigen = eigh(&covariance)?;
    let k = choose_k(&eigen.eigenvalues, strategy)?;
    let scores = activity_scores(&eigen, k)?;
    let scores_all = activity_scores(&eigen, covariance.dim())?;
    Ok(Analysis {
        covariance,
        eigen,
        scores,
        scores_all,
    })
}

impl SensitivityReport {
    pub fn new(model: &str, interp: &NewtonInterpolant, n: usize, p: PNorm, analysis: &Analysis) -> Self {
        SensitivityReport {
            model: model.to_string(),
            m: interp.space().dim(),
            n,
            p,
            cardinality: interp.space().len(),
            k: analysis.scores.k,
            theta: analysis.scores.theta.clone(),
            theta_all: analysis.scores_all.theta.clone(),
            eigenvalues: analysis.eigen.eigenvalues.clone(),
            ranking: analysis.scores.ranking.iter().map(|i| i + 1).collect(),
            mc: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::NodeFamily;
    use crate::transform::{fnt_forward, NewtonSpace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn space(m: usize, n: usize, p: f64) -> Arc<NewtonSpace> {
        Arc::new(NewtonSpace::lp(m, n, PNorm::new(p).unwrap(), NodeFamily::ChebyshevLobatto).unwrap())
    }

    fn random_interp(s: &Arc<NewtonSpace>, seed: u64) -> NewtonInterpolant {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = (0..s.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        NewtonInterpolant::new(Arc::clone(s), c).unwrap()
    }

    #[test]
    fn analytic_covariances() {
        let s = space(2, 3, 1.0);
        let f = fnt_forward(&s, &s.sample(|x| x[0])).unwrap();
        let c = grad_cov(&f).unwrap();
        for (got, want) in c.as_slice().iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-13);
        }
        let q = grad_cov_quadrature(&f, 4).unwrap();
        assert!((q.get(0, 0) - 1.0).abs() < 1e-13 && q.get(1, 1).abs() < 1e-13);
        let k = fnt_forward(&s, &vec![2.0; s.len()]).unwrap();
        assert!(grad_cov(&k).unwrap().as_slice().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn covariance_matches_quadrature() {
        let s = space(3, 4, 2.0);
        let f = random_interp(&s, 3);
        let c = grad_cov(&f).unwrap();
        let q5 = grad_cov_quadrature(&f, 5).unwrap();
        let q7 = grad_cov_quadrature(&f, 7).unwrap();
        for ((a, b), c7) in c.as_slice().iter().zip(q5.as_slice()).zip(q7.as_slice()) {
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
            assert!((b - c7).abs() < 1e-12 * b.abs().max(1.0));
        }
        let e = eigh(&c).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l >= -1e-10 * c.trace()));
        assert!(grad_cov_quadrature(&random_interp(&space(5, 2, 1.0), 1), 3).is_err());
    }

    #[test]
    fn scores() {
        let e = eigh(&SymmetricMatrix::from_rows(2, vec![3.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(activity_scores(&e, 1).unwrap().theta, vec![3.0, 0.0]);
        assert!(activity_scores(&e, 0).is_err() && activity_scores(&e, 3).is_err());

        let f = random_interp(&space(4, 3, 2.0), 4);
        let c = grad_cov(&f).unwrap();
        let all = activity_scores(&eigh(&c).unwrap(), 4).unwrap();
        for (t, d) in all.theta.iter().zip(c.diagonal()) {
            assert!((t - d).abs() < 1e-10 * d.abs().max(1.0));
        }
        // Scaling f by 10 scales θ by 100 and keeps the ranking.
        let scaled = NewtonInterpolant::new(Arc::clone(f.space()), f.coeffs().iter().map(|c| 10.0 * c).collect()).unwrap();
        let s10 = activity_scores(&eigh(&grad_cov(&scaled).unwrap()).unwrap(), 2).unwrap();
        let s1 = activity_scores(&eigh(&c).unwrap(), 2).unwrap();
        assert_eq!(s10.ranking, s1.ranking);
        for (a, b) in s10.theta.iter().zip(&s1.theta) {
            assert!((a - 100.0 * b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn gap_heuristic() {
        assert_eq!(choose_k(&[10.0, 9.0, 1e-6], KStrategy::Gap).unwrap(), 2);
        assert_eq!(choose_k(&[10.0, 9.0, 1e-6], KStrategy::Fixed(3)).unwrap(), 3);
        assert_eq!(choose_k(&[2.0, 2.0, 2.0], KStrategy::Gap).unwrap(), 3);
        assert_eq!(choose_k(&[2.0, 0.0, 0.0], KStrategy::Gap).unwrap(), 1);
        assert_eq!(choose_k(&[2.0, 1.0], KStrategy::All).unwrap(), 2);
        assert!(choose_k(&[2.0, 1.0], KStrategy::Fixed(3)).is_err());
        assert_eq!("fixed:4".parse::<KStrategy>().unwrap(), KStrategy::Fixed(4));
        assert!("fixed:x".parse::<KStrategy>().is_err());
        assert_eq!(KStrategy::Fixed(2).to_string(), "fixed:2");
    }

    #[test]
    fn report_json() {
        let s = space(2, 2, f64::INFINITY);
        let f = fnt_forward(&s, &s.sample(|x| x[0] + 2.0 * x[1])).unwrap();
        let a = analyze(&f, KStrategy::Gap).unwrap();
        let r = SensitivityReport::new("poly", &f, 2, PNorm::INFINITY, &a);
        assert_eq!(r.ranking, vec![2, 1]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["p"], "inf");
        assert_eq!(json["k"], 1);
        assert!(json.get("mc").is_none());
    }
}
