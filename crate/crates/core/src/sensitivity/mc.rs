use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{activity_scores, choose_k, eigh, KStrategy, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::models::{format_point, BenchmarkModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiniteDifference {
    #[default]
    Forward,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub replications: usize,
    pub seed: u64,
    pub k: KStrategy,
    /// Step relative to `|x_i|` in physical units.
    pub relative_step: f64,
    pub absolute_floor: f64,
    pub difference: FiniteDifference,
}

impl McOptions {
    pub fn new(samples: usize, replications: usize, seed: u64) -> Self {
        McOptions {
            samples,
            replications,
            seed,
            k: KStrategy::All,
            relative_step: 1e-6,
            absolute_floor: 1e-9,
            difference: FiniteDifference::Forward,
        }
    }
}

/// Mean and spread of the Monte Carlo activity scores over replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReference {
    pub mean: Vec<f64>,
    /// Sample standard deviation across replications.
    pub std: Vec<f64>,
    /// `std / √R`.
    pub std_of_mean: Vec<f64>,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "R")]
    pub replications: usize,
}

/// Monte Carlo activity scores with finite-difference gradients.
///
/// Replication `r` draws its uniform samples from the ChaCha8 stream `r` of
/// `seed`, so results do not depend on scheduling. Gradients are taken in
/// physical units and mapped to `[-1, 1]^m` by the half-widths of the box.
pub fn mc_reference(model: &BenchmarkModel, options: &McOptions) -> Result<McReference> {
    if options.samples == 0 || options.replications == 0 {
        return Err(Error::InvalidArgument("N and R must be positive".into()));
    }
    let m = model.dim();
    let thetas: Vec<Vec<f64>> = (0..options.replications)
        .into_par_iter()
        .map(|r| replication(model, options, r as u64))
        .collect::<Result<_>>()?;
    let rf = options.replications as f64;
    let mean: Vec<f64> = (0..m).map(|i| thetas.iter().map(|t| t[i]).sum::<f64>() / rf).collect();
    let std: Vec<f64> = (0..m)
        .map(|i| {
            if options.replications < 2 {
                return 0.0;
            }
            let ss: f64 = thetas.iter().map(|t| (t[i] - mean[i]).powi(2)).sum();
            (ss / (rf - 1.0)).sqrt()
        })
        .collect();
    Ok(McReference {
        std_of_mean: std.iter().map(|s| s / rf.sqrt()).collect(),
        mean,
        std,
        samples: options.samples,
        replications: options.replications,
    })
}

fn replication(model: &BenchmarkModel, options: &McOptions, stream: u64) -> Result<Vec<f64>> {
    let m = model.dim();
    let domain = model.domain();
    let half = domain.half_widths();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(stream);
    let mut u = vec![0.0; m];
    let mut x = vec![0.0; m];
    let mut grad = vec![0.0; m];
    let mut acc = vec![0.0; m * m];
    for sample in 0..options.samples {
        u.iter_mut().for_each(|v| *v = rng.random_range(-1.0..=1.0));
        domain.from_reference_into(&u, &mut x);
        let context = |e: Error| match e {
            Error::ModelEval { model, point, reason } => Error::ModelEval {
                model,
                point,
                reason: format!("{reason} (replication {stream}, sample {sample})"),
            },
            other => other,
        };
        let f0 = model.evaluate(&x).map_err(context)?;
        for i in 0..m {
            let h = (options.relative_step * x[i].abs()).max(options.absolute_floor);
            let xi = x[i];
            x[i] = xi + h;
            let fp = model.evaluate(&x).map_err(context)?;
            let slope = match options.difference {
                FiniteDifference::Forward => (fp - f0) / h,
                FiniteDifference::Central => {
                    x[i] = xi - h;
                    let fm = model.evaluate(&x).map_err(context)?;
                    (fp - fm) / (2.0 * h)
                }
            };
            x[i] = xi;
            grad[i] = slope * half[i];
        }
        for i in 0..m {
            for j in 0..=i {
                acc[i * m + j] += grad[i] * grad[j];
            }
        }
    }
    let mut c = SymmetricMatrix::zeros(m);
    let nf = options.samples as f64;
    for i in 0..m {
        for j in 0..=i {
            c.set(i, j, acc[i * m + j] / nf);
        }
    }
    let eig = eigh(&c).map_err(|e| Error::ModelEval {
        model: model.name().to_string(),
        point: format_point(&u),
        reason: format!("eigendecomposition failed: {e}"),
    })?;
    let k = choose_k(&eig.eigenvalues, options.k)?;
    Ok(activity_scores(&eig, k)?.theta)
}
