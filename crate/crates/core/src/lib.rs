//! Multivariate Newton interpolation on ℓᵖ-degree downward closed index sets.
//!
//! The crate builds the index sets `A_{m,n,p}`, their tube decomposition, the
//! non-tensorial Chebyshev–Lobatto grid and a fast Newton transform that runs
//! in `O(|A| m n)`. On top of the resulting interpolants it computes gradient
//! covariance matrices and active-subspace activity scores for a few standard
//! benchmark models.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod io;
pub mod mindex;
pub mod models;
pub mod nodes;
pub mod sensitivity;
pub mod transform;
pub mod tubes;

pub use error::{Error, Result};
pub use mindex::{build_index_set, MultiIndexSet, PNorm};
pub use models::{BenchmarkModel, BoxDomain};
pub use nodes::{NodeFamily, NodeSystem};
pub use sensitivity::{KStrategy, SensitivityReport};
pub use transform::{fnt_forward, fnt_inverse, NewtonInterpolant, NewtonSpace};
pub use tubes::TubeDecomposition;
