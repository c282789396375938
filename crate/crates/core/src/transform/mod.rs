//! The Fast Newton Transform on downward closed index sets: forward and
//! inverse transforms, evaluation, differentiation and the change to an
//! orthonormal Legendre basis.

mod basis;
mod naive;
mod plan;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mindex::{build_index_set, MultiIndexSet, PNorm};
use crate::nodes::{build_grid, newton_vandermonde, NewtonVandermonde, NodeFamily, NodeSystem};
use crate::tubes::{precompute_level_selections, LevelLayout};

pub use basis::{
    differentiation_matrix, legendre_change_of_basis, newton_basis, newton_basis_derivative,
    orthonormal_legendre, SquareMatrix,
};
pub use naive::{naive_solve, NAIVE_LIMIT};
pub use plan::{plan, LevelPlan};

use plan::{Dense, Sweep};

/// Everything the transform needs for one index set and node system.
#[derive(Debug, Clone)]
pub struct NewtonSpace {
    set: MultiIndexSet,
    nodes: NodeSystem,
    l: NewtonVandermonde,
    plan: LevelPlan,
    diff: SquareMatrix,
    basis: SquareMatrix,
}

impl NewtonSpace {
    pub fn new(set: MultiIndexSet, nodes: NodeSystem) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidArgument("index set is empty".into()));
        }
        let size = set.max_degree() as usize + 1;
        if size > nodes.count() {
            return Err(Error::InvalidArgument(format!(
                "set needs {size} nodes, only {} available",
                nodes.count()
            )));
        }
        let l = newton_vandermonde(&nodes);
        let layout = LevelLayout::from_set(&set)?;
        let selections = precompute_level_selections(&set, &layout)?;
        let plan = plan(&set, &layout, &selections)?;
        let xi = &nodes.points()[..size];
        let diff = differentiation_matrix(xi, &l)?;
        let basis = legendre_change_of_basis(xi);
        Ok(NewtonSpace {
            set,
            nodes,
            l,
            plan,
            diff,
            basis,
        })
    }

    /// The space on `A_{m,n,p}` with `n + 1` nodes of `family`.
    pub fn lp(m: usize, n: usize, p: PNorm, family: NodeFamily) -> Result<Self> {
        let set = build_index_set(m, n as i64, p)?;
        Self::new(set, NodeSystem::new(family, n)?)
    }

    pub fn set(&self) -> &MultiIndexSet {
        &self.set
    }

    pub fn nodes(&self) -> &NodeSystem {
        &self.nodes
    }

    pub fn vandermonde(&self) -> &NewtonVandermonde {
        &self.l
    }

    pub fn plan(&self) -> &LevelPlan {
        &self.plan
    }

    pub fn differentiation(&self) -> &SquareMatrix {
        &self.diff
    }

    pub fn change_of_basis(&self) -> &SquareMatrix {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.set.m()
    }

    /// Grid points `G`, flat with `m` coordinates per point.
    pub fn grid(&self) -> Vec<f64> {
        build_grid(&self.set, &self.nodes).expect("node count checked at construction")
    }

    /// Samples `f` on the grid. Points are evaluated in parallel; the result
    /// does not depend on the thread count.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let m = self.dim();
        self.grid().par_chunks_exact(m).map(&f).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: len,
            });
        }
        Ok(())
    }

    /// Values on `G` to Newton coefficients, in place. Returns the number of
    /// multiply-adds performed.
    pub fn forward_in_place(&self, x: &mut [f64]) -> Result<u64> {
        self.check_len(x.len())?;
        let mat = self.lower();
        Ok((1..=self.dim()).map(|level| self.plan.run_level(level, Sweep::Solve, mat, x)).sum())
    }

    /// Newton coefficients to values on `G`, in place.
    pub fn inverse_in_place(&self, x: &mut [f64]) -> Result<u64> {
        self.check_len(x.len())?;
        let mat = self.lower();
        Ok((1..=self.dim()).rev().map(|level| self.plan.run_level(level, Sweep::Lower, mat, x)).sum())
    }

    fn lower(&self) -> Dense<'_> {
        Dense {
            size: self.l.size(),
            data: self.l.as_slice(),
        }
    }

    fn upper(m: &SquareMatrix) -> Dense<'_> {
        Dense {
            size: m.size(),
            data: m.as_slice(),
        }
    }
}

/// A polynomial in Newton form over a shared [`NewtonSpace`].
#[derive(Debug, Clone)]
pub struct NewtonInterpolant {
    space: Arc<NewtonSpace>,
    coeffs: Vec<f64>,
}

impl NewtonInterpolant {
    pub fn new(space: Arc<NewtonSpace>, coeffs: Vec<f64>) -> Result<Self> {
        space.check_len(coeffs.len())?;
        Ok(NewtonInterpolant { space, coeffs })
    }

    pub fn space(&self) -> &Arc<NewtonSpace> {
        &self.space
    }

    pub fn set(&self) -> &MultiIndexSet {
        &self.space.set
    }

    pub fn nodes(&self) -> &NodeSystem {
        &self.space.nodes
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.evaluator().evaluate(x)
    }

    /// Evaluates at many points given flat with `m` coordinates each.
    pub fn evaluate_many(&self, points: &[f64]) -> Result<Vec<f64>> {
        let m = self.space.dim();
        if points.len() % m != 0 {
            return Err(Error::LengthMismatch {
                expected: m * (points.len() / m + 1),
                actual: points.len(),
            });
        }
        points
            .par_chunks_exact(m)
            .map_init(|| self.evaluator(), |ev, x| ev.evaluate(x))
            .collect()
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::new(self)
    }

    /// `∂f/∂x_axis` on the same index set (`axis` is 0-based).
    pub fn differentiate(&self, axis: usize) -> Result<NewtonInterpolant> {
        let m = self.space.dim();
        if axis >= m {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for dimension {m}"
            )));
        }
        let mut c = self.coeffs.clone();
        let mat = NewtonSpace::upper(&self.space.diff);
        self.space.plan.run_level(axis + 1, Sweep::Upper, mat, &mut c);
        Ok(NewtonInterpolant {
            space: Arc::clone(&self.space),
            coeffs: c,
        })
    }

    /// Coefficients in the tensor basis `φ_α = Π_d φ_{α_d}(x_d)`, orthonormal
    /// under the uniform probability measure on `[-1, 1]^m`.
    pub fn to_orthonormal(&self) -> Vec<f64> {
        let mut a = self.coeffs.clone();
        let mat = NewtonSpace::upper(&self.space.basis);
        for level in 1..=self.space.dim() {
            self.space.plan.run_level(level, Sweep::Upper, mat, &mut a);
        }
        a
    }
}

/// Reusable scratch for repeated point evaluation.
///
/// Collapses the coefficients level by level: each level-1 tube becomes one
/// value `Σ_k N_k(x_1) c_k`, each level-2 group one value over its tubes, and
/// so on, for `O(|A| κ + m n)` work per point.
pub struct Evaluator<'a> {
    interp: &'a NewtonInterpolant,
    size: usize,
    basis: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(interp: &'a NewtonInterpolant) -> Self {
        let space = &interp.space;
        let size = space.set.max_degree() as usize + 1;
        let groups = space.plan.group_offsets(1).len() - 1;
        Evaluator {
            interp,
            size,
            basis: vec![0.0; size * space.dim()],
            cur: Vec::with_capacity(groups),
            next: Vec::with_capacity(groups),
        }
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let space = &self.interp.space;
        let m = space.dim();
        if x.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("evaluation point must be finite".into()));
        }
        let xi = space.nodes.points();
        for (d, &xd) in x.iter().enumerate() {
            newton_basis(xi, xd, &mut self.basis[d * self.size..(d + 1) * self.size]);
        }
        let plan = &space.plan;
        let c = &self.interp.coeffs;
        self.cur.clear();
        self.cur.extend(plan.group_offsets(1).windows(2).map(|w| {
            c[w[0]..w[1]]
                .iter()
                .zip(&self.basis[..self.size])
                .map(|(a, b)| a * b)
                .sum::<f64>()
        }));
        for level in 2..=m {
            let basis = &self.basis[(level - 1) * self.size..level * self.size];
            self.next.clear();
            let cur = &self.cur;
            self.next.extend(plan.first_blocks(level).windows(2).map(|w| {
                cur[w[0]..w[1]].iter().zip(basis).map(|(a, b)| a * b).sum::<f64>()
            }));
            std::mem::swap(&mut self.cur, &mut self.next);
        }
        Ok(self.cur[0])
    }
}

/// Values on the grid to a Newton interpolant.
pub fn fnt_forward(space: &Arc<NewtonSpace>, samples: &[f64]) -> Result<NewtonInterpolant> {
    fnt_forward_counted(space, samples).map(|(interp, _)| interp)
}

/// [`fnt_forward`] together with its multiply-add count.
pub fn fnt_forward_counted(space: &Arc<NewtonSpace>, samples: &[f64]) -> Result<(NewtonInterpolant, u64)> {
    let mut c = samples.to_vec();
    let ops = space.forward_in_place(&mut c)?;
    Ok((
        NewtonInterpolant {
            space: Arc::clone(space),
            coeffs: c,
        },
        ops,
    ))
}

/// Newton interpolant back to its values on the grid.
pub fn fnt_inverse(interp: &NewtonInterpolant) -> Vec<f64> {
    let mut v = interp.coeffs.clone();
    interp
        .space
        .inverse_in_place(&mut v)
        .expect("interpolant length matches its space");
    v
}

pub fn evaluate(interp: &NewtonInterpolant, x: &[f64]) -> Result<f64> {
    interp.evaluate(x)
}

pub fn differentiate(interp: &NewtonInterpolant, axis: usize) -> Result<NewtonInterpolant> {
    interp.differentiate(axis)
}

pub fn to_orthonormal(interp: &NewtonInterpolant) -> Vec<f64> {
    interp.to_orthonormal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tubes::TubeDecomposition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn space(m: usize, n: usize, p: f64) -> Arc<NewtonSpace> {
        Arc::new(NewtonSpace::lp(m, n, PNorm::new(p).unwrap(), NodeFamily::ChebyshevLobatto).unwrap())
    }

    fn random(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    #[test]
    fn example_plan_structure() {
        let s = space(3, 2, 1.0);
        let plan = s.plan();
        let sizes: Vec<usize> = plan.groups(1).iter().map(|r| r.len()).collect();
        assert_eq!(sizes, [3, 2, 1, 2, 1, 1]);
        assert_eq!(plan.merge_groups(2), vec![0..3, 3..5, 5..6]);
        assert_eq!(plan.merge_groups(3), vec![0..3]);
        assert_eq!(plan.groups(3), vec![0..10]);
        let tubes = TubeDecomposition::new(s.set()).unwrap();
        for level in 1..=3 {
            assert_eq!(plan.groups(level).len(), tubes.projection(level - 1).len());
        }

        let uni = space(1, 4, 2.0);
        assert_eq!(uni.plan().groups(1), vec![0..5]);
        let sq = space(2, 1, f64::INFINITY);
        assert_eq!(sq.plan().groups(1), vec![0..2, 2..4]);
        assert_eq!(sq.plan().merge_groups(2), vec![0..2]);
    }

    #[test]
    fn constant_samples() {
        let s = space(3, 4, 2.0);
        let f = fnt_forward(&s, &vec![1.0; s.len()]).unwrap();
        assert!((f.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!(f.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
        let back = fnt_inverse(&f);
        assert!(back.iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn univariate_is_divided_differences() {
        let s = space(1, 6, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random(7, &mut rng);
        let c = fnt_forward(&s, &f).unwrap();
        let dd = crate::nodes::triangular_solve(s.vandermonde(), &f, 7).unwrap();
        assert_eq!(c.coeffs(), dd.as_slice());
        assert_eq!(fnt_inverse(&c).len(), 7);
        let lc = s.vandermonde().mul(c.coeffs());
        for (a, b) in fnt_inverse(&c).iter().zip(&lc) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_naive_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (m, n, p) in [(2, 3, 1.0), (3, 4, 2.0), (3, 5, 0.5), (4, 3, f64::INFINITY), (3, 6, 1.5)] {
            let s = space(m, n, p);
            let f = random(s.len(), &mut rng);
            let fast = fnt_forward(&s, &f).unwrap();
            let slow = naive_solve(&f, s.set(), s.nodes()).unwrap();
            let scale = max_abs(&slow);
            for (a, b) in fast.coeffs().iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-10 * scale, "({m},{n},{p})");
            }
            let back = fnt_inverse(&fast);
            for (a, b) in back.iter().zip(&f) {
                assert!((a - b).abs() <= 1e-11 * max_abs(&f));
            }
        }
    }

    #[test]
    fn interpolation_and_exactness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = space(3, 5, 2.0);
        let c = NewtonInterpolant::new(Arc::clone(&s), random(s.len(), &mut rng)).unwrap();
        let values = fnt_inverse(&c);
        let grid = s.grid();
        let mut ev = c.evaluator();
        for (x, v) in grid.chunks_exact(3).zip(&values) {
            assert!((ev.evaluate(x).unwrap() - v).abs() < 1e-11);
        }
        // x + y on A_{2,2,1} is reproduced everywhere.
        let s = space(2, 2, 1.0);
        let f = fnt_forward(&s, &s.sample(|x| x[0] + x[1])).unwrap();
        for _ in 0..100 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            assert!((f.evaluate(&x).unwrap() - x[0] - x[1]).abs() < 1e-12);
        }
        let batch = f.evaluate_many(&[0.5, 0.25, -1.0, 0.0]).unwrap();
        assert!((batch[0] - 0.75).abs() < 1e-14 && (batch[1] + 1.0).abs() < 1e-14);
        assert!(f.evaluate(&[f64::NAN, 0.0]).is_err());
        assert!(f.evaluate(&[0.0]).is_err());
    }

    #[test]
    fn general_set() {
        let set = MultiIndexSet::from_indices(
            3,
            &[
                vec![0, 0, 0],
                vec![1, 0, 0],
                vec![2, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2],
                vec![0, 0, 3],
            ],
        )
        .unwrap();
        let s = Arc::new(NewtonSpace::new(set, NodeSystem::new(NodeFamily::Leja, 3).unwrap()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random(s.len(), &mut rng);
        let fast = fnt_forward(&s, &f).unwrap();
        let slow = naive_solve(&f, s.set(), s.nodes()).unwrap();
        for (a, b) in fast.coeffs().iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
        let d = fast.differentiate(2).unwrap();
        let h = 1e-6;
        let x = [0.3, -0.2, 0.1];
        let fd = (fast.evaluate(&[0.3, -0.2, 0.1 + h]).unwrap() - fast.evaluate(&[0.3, -0.2, 0.1 - h]).unwrap())
            / (2.0 * h);
        assert!((d.evaluate(&x).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn derivatives() {
        let s = space(1, 2, 1.0);
        let f = fnt_forward(&s, &s.sample(|x| x[0] * x[0])).unwrap();
        let d = f.differentiate(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x = rng.random_range(-1.0..1.0);
            assert!((d.evaluate(&[x]).unwrap() - 2.0 * x).abs() < 1e-10);
        }
        let s = space(3, 4, 2.0);
        let c = fnt_forward(&s, &vec![3.0; s.len()]).unwrap();
        assert!(c.differentiate(1).unwrap().coeffs().iter().all(|v| v.abs() < 1e-12));
        let g = NewtonInterpolant::new(Arc::clone(&s), random(s.len(), &mut rng)).unwrap();
        let a = g.differentiate(0).unwrap().differentiate(2).unwrap();
        let b = g.differentiate(2).unwrap().differentiate(0).unwrap();
        for (u, v) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((u - v).abs() < 1e-9);
        }
        assert!(g.differentiate(3).is_err());
    }

    #[test]
    fn orthonormal_coefficients() {
        let s = space(1, 3, 1.0);
        let f = fnt_forward(&s, &s.sample(|x| x[0])).unwrap();
        let a = f.to_orthonormal();
        assert!(a[0].abs() < 1e-14 && (a[1] - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(a[2..].iter().all(|v| v.abs() < 1e-14));
        let s = space(3, 3, 2.0);
        let one = fnt_forward(&s, &vec![1.0; s.len()]).unwrap().to_orthonormal();
        assert!((one[0] - 1.0).abs() < 1e-14 && one[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn parallel_is_bit_identical() {
        let s = space(5, 8, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random(s.len(), &mut rng);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let c = fnt_forward(&s, &f).unwrap();
                (c.coeffs().to_vec(), c.to_orthonormal(), fnt_inverse(&c))
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn operation_count_is_bounded() {
        for (m, n, p) in [(2, 8, 2.0), (4, 6, 1.0), (5, 5, f64::INFINITY)] {
            let s = space(m, n, p);
            let (_, ops) = fnt_forward_counted(&s, &vec![0.5; s.len()]).unwrap();
            assert!(ops <= (4 * s.len() * m * (n + 1)) as u64);
        }
    }
}
