use std::sync::Arc;

use lpfnt_core::io::{align_coefficients, read_coefficients_csv, write_coefficients_csv, Fnt1};
use lpfnt_core::mindex::{colex_cmp, density};
use lpfnt_core::tubes::{all_tube_projections, rebuild_from_tubes};
use lpfnt_core::{build_index_set, fnt_forward, NewtonInterpolant, NewtonSpace, NodeFamily, PNorm};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p_strategy() -> impl Strategy<Value = PNorm> {
    prop::sample::select(vec![0.0, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, f64::INFINITY]).prop_map(|p| PNorm::new(p).unwrap())
}

fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sets_are_ordered_and_downward_closed(m in 1usize..=4, n in 0i64..=6, p in p_strategy()) {
        let set = build_index_set(m, n, p).unwrap();
        prop_assert!(set.is_strictly_colex());
        prop_assert_eq!(set.first_closure_violation(), None);
        for (i, alpha) in set.iter().enumerate() {
            prop_assert_eq!(set.position(alpha), Some(i));
        }
        let flat: Vec<&[u32]> = set.iter().collect();
        prop_assert!(flat.windows(2).all(|w| colex_cmp(w[0], w[1]).is_lt()));
    }

    #[test]
    fn tubes_determine_the_set(m in 1usize..=4, n in 0i64..=6, p in p_strategy()) {
        let set = build_index_set(m, n, p).unwrap();
        let rebuilt = rebuild_from_tubes(m, &all_tube_projections(&set)).unwrap();
        prop_assert_eq!(rebuilt.as_flat(), set.as_flat());
    }

    #[test]
    fn interpolant_reproduces_samples(m in 1usize..=3, n in 1usize..=6, p in p_strategy(), seed in any::<u64>()) {
        let space = Arc::new(NewtonSpace::lp(m, n, p, NodeFamily::ChebyshevLobatto).unwrap());
        let f = random_vec(space.len(), seed);
        let interp = fnt_forward(&space, &f).unwrap();
        let values = interp.evaluate_many(&space.grid()).unwrap();
        for (a, b) in values.iter().zip(&f) {
            prop_assert!((a - b).abs() <= 1e-11, "{} vs {}", a, b);
        }
    }

    #[test]
    fn coefficient_files_round_trip(m in 1usize..=4, n in 0usize..=5, p in p_strategy(), seed in any::<u64>()) {
        let space = Arc::new(NewtonSpace::lp(m, n, p, NodeFamily::ChebyshevLobatto).unwrap());
        let coeffs = random_vec(space.len(), seed);
        let mut csv = Vec::new();
        write_coefficients_csv(&mut csv, space.set(), &coeffs).unwrap();
        let (idx, vals) = read_coefficients_csv(&csv[..]).unwrap();
        prop_assert_eq!(align_coefficients(space.set(), &idx, &vals).unwrap(), coeffs.clone());

        let mut bin = Vec::new();
        Fnt1::new(space.set(), coeffs.clone()).unwrap().write(&mut bin).unwrap();
        let back = Fnt1::read(&bin[..]).unwrap();
        let rebuilt = back.index_set().unwrap();
        prop_assert_eq!(rebuilt.as_flat(), space.set().as_flat());
        prop_assert_eq!(back.coeffs, coeffs);
    }

    #[test]
    fn derivatives_of_lower_degree_are_exact(m in 1usize..=3, n in 2usize..=5, seed in any::<u64>()) {
        // f = Σ_i c_i x_i^2 + x_1 x_m lies in Π_{m,n,2}; ∂f/∂x_1 = 2 c_1 x_1 + x_m.
        let space = Arc::new(NewtonSpace::lp(m, n, PNorm::TWO, NodeFamily::Leja).unwrap());
        let c = random_vec(m, seed);
        let f = |x: &[f64]| x.iter().zip(&c).map(|(x, c)| c * x * x).sum::<f64>() + x[0] * x[m - 1];
        let interp = fnt_forward(&space, &space.sample(f)).unwrap();
        let d = interp.differentiate(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..10 {
            let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let want = 2.0 * c[0] * x[0] + x[m - 1] + if m == 1 { x[0] } else { 0.0 };
            prop_assert!((d.evaluate(&x).unwrap() - want).abs() < 1e-10);
        }
    }
}

#[test]
fn density_is_non_increasing_in_m() {
    for n in 1..=8 {
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            let p = PNorm::new(p).unwrap();
            let rho: Vec<f64> = (1..=6).map(|m| density(m, n, p).unwrap()).collect();
            assert!(rho.windows(2).all(|w| w[1] <= w[0]), "n={n} p={p}: {rho:?}");
        }
    }
}

#[test]
fn interpolants_share_spaces() {
    let space = Arc::new(NewtonSpace::lp(2, 3, PNorm::ONE, NodeFamily::ChebyshevLobatto).unwrap());
    let a = NewtonInterpolant::new(Arc::clone(&space), vec![1.0; space.len()]).unwrap();
    let b = fnt_forward(&space, &vec![0.0; space.len()]).unwrap();
    assert!(Arc::ptr_eq(a.space(), b.space()));
    assert!(NewtonInterpolant::new(space, vec![0.0; 3]).is_err());
}
