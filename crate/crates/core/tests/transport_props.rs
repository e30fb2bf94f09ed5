use mixcone::classical::is_isometry;
use mixcone::cone::{SignedMeasure, State};
use mixcone::mixdist::dominates;
use mixcone::sample;
use mixcone::transport::{
    check_rss_equivalence, find_transport, find_transport_with, is_reversible_transition, random_instance, LpMode,
    SOUNDNESS_TOL,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn residual(phi: &mixcone::StochasticMatrix, x: &State<SignedMeasure>, xp: &State<SignedMeasure>) -> f64 {
    phi.apply(x).unwrap().distance(xp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn feasible_iff_dominates(seed in any::<u64>(), n in 2usize..=5, m in 2usize..=5) {
        let mut r = rng(seed);
        let [x, y, xp, yp] = random_instance(&mut r, n, m);
        let rep = check_rss_equivalence(&x, &y, &xp, &yp, 1e-8).unwrap();
        prop_assert!(rep.agree, "feasible={} dominates={}", rep.feasible, rep.dominates);
        if let Some(phi) = &rep.certificate.transport {
            prop_assert!(residual(phi, &x, &xp) <= SOUNDNESS_TOL);
            prop_assert!(residual(phi, &y, &yp) <= SOUNDNESS_TOL);
        } else {
            let w = rep.certificate.dominance_witness.unwrap();
            prop_assert!(w.gap > 1e-8);
            prop_assert!(rep.certificate.farkas.is_some());
        }
    }

    #[test]
    fn transports_compose(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let x = sample::classical_state(&mut r, n);
        let y = sample::classical_state(&mut r, n);
        let f = sample::stochastic_matrix(&mut r, n, n, true);
        let g = sample::stochastic_matrix(&mut r, n, n, true);
        let (x1, y1) = (f.apply_state(&x).unwrap(), f.apply_state(&y).unwrap());
        let (x2, y2) = (g.apply_state(&x1).unwrap(), g.apply_state(&y1).unwrap());
        let t1 = find_transport(&x, &y, &x1, &y1).unwrap().transport.unwrap();
        let t2 = find_transport(&x1, &y1, &x2, &y2).unwrap().transport.unwrap();
        let t = t2.compose(&t1).unwrap();
        prop_assert!(residual(&t, &x, &x2) <= 2.0 * SOUNDNESS_TOL);
        prop_assert!(residual(&t, &y, &y2) <= 2.0 * SOUNDNESS_TOL);
        prop_assert!(dominates((&x, &y), (&x2, &y2), 1e-8).unwrap().holds);
    }

    #[test]
    fn isometric_images_can_be_undone(seed in any::<u64>(), n in 1usize..=5, extra in 0usize..=3) {
        let mut r = rng(seed);
        let phi = sample::column_disjoint_isometry(&mut r, n + extra, n);
        prop_assert!(is_isometry(&phi, 1e-9).isometric);
        let x = sample::classical_state(&mut r, n);
        let y = sample::classical_state(&mut r, n);
        let xp = phi.apply_state(&x).unwrap();
        let yp = phi.apply_state(&y).unwrap();
        prop_assert!(is_reversible_transition(&x, &y, &xp, &yp).unwrap());
    }
}

fn dyadic_vector(r: &mut ChaCha8Rng, n: usize, denom: u32) -> Vec<f64> {
    use rand::Rng;
    // random composition of `denom` into n parts
    let mut counts = vec![0u32; n];
    for _ in 0..denom {
        counts[r.random_range(0..n)] += 1;
    }
    counts.iter().map(|&c| c as f64 / denom as f64).collect()
}

/// Dyadic data is exact in binary and in decimal, so both modes see the same
/// instance and must agree.
#[test]
fn exact_mode_agrees_with_float_mode() {
    use rand::Rng;
    let mut r = rng(17);
    for _ in 0..60 {
        let n = 3;
        let x = State::from_weights(dyadic_vector(&mut r, n, 8)).unwrap();
        let y = State::from_weights(dyadic_vector(&mut r, n, 8)).unwrap();
        let (xp, yp) = if r.random_bool(0.5) {
            let cols: Vec<Vec<f64>> = (0..n).map(|_| dyadic_vector(&mut r, n, 4)).collect();
            let phi = mixcone::StochasticMatrix::from_columns(&cols).unwrap();
            (phi.apply_state(&x).unwrap(), phi.apply_state(&y).unwrap())
        } else {
            (
                State::from_weights(dyadic_vector(&mut r, n, 8)).unwrap(),
                State::from_weights(dyadic_vector(&mut r, n, 8)).unwrap(),
            )
        };
        let f = find_transport_with(&x, &y, &xp, &yp, LpMode::Float).unwrap();
        let e = find_transport_with(&x, &y, &xp, &yp, LpMode::Exact).unwrap();
        assert_eq!(f.feasible, e.feasible, "x={x:?} y={y:?} xp={xp:?} yp={yp:?}");
    }
}
