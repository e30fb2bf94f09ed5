use mixcone::cone::{ConeElement, HermitianOperator, State};
use mixcone::linalg::random_unitary;
use mixcone::quantum::{
    build_inverse_channel, build_isometric_channel, is_isometry_channel, is_surjective, purity, IsometryBlueprint,
    KrausChannel,
};
use mixcone::sample;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_weights(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    sample::probability_vector(r, n, false)
}

/// Block blueprint with random weights, antilinear flags and an optional
/// random rotation of the output space.
fn random_blueprint(r: &mut ChaCha8Rng, d: usize, n: usize, extra: usize) -> IsometryBlueprint {
    let weights = random_weights(r, n);
    let anti: Vec<bool> = (0..n).map(|_| r.random_bool(0.3)).collect();
    let b = IsometryBlueprint::block_embedding(d, weights, extra, anti).unwrap();
    if r.random_bool(0.5) {
        let w = random_unitary(b.dim_out(), r);
        b.rotated(&w).unwrap()
    } else {
        b
    }
}

fn random_channel(r: &mut ChaCha8Rng, d: usize) -> KrausChannel {
    match r.random_range(0..3) {
        0 => KrausChannel::unitary(random_unitary(d, r)).unwrap(),
        1 => KrausChannel::completely_depolarizing(d),
        _ => {
            let b = random_blueprint(r, d, 2, 1);
            let sigma = sample::density_matrix(r, d);
            build_inverse_channel(&b, &sigma).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d);
        let z = sample::hermitian(&mut r, ch.dim_in());
        prop_assert!((ch.apply(&z).unwrap().charge() - z.charge()).abs() <= 1e-10);
        let rho = sample::density_matrix(&mut r, ch.dim_in());
        let out = ch.apply(&rho).unwrap();
        prop_assert!(out.eigen().unwrap().values[0] >= -1e-9);
    }

    #[test]
    fn blueprints_preserve_trace_norm_and_invert(seed in any::<u64>(), n in 1usize..=3, extra in 0usize..=2) {
        let mut r = rng(seed);
        let b = random_blueprint(&mut r, 2, n, extra);
        let phi = build_isometric_channel(&b).unwrap();
        let psi = build_inverse_channel(&b, &State::maximally_mixed(2)).unwrap();
        let z = sample::hermitian(&mut r, 2);
        let img = phi.apply(&z).unwrap();
        prop_assert!((img.one_norm().unwrap() - z.one_norm().unwrap()).abs() <= 1e-9);
        let back = psi.apply(&img).unwrap();
        prop_assert!(back.trace_distance(&z).unwrap() <= 1e-9);
    }

    #[test]
    fn purity_of_blueprint_images(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let b = random_blueprint(&mut r, 2, n, 0);
        let phi = build_isometric_channel(&b).unwrap();
        let pure = sample::pure_state(&mut r, 2);
        let expected: f64 = b.weights().iter().map(|w| w * w).sum();
        prop_assert!((purity(&phi.apply_state(&pure).unwrap()) - expected).abs() <= 1e-10);
    }
}

#[test]
fn unitary_conjugations_are_surjective_and_keep_purity() {
    let mut r = rng(3);
    for d in 1..=4 {
        let ch = KrausChannel::unitary(random_unitary(d, &mut r)).unwrap();
        assert!(is_surjective(&ch).unwrap().surjective);
        let pure = sample::pure_state(&mut r, d);
        assert!((purity(&ch.apply_state(&pure).unwrap()) - 1.0).abs() <= 1e-10);
        assert!(is_isometry_channel(&ch, 50, 1, 1e-9).unwrap().is_isometric());
    }
}

#[test]
fn multi_block_inverse_is_not_isometric() {
    let mut r = rng(4);
    for n in 2..=3 {
        for extra in [0, 2] {
            let b = random_blueprint(&mut r, 2, n, extra);
            let phi = build_isometric_channel(&b).unwrap();
            assert!(!is_surjective(&phi).unwrap().surjective);
            assert!(is_isometry_channel(&phi, 200, 9, 1e-9).unwrap().is_isometric());
            let psi = build_inverse_channel(&b, &State::maximally_mixed(2)).unwrap();
            match is_isometry_channel(&psi, 200, 9, 1e-9).unwrap() {
                mixcone::quantum::ChannelIsometryVerdict::NotIsometric {
                    witness,
                    norm_in,
                    norm_out,
                    ..
                } => {
                    // re-check the witness independently
                    let out = psi.apply(&witness).unwrap();
                    assert!((out.one_norm().unwrap() - norm_out).abs() < 1e-12);
                    assert!(norm_in - norm_out > 1e-9);
                }
                other => panic!("expected a disproof, got {other:?}"),
            }
        }
    }
}

#[test]
fn hermitian_input_is_validated() {
    let m = mixcone::linalg::CMatrix::from_parts(&[vec![1.0, 2.0], vec![0.0, 1.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
    assert!(HermitianOperator::new(m).is_err());
}
