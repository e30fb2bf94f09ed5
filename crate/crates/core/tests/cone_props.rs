use mixcone::cone::{ConeElement, HermitianOperator, SignedMeasure};
use mixcone::sample;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_decomposition<E: ConeElement>(z: &E) {
    let d = z.minimal_decomposition().unwrap();
    let (p, m) = (&d.positive, &d.negative);
    assert!((z.charge() - (p.charge() - m.charge())).abs() <= TOL);
    assert!((z.one_norm().unwrap() - (p.charge() + m.charge())).abs() <= TOL);
    assert!(p.is_positive(TOL).unwrap() && m.is_positive(TOL).unwrap());
    assert!(p.overlap(m).unwrap().abs() <= TOL);
    let back = E::combine(1.0, p, -1.0, m).unwrap();
    assert!(E::combine(1.0, &back, -1.0, z).unwrap().one_norm().unwrap() <= TOL);
}

fn check_contour<E: ConeElement>(z: &E) {
    let on_contour = (z.one_norm().unwrap() - z.charge()).abs() <= TOL;
    assert_eq!(z.is_positive(TOL).unwrap(), on_contour);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classical_decomposition(seed in any::<u64>(), dim in 1usize..=8) {
        let z = sample::signed_measure(&mut rng(seed), dim);
        check_decomposition(&z);
        check_contour(&z);
    }

    #[test]
    fn classical_positive_on_contour(seed in any::<u64>(), dim in 1usize..=8) {
        let z = sample::positive_measure(&mut rng(seed), dim);
        check_contour(&z);
        prop_assert!(z.is_positive(TOL).unwrap());
    }

    #[test]
    fn quantum_decomposition(seed in any::<u64>(), dim in 1usize..=6) {
        let z = sample::hermitian(&mut rng(seed), dim);
        check_decomposition(&z);
        check_contour(&z);
        let e = z.eigen().unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(z.matrix()) <= 1e-10);
    }

    #[test]
    fn quantum_positive_on_contour(seed in any::<u64>(), dim in 1usize..=6) {
        let rho = sample::density_matrix(&mut rng(seed), dim);
        check_contour(rho.as_ref());
    }

    #[test]
    fn one_norm_is_a_norm(seed in any::<u64>(), dim in 1usize..=6, a in -5.0f64..5.0) {
        let mut r = rng(seed);
        let x = sample::signed_measure(&mut r, dim);
        let y = sample::signed_measure(&mut r, dim);
        let sum = SignedMeasure::combine(1.0, &x, 1.0, &y).unwrap();
        prop_assert!(sum.one_norm().unwrap() <= x.one_norm().unwrap() + y.one_norm().unwrap() + TOL);
        let scaled = SignedMeasure::combine(a, &x, 0.0, &y).unwrap();
        prop_assert!((scaled.one_norm().unwrap() - a.abs() * x.one_norm().unwrap()).abs() <= TOL);

        let p = sample::hermitian(&mut r, dim);
        let q = sample::hermitian(&mut r, dim);
        let s = HermitianOperator::combine(1.0, &p, 1.0, &q).unwrap();
        prop_assert!(s.one_norm().unwrap() <= p.one_norm().unwrap() + q.one_norm().unwrap() + TOL);
        let sc = HermitianOperator::combine(a, &p, 0.0, &q).unwrap();
        prop_assert!((sc.one_norm().unwrap() - a.abs() * p.one_norm().unwrap()).abs() <= TOL);
    }

    /// A split z = x − y into positive parts has ‖x − y‖₁ = charge(x) + charge(y)
    /// exactly when x ⊥ y.
    #[test]
    fn minimal_split_iff_orthogonal(seed in any::<u64>(), dim in 2usize..=6) {
        let mut r = rng(seed);
        let x = sample::positive_measure(&mut r, dim);
        let y = sample::positive_measure(&mut r, dim);
        let z = SignedMeasure::combine(1.0, &x, -1.0, &y).unwrap();
        let minimal = (z.one_norm().unwrap() - (x.charge() + y.charge())).abs() <= TOL;
        prop_assert_eq!(minimal, x.orthogonal_within(&y, TOL).unwrap());
        // the canonical split is always minimal and orthogonal
        let d = z.minimal_decomposition().unwrap();
        prop_assert!(d.positive.orthogonal_within(&d.negative, TOL).unwrap());
    }

    #[test]
    fn quantum_minimal_split_iff_orthogonal(seed in any::<u64>(), dim in 2usize..=4) {
        let mut r = rng(seed);
        let x = sample::density_matrix(&mut r, dim).into_inner();
        let y = sample::density_matrix(&mut r, dim).into_inner();
        let z = HermitianOperator::combine(1.0, &x, -1.0, &y).unwrap();
        let minimal = (z.one_norm().unwrap() - 2.0).abs() <= 1e-8;
        prop_assert_eq!(minimal, x.orthogonal_within(&y, 1e-8).unwrap());
    }
}

#[test]
fn orthogonal_pure_states_split_minimally() {
    let x = HermitianOperator::from_real_diag(&[1.0, 0.0, 0.0]).unwrap();
    let y = HermitianOperator::from_real_diag(&[0.0, 0.5, 0.5]).unwrap();
    let z = HermitianOperator::combine(1.0, &x, -1.0, &y).unwrap();
    assert!((z.one_norm().unwrap() - 2.0).abs() < 1e-12);
    assert!(x.orthogonal_within(&y, TOL).unwrap());
}
