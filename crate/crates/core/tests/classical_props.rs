use mixcone::classical::{classify_reversible, inverse_on_range, is_isometry, StochasticMatrix, SUPPORT_TOL};
use mixcone::cone::{ConeElement, SignedMeasure, State};
use mixcone::sample;
use mixcone::transport::find_transport;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn apply_raw(m: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect()
}

fn l1(z: &[f64]) -> f64 {
    z.iter().map(|v| v.abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn stochastic_maps_contract(seed in any::<u64>(), n in 1usize..=8, m in 1usize..=8) {
        let mut r = rng(seed);
        let sparse = r.random_bool(0.3);
        let phi = sample::stochastic_matrix(&mut r, m, n, sparse);
        let z = sample::signed_measure(&mut r, n);
        prop_assert!(phi.apply(&z).unwrap().one_norm().unwrap() <= z.one_norm().unwrap() + 1e-9);
        let charge = phi.apply(&z).unwrap().charge();
        prop_assert!((charge - z.charge()).abs() <= 1e-9);
    }

    /// A charge-preserving matrix with a negative entry is caught expanding
    /// some element of a dense sample.
    #[test]
    fn negative_entry_breaks_contraction(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let mut m = sample::stochastic_matrix(&mut r, n, n, false).to_rows();
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        let k = (i + 1) % n;
        let eps = r.random_range(0.01..0.5);
        m[i][j] = -eps;
        // restore the column sum through another row
        let col: f64 = (0..n).map(|row| m[row][j]).sum();
        m[k][j] += 1.0 - col;
        let mut found = false;
        let probes = (0..n)
            .map(|b| { let mut e = vec![0.0; n]; e[b] = 1.0; e })
            .chain((0..200).map(|_| sample::signed_measure(&mut r, n).into_weights()));
        for z in probes {
            if l1(&apply_raw(&m, &z)) > l1(&z) + 1e-9 {
                found = true;
                break;
            }
        }
        prop_assert!(found);
    }

    #[test]
    fn isometry_test_matches_norm_preservation(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=6) {
        let mut r = rng(seed);
        let phi = if m >= n && r.random_bool(0.5) {
            sample::column_disjoint_isometry(&mut r, m, n)
        } else {
            sample::stochastic_matrix(&mut r, m, n, true)
        };
        let claimed = is_isometry(&phi, SUPPORT_TOL).isometric;
        let mut preserved = true;
        for _ in 0..500 {
            let z = sample::signed_measure(&mut r, n);
            if (phi.apply(&z).unwrap().one_norm().unwrap() - z.one_norm().unwrap()).abs() > 1e-9 {
                preserved = false;
                break;
            }
        }
        prop_assert_eq!(claimed, preserved);
    }

    #[test]
    fn inverse_on_range_undoes_isometry(seed in any::<u64>(), n in 1usize..=6, extra in 0usize..=4) {
        let mut r = rng(seed);
        let phi = sample::column_disjoint_isometry(&mut r, n + extra, n);
        let inv = inverse_on_range(&phi).unwrap();
        let z = sample::signed_measure(&mut r, n);
        let back = inv.apply(&phi.apply(&z).unwrap()).unwrap();
        prop_assert!(back.distance(&z).unwrap() <= 1e-12);
    }

    #[test]
    fn irreversible_maps_have_no_way_back(seed in any::<u64>(), n in 2usize..=6, m in 1usize..=6) {
        let mut r = rng(seed);
        let phi = if m >= n && r.random_bool(0.4) {
            sample::column_disjoint_isometry(&mut r, m, n)
        } else {
            sample::stochastic_matrix(&mut r, m, n, true)
        };
        let verdict = classify_reversible(&phi, SUPPORT_TOL).unwrap();
        match verdict {
            mixcone::Reversibility::Irreversible { witness } => {
                let back = witness.transport_back.expect("LP runs for small dimensions");
                prop_assert!(!back.feasible);
                let xp = phi.apply_state(&witness.x).unwrap();
                let yp = phi.apply_state(&witness.y).unwrap();
                prop_assert!(!find_transport(&xp, &yp, &witness.x, &witness.y).unwrap().feasible);
            }
            mixcone::Reversibility::Reversible { .. } => {
                // every point-mass pair can be sent back
                for j in 0..n {
                    for k in 0..n {
                        let x = State::<SignedMeasure>::point_mass(n, j);
                        let y = State::<SignedMeasure>::point_mass(n, k);
                        let xp = phi.apply_state(&x).unwrap();
                        let yp = phi.apply_state(&y).unwrap();
                        prop_assert!(find_transport(&xp, &yp, &x, &y).unwrap().feasible);
                    }
                }
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn square_isometries_are_permutations() {
    let mut r = rng(5);
    for n in 1..=4 {
        let perms: Vec<StochasticMatrix> = permutations(n)
            .iter()
            .map(|p| StochasticMatrix::permutation(p).unwrap())
            .collect();
        // every permutation is an isometry
        for p in &perms {
            assert!(is_isometry(p, SUPPORT_TOL).isometric);
        }
        // every isometric candidate among random square matrices is one of them
        for _ in 0..2000 {
            let candidate = if r.random_bool(0.3) {
                sample::column_disjoint_isometry(&mut r, n, n)
            } else {
                sample::stochastic_matrix(&mut r, n, n, true)
            };
            if is_isometry(&candidate, SUPPORT_TOL).isometric {
                assert!(perms.iter().any(|p| p.to_rows() == candidate.to_rows()));
            }
        }
    }
}
