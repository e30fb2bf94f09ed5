//! Seeded random generators for states, signed elements and maps.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::classical::StochasticMatrix;
use crate::cone::{HermitianOperator, SignedMeasure, State};
use crate::linalg::CMatrix;

/// Flat-Dirichlet probability vector. With `sparse`, each bin is zeroed with
/// probability 1/3 (at least one bin survives).
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, sparse: bool) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..dim)
            .map(|_| {
                if sparse && rng.random_bool(1.0 / 3.0) {
                    0.0
                } else {
                    rng.sample::<f64, _>(Exp1)
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            w.iter_mut().for_each(|v| *v /= s);
            return w;
        }
    }
}

pub fn classical_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State<SignedMeasure> {
    let sparse = rng.random_bool(0.25);
    State::from_weights(probability_vector(rng, dim, sparse)).expect("normalized probability vector")
}

pub fn signed_measure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SignedMeasure {
    SignedMeasure::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).expect("finite weights")
}

pub fn positive_measure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SignedMeasure {
    let scale: f64 = rng.random_range(0.1..3.0);
    let sparse = rng.random_bool(0.25);
    let w = probability_vector(rng, dim, sparse);
    SignedMeasure::new(w.into_iter().map(|v| v * scale).collect()).expect("finite weights")
}

/// Column-stochastic matrix with Dirichlet columns; `sparse` zeroes entries
/// at random.
pub fn stochastic_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sparse: bool) -> StochasticMatrix {
    let columns: Vec<Vec<f64>> = (0..cols).map(|_| probability_vector(rng, rows, sparse)).collect();
    StochasticMatrix::from_columns(&columns).expect("Dirichlet columns are stochastic")
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Stochastic isometry `cols → rows` with randomly split, disjoint column
/// supports. Needs `rows ≥ cols`.
pub fn column_disjoint_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> StochasticMatrix {
    assert!(rows >= cols, "an isometry needs at least as many rows as columns");
    let targets = permutation(rng, rows);
    // each column owns at least one target row; the rest are dealt out
    let mut owner: Vec<usize> = (0..rows).map(|k| if k < cols { k } else { rng.random_range(0..cols) }).collect();
    owner.shuffle(rng);
    let mut columns = vec![vec![0.0; rows]; cols];
    for (k, &row) in targets.iter().enumerate() {
        columns[owner[k]][row] = rng.random_range(0.05..1.0);
    }
    for col in columns.iter_mut() {
        let s: f64 = col.iter().sum();
        col.iter_mut().for_each(|v| *v /= s);
    }
    StochasticMatrix::from_columns(&columns).expect("normalized columns")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    HermitianOperator::new(g.add(&g.adjoint()).scale(0.5)).expect("symmetrized matrix is Hermitian")
}

/// Random density matrix `G G† / tr(G G†)` with a rank between 1 and `dim`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State<HermitianOperator> {
    let rank = rng.random_range(1..=dim);
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    State::new(HermitianOperator::new(rho.scale(1.0 / tr)).expect("G G† is Hermitian"))
        .expect("normalized positive matrix")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State<HermitianOperator> {
    let psi: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    State::pure(&psi).expect("Gaussian vector is nonzero")
}
