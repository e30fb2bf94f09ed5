//! Quantum stochastic maps in Kraus form, block isometries and their
//! stochastic left inverses.
//!
//! A [`KrausChannel`] acts as `z ↦ Σ_k K_k ẑ_k K_k†` where `ẑ_k` is `z` or,
//! for antilinear terms, its entrywise conjugate. Conjugation is how the
//! antilinear isometries enter: `U z̄ U†` is positive and trace-preserving but
//! not completely positive.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cone::{ConeElement, HermitianOperator, State};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, CMatrix};
use crate::sample;

/// Tolerance on the trace-preservation identity `Σ K†K = I`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-9;

/// Tolerance on the blueprint identities `U_k†U_l = δ_kl I`.
pub const BLUEPRINT_TOL: f64 = 1e-10;

/// Singular values above this count toward the transfer-matrix rank.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Default number of random probes for [`is_isometry_channel`].
pub const DEFAULT_ISOMETRY_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    pub matrix: CMatrix,
    /// Conjugate the input entrywise before applying `K · K†`.
    pub conjugate_input: bool,
}

impl KrausOperator {
    pub fn linear(matrix: CMatrix) -> Self {
        Self {
            matrix,
            conjugate_input: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<KrausOperator>,
}

impl KrausChannel {
    pub fn new(dim_in: usize, dim_out: usize, ops: Vec<KrausOperator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("a channel needs at least one Kraus operator".into()));
        }
        for (k, op) in ops.iter().enumerate() {
            if op.matrix.rows() != dim_out || op.matrix.cols() != dim_in {
                return Err(Error::InvalidArgument(format!(
                    "Kraus operator {k} is {}x{}, expected {dim_out}x{dim_in}",
                    op.matrix.rows(),
                    op.matrix.cols()
                )));
            }
        }
        let ch = Self { dim_in, dim_out, ops };
        let defect = ch.trace_preservation_defect();
        if defect > TRACE_PRESERVATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving (|ΣK†K − I| = {defect:e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(CMatrix::identity(d)).expect("identity is unitary")
    }

    /// `z ↦ U z U†`.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let d = u.rows();
        if !u.is_square() {
            return Err(Error::InvalidArgument("unitary must be square".into()));
        }
        Self::new(d, d, vec![KrausOperator::linear(u)])
    }

    /// `z ↦ tr(z)·I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let ops = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut m = CMatrix::zeros(d, d);
                m[(i, j)] = Complex64::new(s, 0.0);
                KrausOperator::linear(m)
            })
            .collect();
        Self::new(d, d, ops).expect("depolarizing Kraus set is trace preserving")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn ops(&self) -> &[KrausOperator] {
        &self.ops
    }

    /// `max |Σ K†K − I|` entrywise, with `K†K` conjugated for terms that
    /// conjugate their input (`tr(K z̄ K†) = tr(conj(K†K)·z)`).
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut acc = CMatrix::zeros(self.dim_in, self.dim_in);
        for op in &self.ops {
            let g = op.matrix.adjoint().matmul(&op.matrix);
            acc = acc.add(&if op.conjugate_input { g.conj() } else { g });
        }
        acc.max_abs_diff(&CMatrix::identity(self.dim_in))
    }

    fn apply_matrix(&self, z: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        let zc = z.conj();
        for op in &self.ops {
            let input = if op.conjugate_input { &zc } else { z };
            out = out.add(&op.matrix.matmul(input).matmul(&op.matrix.adjoint()));
        }
        out
    }

    pub fn apply(&self, z: &HermitianOperator) -> Result<HermitianOperator> {
        if z.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: z.dim(),
            });
        }
        Ok(HermitianOperator::hermitian_part(&self.apply_matrix(z.matrix())))
    }

    pub fn apply_state(&self, s: &State<HermitianOperator>) -> Result<State<HermitianOperator>> {
        State::new(self.apply(s)?)
    }

    /// Real matrix of the channel on Hermitian matrices, in the orthonormal
    /// basis `{E_ii, (E_ij+E_ji)/√2, i(E_ij−E_ji)/√2}`. Shape
    /// `dim_out² × dim_in²`, row-major.
    pub fn transfer_matrix(&self) -> Vec<f64> {
        let in_basis = hermitian_basis(self.dim_in);
        let out_basis = hermitian_basis(self.dim_out);
        let cols = in_basis.len();
        let mut t = vec![0.0; out_basis.len() * cols];
        for (j, b) in in_basis.iter().enumerate() {
            let image = self.apply_matrix(b);
            for (i, c) in out_basis.iter().enumerate() {
                t[i * cols + j] = c.trace_product_re(&image);
            }
        }
        t
    }
}

/// Orthonormal basis of the real space of `d × d` Hermitian matrices.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(m);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut s = CMatrix::zeros(d, d);
            s[(i, j)] = Complex64::new(r, 0.0);
            s[(j, i)] = Complex64::new(r, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(i, j)] = Complex64::new(0.0, -r);
            a[(j, i)] = Complex64::new(0.0, r);
            basis.push(a);
        }
    }
    basis
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixRepr {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixRepr {
    pub(crate) fn from_matrix(m: &CMatrix) -> Self {
        Self {
            re: m.re_rows(),
            im: m.im_rows(),
        }
    }

    pub(crate) fn to_matrix(&self) -> Result<CMatrix> {
        CMatrix::from_parts(&self.re, &self.im)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    conjugate_input: Vec<bool>,
}

impl Serialize for KrausChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conj: Vec<bool> = self.ops.iter().map(|o| o.conjugate_input).collect();
        ChannelRepr {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.ops.iter().map(|o| MatrixRepr::from_matrix(&o.matrix)).collect(),
            conjugate_input: if conj.iter().any(|&c| c) { conj } else { Vec::new() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ChannelRepr::deserialize(d)?;
        if !repr.conjugate_input.is_empty() && repr.conjugate_input.len() != repr.kraus.len() {
            return Err(D::Error::custom("conjugate_input must have one flag per Kraus operator"));
        }
        let ops = repr
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| {
                Ok(KrausOperator {
                    matrix: m.to_matrix()?,
                    conjugate_input: repr.conjugate_input.get(k).copied().unwrap_or(false),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        KrausChannel::new(repr.dim_in, repr.dim_out, ops).map_err(D::Error::custom)
    }
}

/// Data for the isometric channel `z ↦ Σ w_k U_k ẑ U_k†` where the `U_k` are
/// isometries `dim_in → dim_out` with mutually orthogonal ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryBlueprint {
    dim_in: usize,
    dim_out: usize,
    weights: Vec<f64>,
    embeddings: Vec<CMatrix>,
    antilinear: Vec<bool>,
    residual_projector: CMatrix,
}

impl IsometryBlueprint {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        weights: Vec<f64>,
        embeddings: Vec<CMatrix>,
        antilinear: Vec<bool>,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidArgument("blueprint needs at least one block".into()));
        }
        if embeddings.len() != n || antilinear.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} weights but {} embeddings and {} antilinear flags",
                embeddings.len(),
                antilinear.len()
            )));
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidArgument("weights must lie in [0, 1]".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > BLUEPRINT_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, expected 1")));
        }
        for (k, u) in embeddings.iter().enumerate() {
            if u.rows() != dim_out || u.cols() != dim_in {
                return Err(Error::InvalidArgument(format!(
                    "embedding {k} is {}x{}, expected {dim_out}x{dim_in}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        let id_in = CMatrix::identity(dim_in);
        let zero_in = CMatrix::zeros(dim_in, dim_in);
        for k in 0..n {
            for l in 0..n {
                let g = embeddings[k].adjoint().matmul(&embeddings[l]);
                let target = if k == l { &id_in } else { &zero_in };
                let dev = g.max_abs_diff(target);
                if dev > BLUEPRINT_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "U_{k}†U_{l} deviates from {} by {dev:e}",
                        if k == l { "I" } else { "0" }
                    )));
                }
            }
        }
        let mut p0 = CMatrix::identity(dim_out);
        for u in &embeddings {
            p0 = p0.sub(&u.matmul(&u.adjoint()));
        }
        Ok(Self {
            dim_in,
            dim_out,
            weights,
            embeddings,
            antilinear,
            residual_projector: p0,
        })
    }

    /// Block embeddings: `U_k` maps basis vector `i` to `k·d + i`, and
    /// `extra_dims` further dimensions form the residual block.
    pub fn block_embedding(
        dim_in: usize,
        weights: Vec<f64>,
        extra_dims: usize,
        antilinear: Vec<bool>,
    ) -> Result<Self> {
        let n = weights.len();
        let dim_out = n * dim_in + extra_dims;
        let embeddings = (0..n)
            .map(|k| {
                CMatrix::from_fn(dim_out, dim_in, |r, c| {
                    if r == k * dim_in + c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self::new(dim_in, dim_out, weights, embeddings, antilinear)
    }

    /// Replaces every `U_k` by `W·U_k` for a unitary `W` on the output space.
    pub fn rotated(&self, w: &CMatrix) -> Result<Self> {
        let embeddings = self.embeddings.iter().map(|u| w.matmul(u)).collect();
        Self::new(
            self.dim_in,
            self.dim_out,
            self.weights.clone(),
            embeddings,
            self.antilinear.clone(),
        )
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn embeddings(&self) -> &[CMatrix] {
        &self.embeddings
    }

    pub fn antilinear(&self) -> &[bool] {
        &self.antilinear
    }

    pub fn residual_projector(&self) -> &CMatrix {
        &self.residual_projector
    }

    pub fn block_projector(&self, k: usize) -> CMatrix {
        let u = &self.embeddings[k];
        u.matmul(&u.adjoint())
    }
}

#[derive(Serialize, Deserialize)]
struct BlueprintRepr {
    dim_in: usize,
    dim_out: usize,
    weights: Vec<f64>,
    embeddings: Vec<MatrixRepr>,
    #[serde(default)]
    antilinear: Vec<bool>,
}

impl Serialize for IsometryBlueprint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlueprintRepr {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            weights: self.weights.clone(),
            embeddings: self.embeddings.iter().map(MatrixRepr::from_matrix).collect(),
            antilinear: self.antilinear.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsometryBlueprint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = BlueprintRepr::deserialize(d)?;
        let embeddings = repr
            .embeddings
            .iter()
            .map(MatrixRepr::to_matrix)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let antilinear = if repr.antilinear.is_empty() {
            vec![false; repr.weights.len()]
        } else {
            repr.antilinear
        };
        IsometryBlueprint::new(repr.dim_in, repr.dim_out, repr.weights, embeddings, antilinear)
            .map_err(D::Error::custom)
    }
}

/// Kraus form `√w_k·U_k` of the blueprint channel.
pub fn build_isometric_channel(b: &IsometryBlueprint) -> Result<KrausChannel> {
    let ops = b
        .embeddings
        .iter()
        .zip(&b.weights)
        .zip(&b.antilinear)
        .map(|((u, &w), &anti)| KrausOperator {
            matrix: u.scale(w.sqrt()),
            conjugate_input: anti,
        })
        .collect();
    KrausChannel::new(b.dim_in, b.dim_out, ops)
}

/// Stochastic left inverse of the blueprint channel:
///
/// ```text
/// Ψ(z) = Σ_k U_k† P_k z P_k U_k + tr(P₀ z P₀)·σ₀
/// ```
///
/// Antilinear blocks are undone by conjugating after compression. The
/// residual block vanishes on the range of the channel and is sent to the
/// fixed state `σ₀` so that `Ψ` stays trace preserving.
pub fn build_inverse_channel(b: &IsometryBlueprint, sigma0: &State<HermitianOperator>) -> Result<KrausChannel> {
    if sigma0.dim() != b.dim_in {
        return Err(Error::DimensionMismatch {
            expected: b.dim_in,
            found: sigma0.dim(),
        });
    }
    let mut ops: Vec<KrausOperator> = b
        .embeddings
        .iter()
        .zip(&b.antilinear)
        .map(|(u, &anti)| {
            if anti {
                // conj(U† z U) = Uᵀ z̄ Ū
                KrausOperator {
                    matrix: u.transpose(),
                    conjugate_input: true,
                }
            } else {
                KrausOperator::linear(u.adjoint())
            }
        })
        .collect();

    let p0 = HermitianOperator::hermitian_part(&b.residual_projector).eigen()?;
    let residual_basis: Vec<Vec<Complex64>> = (0..b.dim_out)
        .filter(|&k| p0.values[k] > 0.5)
        .map(|k| p0.vector(k))
        .collect();
    if !residual_basis.is_empty() {
        let s = sigma0.eigen()?;
        for (i, &weight) in s.values.iter().enumerate() {
            if weight <= 0.0 {
                continue;
            }
            let phi: Vec<Complex64> = s.vector(i).iter().map(|z| z * weight.sqrt()).collect();
            for e in &residual_basis {
                ops.push(KrausOperator::linear(CMatrix::outer(&phi, e)));
            }
        }
    }
    KrausChannel::new(b.dim_out, b.dim_in, ops)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityReport {
    pub surjective: bool,
    pub rank: usize,
    /// `dim_out²`, the rank a surjective map needs.
    pub target_rank: usize,
}

/// Surjectivity onto the Hermitian matrices, decided by the numerical rank of
/// the transfer matrix. Maps between spaces of different dimension are
/// reported as not surjective; their rank is still computed.
pub fn is_surjective(ch: &KrausChannel) -> Result<SurjectivityReport> {
    let t = ch.transfer_matrix();
    let rows = ch.dim_out * ch.dim_out;
    let cols = ch.dim_in * ch.dim_in;
    let rank = numerical_rank(&t, rows, cols, RANK_THRESHOLD)?;
    Ok(SurjectivityReport {
        surjective: ch.dim_in == ch.dim_out && rank == rows,
        rank,
        target_rank: rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ChannelIsometryVerdict {
    /// Every probe preserved the trace norm; statistical evidence only.
    Isometric { samples: usize },
    /// A certified disproof.
    NotIsometric {
        witness: HermitianOperator,
        norm_in: f64,
        norm_out: f64,
        /// `tr(Φ(z₊)·Φ(z₋))`.
        overlap: f64,
    },
}

impl ChannelIsometryVerdict {
    pub fn is_isometric(&self) -> bool {
        matches!(self, ChannelIsometryVerdict::Isometric { .. })
    }
}

/// Randomized isometry test: for `samples` random Hermitian `z`, checks that
/// the images of `z₊` and `z₋` stay orthogonal and `‖Φz‖₁ = ‖z‖₁`, both to
/// `tol` relative to the input size.
pub fn is_isometry_channel(ch: &KrausChannel, samples: usize, seed: u64, tol: f64) -> Result<ChannelIsometryVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let z = sample::hermitian(&mut rng, ch.dim_in);
        let dec = z.minimal_decomposition()?;
        let fp = ch.apply(&dec.positive)?;
        let fm = ch.apply(&dec.negative)?;
        let overlap = fp.overlap(&fm)?;
        let norm_in = z.one_norm()?;
        let norm_out = ch.apply(&z)?.one_norm()?;
        let scale = norm_in.max(1.0);
        if (norm_out - norm_in).abs() > tol * scale || overlap > tol * scale * scale {
            return Ok(ChannelIsometryVerdict::NotIsometric {
                witness: z,
                norm_in,
                norm_out,
                overlap,
            });
        }
    }
    Ok(ChannelIsometryVerdict::Isometric { samples })
}

/// `tr(x²)`; equals 1 exactly for pure states.
pub fn purity(x: &State<HermitianOperator>) -> f64 {
    let f = x.matrix().frobenius();
    f * f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block() -> IsometryBlueprint {
        IsometryBlueprint::block_embedding(2, vec![0.5, 0.5], 0, vec![false, false]).unwrap()
    }

    #[test]
    fn identity_and_swap() {
        let z = sample::hermitian(&mut ChaCha8Rng::seed_from_u64(3), 3);
        let out = KrausChannel::identity(3).apply(&z).unwrap();
        assert!(out.matrix().max_abs_diff(z.matrix()) < 1e-15);

        let swap = CMatrix::from_fn(2, 2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
        let ch = KrausChannel::unitary(swap).unwrap();
        let out = ch.apply(&HermitianOperator::from_real_diag(&[1.0, 0.0]).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(&CMatrix::from_real_diag(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn blueprint_image_of_ground_state() {
        let ch = build_isometric_channel(&two_block()).unwrap();
        let out = ch.apply(&State::<HermitianOperator>::basis(2, 0)).unwrap();
        let expected = CMatrix::from_real_diag(&[0.5, 0.0, 0.5, 0.0]);
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn blueprint_is_block_direct_sum() {
        let b = two_block();
        let ch = build_isometric_channel(&b).unwrap();
        let z = sample::hermitian(&mut ChaCha8Rng::seed_from_u64(9), 2);
        let out = ch.apply(&z).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i / 2 == j / 2 {
                    z.matrix()[(i % 2, j % 2)] * 0.5
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((out.matrix()[(i, j)] - expected).norm() < 1e-15);
            }
        }
        assert!((out.one_norm().unwrap() - z.one_norm().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn invalid_blueprints() {
        assert!(IsometryBlueprint::block_embedding(2, vec![0.5, 0.6], 0, vec![false; 2]).is_err());
        let u = CMatrix::from_fn(3, 2, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        // two copies of the same embedding do not have orthogonal ranges
        assert!(IsometryBlueprint::new(2, 3, vec![0.5, 0.5], vec![u.clone(), u], vec![false; 2]).is_err());
    }

    #[test]
    fn inverse_on_residual_block() {
        let b = IsometryBlueprint::block_embedding(2, vec![0.5, 0.5], 2, vec![false, false]).unwrap();
        let sigma = State::<HermitianOperator>::maximally_mixed(2);
        let psi = build_inverse_channel(&b, &sigma).unwrap();
        // z supported on the last two basis vectors
        let z = HermitianOperator::from_real_rows(&[
            vec![0.0; 6],
            vec![0.0; 6],
            vec![0.0; 6],
            vec![0.0; 6],
            vec![0.0, 0.0, 0.0, 0.0, 0.7, 0.2],
            vec![0.0, 0.0, 0.0, 0.0, 0.2, 0.3],
        ])
        .unwrap();
        let out = psi.apply(&z).unwrap();
        assert!(out.matrix().max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 1e-12);
    }

    #[test]
    fn unitary_inverse_is_adjoint_conjugation() {
        let u = crate::linalg::random_unitary(3, &mut ChaCha8Rng::seed_from_u64(4));
        let b = IsometryBlueprint::new(3, 3, vec![1.0], vec![u.clone()], vec![false]).unwrap();
        assert!(b.residual_projector().max_abs() < 1e-12);
        let psi = build_inverse_channel(&b, &State::maximally_mixed(3)).unwrap();
        assert_eq!(psi.ops().len(), 1);
        assert!(psi.ops()[0].matrix.max_abs_diff(&u.adjoint()) < 1e-15);
    }

    #[test]
    fn surjectivity_examples() {
        let u = crate::linalg::random_unitary(3, &mut ChaCha8Rng::seed_from_u64(8));
        let r = is_surjective(&KrausChannel::unitary(u).unwrap()).unwrap();
        assert!(r.surjective);
        assert_eq!(r.rank, 9);
        let r = is_surjective(&build_isometric_channel(&two_block()).unwrap()).unwrap();
        assert!(!r.surjective);
        assert_eq!((r.rank, r.target_rank), (4, 16));
        let r = is_surjective(&KrausChannel::completely_depolarizing(3)).unwrap();
        assert!(!r.surjective);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn depolarizing_kills_traceless_input() {
        let ch = KrausChannel::completely_depolarizing(2);
        let z = HermitianOperator::from_real_diag(&[1.0, -1.0]).unwrap();
        assert!(ch.apply(&z).unwrap().one_norm().unwrap() < 1e-15);
        let v = is_isometry_channel(&ch, 10, 1, 1e-9).unwrap();
        assert!(!v.is_isometric());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&State::<HermitianOperator>::basis(2, 0)) - 1.0).abs() < 1e-15);
        assert!((purity(&State::maximally_mixed(2)) - 0.5).abs() < 1e-15);
        let b = IsometryBlueprint::block_embedding(2, vec![0.25; 4], 0, vec![false; 4]).unwrap();
        let ch = build_isometric_channel(&b).unwrap();
        let out = ch.apply_state(&State::<HermitianOperator>::basis(2, 1)).unwrap();
        assert!((purity(&out) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn antilinear_block_inverts() {
        let b = IsometryBlueprint::block_embedding(2, vec![0.3, 0.7], 1, vec![true, false]).unwrap();
        let phi = build_isometric_channel(&b).unwrap();
        let psi = build_inverse_channel(&b, &State::maximally_mixed(2)).unwrap();
        let z = sample::hermitian(&mut ChaCha8Rng::seed_from_u64(12), 2);
        let back = psi.apply(&phi.apply(&z).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(z.matrix()) < 1e-12);
    }

    #[test]
    fn channel_json_round_trip() {
        let b = IsometryBlueprint::block_embedding(1, vec![0.5, 0.5], 0, vec![true, false]).unwrap();
        let ch = build_isometric_channel(&b).unwrap();
        let s = serde_json::to_string(&ch).unwrap();
        assert!(s.contains("\"conjugate_input\":[true,false]"));
        let back: KrausChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
        let bad = r#"{"dim_in":1,"dim_out":1,"kraus":[{"re":[[0.5]],"im":[[0.0]]}]}"#;
        assert!(serde_json::from_str::<KrausChannel>(bad).is_err());
    }
}
