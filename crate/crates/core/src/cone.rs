//! Measure-cone substrate for finite classical and quantum state spaces.
//!
//! A cone element carries a linear *charge* (total mass or trace), a 1-norm
//! (total variation or trace norm) and a unique minimal decomposition
//! `z = z₊ − z₋` into mutually orthogonal positive parts. The two concrete
//! realizations are [`SignedMeasure`] (weights over a finite index set) and
//! [`HermitianOperator`] (finite Hermitian matrices).

use std::fmt;
use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, HermitianEigen};

/// Tolerances shared by the cone checks.
pub mod tol {
    /// Maximum `|a_ij − conj(a_ji)|` accepted for a Hermitian operator.
    pub const HERMITIAN: f64 = 1e-10;
    /// Positivity and unit-charge checks on states.
    pub const STATE: f64 = 1e-9;
    /// Eigenvalues below this magnitude belong to neither decomposition part.
    pub const ZERO_EIGENVALUE: f64 = 1e-12;
}

/// Two elements with their positive and negative parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalDecomposition<E> {
    pub positive: E,
    pub negative: E,
}

/// Operations every realization of the measure cone provides.
pub trait ConeElement: Clone + fmt::Debug + Sized {
    fn dim(&self) -> usize;

    /// The charge functional: sum of weights or trace.
    fn charge(&self) -> f64;

    /// Total variation norm (classical) or trace norm (quantum).
    fn one_norm(&self) -> Result<f64>;

    fn minimal_decomposition(&self) -> Result<MinimalDecomposition<Self>>;

    fn is_positive(&self, tol: f64) -> Result<bool>;

    /// `a·x + b·y`.
    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self>;

    /// `Σ xᵢyᵢ` classically, `tr(x·y)` quantumly.
    fn overlap(&self, other: &Self) -> Result<f64>;

    /// Orthogonality of two positive elements: disjoint supports or
    /// orthogonal ranges, up to `tol`.
    fn orthogonal_within(&self, other: &Self, tol: f64) -> Result<bool>;

    /// Exact kink locations `t ∈ (0, 1)` of `t ↦ ‖t·x − (1−t)·y‖₁`, when that
    /// function is piecewise linear. `None` means no finite kink set exists.
    fn mixing_kinks(x: &Self, y: &Self) -> Option<Vec<f64>>;
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Real weights over a finite index set.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    weights: Vec<f64>,
}

impl SignedMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("a signed measure needs at least one bin".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight {i} is not finite")));
        }
        Ok(Self { weights })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim.max(1)],
        }
    }

    pub fn point_mass(dim: usize, k: usize) -> Self {
        assert!(k < dim, "point mass index out of range");
        let mut weights = vec![0.0; dim];
        weights[k] = 1.0;
        Self { weights }
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

impl ConeElement for SignedMeasure {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn charge(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn one_norm(&self) -> Result<f64> {
        Ok(self.weights.iter().map(|w| w.abs()).sum())
    }

    fn minimal_decomposition(&self) -> Result<MinimalDecomposition<Self>> {
        let positive = self.weights.iter().map(|&w| w.max(0.0)).collect();
        let negative = self.weights.iter().map(|&w| (-w).max(0.0)).collect();
        Ok(MinimalDecomposition {
            positive: Self { weights: positive },
            negative: Self { weights: negative },
        })
    }

    fn is_positive(&self, tol: f64) -> Result<bool> {
        Ok(self.weights.iter().all(|&w| w >= -tol))
    }

    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self> {
        check_dims(x.dim(), y.dim())?;
        Ok(Self {
            weights: x
                .weights
                .iter()
                .zip(&y.weights)
                .map(|(p, q)| a * p + b * q)
                .collect(),
        })
    }

    fn overlap(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.weights.iter().zip(&other.weights).map(|(a, b)| a * b).sum())
    }

    fn orthogonal_within(&self, other: &Self, tol: f64) -> Result<bool> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .all(|(a, b)| a * b <= tol))
    }

    fn mixing_kinks(x: &Self, y: &Self) -> Option<Vec<f64>> {
        let mut kinks: Vec<f64> = x
            .weights
            .iter()
            .zip(&y.weights)
            .filter_map(|(&xi, &yi)| {
                let s = xi + yi;
                if s == 0.0 {
                    return None;
                }
                let t = yi / s;
                (t > 0.0 && t < 1.0).then_some(t)
            })
            .collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        Some(kinks)
    }
}

#[derive(Serialize, Deserialize)]
struct SignedMeasureRepr {
    dim: usize,
    weights: Vec<f64>,
}

impl Serialize for SignedMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignedMeasureRepr {
            dim: self.dim(),
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SignedMeasureRepr::deserialize(d)?;
        if repr.dim != repr.weights.len() {
            return Err(serde::de::Error::custom(format!(
                "dim {} does not match {} weights",
                repr.dim,
                repr.weights.len()
            )));
        }
        SignedMeasure::new(repr.weights).map_err(serde::de::Error::custom)
    }
}

/// A finite Hermitian matrix.
///
/// The stored matrix is exactly Hermitian: inputs within
/// [`tol::HERMITIAN`] of Hermitian are symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "Hermitian operator must be square and nonempty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let deviation = matrix.hermitian_defect();
        if deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(&matrix))
    }

    fn symmetrized(m: &CMatrix) -> Self {
        Self {
            matrix: m.add(&m.adjoint()).scale(0.5),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diag(diag))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let zeros: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::new(CMatrix::from_parts(rows, &zeros)?)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        let n = crate::linalg::norm(psi);
        if n == 0.0 {
            return Err(Error::InvalidArgument("zero vector has no projector".into()));
        }
        let u: Vec<Complex64> = psi.iter().map(|z| z / n).collect();
        Ok(Self::symmetrized(&CMatrix::outer(&u, &u)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        hermitian_eigen(&self.matrix)
    }

    /// Builds from any square matrix by taking its Hermitian part, skipping
    /// the tolerance check. Used for outputs of maps known to preserve
    /// Hermiticity up to rounding.
    pub(crate) fn hermitian_part(m: &CMatrix) -> Self {
        Self::symmetrized(m)
    }

    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        Self::combine(1.0, self, -1.0, other)?.one_norm()
    }
}

impl ConeElement for HermitianOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn charge(&self) -> f64 {
        self.matrix.trace().re
    }

    fn one_norm(&self) -> Result<f64> {
        Ok(self.eigen()?.values.iter().map(|l| l.abs()).sum())
    }

    fn minimal_decomposition(&self) -> Result<MinimalDecomposition<Self>> {
        let eig = self.eigen()?;
        let positive = eig.spectral_map(|l| if l > tol::ZERO_EIGENVALUE { l } else { 0.0 });
        let negative = eig.spectral_map(|l| if l < -tol::ZERO_EIGENVALUE { -l } else { 0.0 });
        Ok(MinimalDecomposition {
            positive: Self::symmetrized(&positive),
            negative: Self::symmetrized(&negative),
        })
    }

    fn is_positive(&self, tol: f64) -> Result<bool> {
        Ok(self.eigen()?.values.first().is_none_or(|&l| l >= -tol))
    }

    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self> {
        check_dims(x.dim(), y.dim())?;
        Ok(Self {
            matrix: x.matrix.scale(a).add(&y.matrix.scale(b)),
        })
    }

    fn overlap(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.matrix.trace_product_re(&other.matrix))
    }

    fn orthogonal_within(&self, other: &Self, tol: f64) -> Result<bool> {
        let scale = self.one_norm()? * other.one_norm()?;
        Ok(self.overlap(other)? <= tol * scale)
    }

    fn mixing_kinks(_x: &Self, _y: &Self) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Serialize, Deserialize)]
struct HermitianRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HermitianRepr {
            dim: self.dim(),
            re: self.matrix.re_rows(),
            im: self.matrix.im_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = HermitianRepr::deserialize(d)?;
        let m = CMatrix::from_parts(&repr.re, &repr.im).map_err(serde::de::Error::custom)?;
        if m.rows() != repr.dim || m.cols() != repr.dim {
            return Err(serde::de::Error::custom(format!(
                "dim {} does not match a {}x{} matrix",
                repr.dim,
                m.rows(),
                m.cols()
            )));
        }
        HermitianOperator::new(m).map_err(serde::de::Error::custom)
    }
}

/// A normalized positive element: probability vector or density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct State<E>(E);

impl<E: ConeElement> State<E> {
    pub fn new(body: E) -> Result<Self> {
        if !body.is_positive(tol::STATE)? {
            return Err(Error::NotAState("element is not positive".into()));
        }
        let charge = body.charge();
        if (charge - 1.0).abs() > tol::STATE {
            return Err(Error::NotAState(format!("charge is {charge}, expected 1")));
        }
        Ok(Self(body))
    }

    /// Rescales a positive element of nonzero charge to unit charge.
    pub fn normalized(body: E) -> Result<Self> {
        let charge = body.charge();
        if charge <= 0.0 {
            return Err(Error::NotAState(format!("charge {charge} cannot be normalized")));
        }
        Self::new(E::combine(1.0 / charge, &body, 0.0, &body)?)
    }

    pub fn into_inner(self) -> E {
        self.0
    }
}

impl<E> Deref for State<E> {
    type Target = E;
    fn deref(&self) -> &E {
        &self.0
    }
}

impl<E> AsRef<E> for State<E> {
    fn as_ref(&self) -> &E {
        &self.0
    }
}

impl State<SignedMeasure> {
    pub fn point_mass(dim: usize, k: usize) -> Self {
        Self(SignedMeasure::point_mass(dim, k))
    }

    pub fn uniform(dim: usize) -> Self {
        Self(SignedMeasure::uniform(dim))
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Self::new(SignedMeasure::new(weights)?)
    }
}

impl State<HermitianOperator> {
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Ok(Self(HermitianOperator::projector(psi)?))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        psi[k] = Complex64::new(1.0, 0.0);
        Self(HermitianOperator::projector(&psi).expect("basis vector is nonzero"))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianOperator::hermitian_part(
            &CMatrix::identity(dim).scale(1.0 / dim as f64),
        ))
    }
}

impl<E: Serialize> Serialize for State<E> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de, E: ConeElement + Deserialize<'de>> Deserialize<'de> for State<E> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        State::new(E::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Orthogonality `x ⊥₁ y` of two nonzero positive elements: maximal mixing
/// distance, equivalently disjoint supports or orthogonal ranges.
pub fn is_orthogonal<E: ConeElement>(x: &E, y: &E, tol: f64) -> Result<bool> {
    if x.one_norm()? == 0.0 || y.one_norm()? == 0.0 {
        return Err(Error::InvalidArgument("orthogonality needs nonzero elements".into()));
    }
    x.orthogonal_within(y, tol)
}
