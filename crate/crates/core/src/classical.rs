//! Classical stochastic maps as column-stochastic matrices.
//!
//! Entry `(i, j)` is the fraction of mass moved from source bin `j` to target
//! bin `i`, so states are column vectors and application is `Φ·z`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cone::{ConeElement, SignedMeasure, State};
use crate::error::{Error, Result};
use crate::mixdist::{self, DominanceVerdict};
use crate::transport::{self, TransportCertificate};

/// Entries above this value count as part of a column's support.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Default tolerance for nonnegativity and unit column sums.
pub const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

/// Result of [`verify_stochastic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticCheck {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Checks a row-major matrix for nonnegative entries and unit column sums.
pub fn verify_stochastic(m: &[Vec<f64>], tol: f64) -> StochasticCheck {
    let mut diagnostics = Vec::new();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        diagnostics.push("matrix is empty".to_string());
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            diagnostics.push(format!("row {i} has {} entries, expected {cols}", row.len()));
        }
    }
    if diagnostics.is_empty() {
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    diagnostics.push(format!("entry ({i},{j}) is not finite"));
                } else if v < -tol {
                    diagnostics.push(format!("entry ({i},{j}) = {v} is negative"));
                }
            }
        }
        for j in 0..cols {
            let s: f64 = m.iter().map(|row| row[j]).sum();
            if (s - 1.0).abs() > tol {
                diagnostics.push(format!("column {j} sums to {s}"));
            }
        }
    }
    StochasticCheck {
        valid: diagnostics.is_empty(),
        diagnostics,
    }
}

impl StochasticMatrix {
    /// Validates with [`STOCHASTIC_TOL`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(rows, STOCHASTIC_TOL)
    }

    pub fn with_tolerance(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let check = verify_stochastic(&rows, tol);
        if !check.valid {
            return Err(Error::InvalidArgument(check.diagnostics.join("; ")));
        }
        let r = rows.len();
        let c = rows[0].len();
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidArgument("columns of unequal length".into()));
        }
        Self::new((0..rows).map(|i| (0..cols).map(|j| columns[j][i]).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::permutation(&(0..n).collect::<Vec<_>>()).expect("identity is a permutation")
    }

    /// Sends source bin `j` to target bin `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
        }
        let mut entries = vec![0.0; n * n];
        for (j, &i) in perm.iter().enumerate() {
            entries[i * n + j] = 1.0;
        }
        Ok(Self {
            rows: n,
            cols: n,
            entries,
        })
    }

    /// Every column equal to the uniform distribution.
    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![1.0 / rows as f64; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Rows where column `j` exceeds [`SUPPORT_TOL`].
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j) > SUPPORT_TOL).collect()
    }

    /// `Φ·z`.
    pub fn apply(&self, z: &SignedMeasure) -> Result<SignedMeasure> {
        if z.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: z.dim(),
            });
        }
        let w = z.weights();
        SignedMeasure::new(
            self.entries
                .chunks(self.cols)
                .map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn apply_state(&self, s: &State<SignedMeasure>) -> Result<State<SignedMeasure>> {
        State::new(self.apply(s)?)
    }

    /// `self ∘ inner`, i.e. the product `self · inner`.
    pub fn compose(&self, inner: &StochasticMatrix) -> Result<StochasticMatrix> {
        if inner.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: inner.rows,
            });
        }
        let mut entries = vec![0.0; self.rows * inner.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..inner.cols {
                    entries[i * inner.cols + j] += a * inner.get(k, j);
                }
            }
        }
        Ok(StochasticMatrix {
            rows: self.rows,
            cols: inner.cols,
            entries,
        })
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self { rows, cols, entries }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StochasticMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(serde::de::Error::custom(format!(
                "entries do not form a {}x{} matrix",
                repr.rows, repr.cols
            )));
        }
        StochasticMatrix::new(repr.entries).map_err(serde::de::Error::custom)
    }
}

/// Outcome of [`is_isometry`]; `witness_columns` names the first pair of
/// columns (0-based) whose supports overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub isometric: bool,
    pub witness_columns: Option<(usize, usize)>,
}

/// A stochastic matrix preserves the 1-norm iff its columns have pairwise
/// disjoint supports. `tol` is the support threshold.
pub fn is_isometry(phi: &StochasticMatrix, tol: f64) -> IsometryCheck {
    let supports: Vec<Vec<bool>> = (0..phi.cols)
        .map(|j| (0..phi.rows).map(|i| phi.get(i, j) > tol).collect())
        .collect();
    for j in 0..phi.cols {
        for k in (j + 1)..phi.cols {
            if supports[j].iter().zip(&supports[k]).any(|(a, b)| *a && *b) {
                return IsometryCheck {
                    isometric: false,
                    witness_columns: Some((j, k)),
                };
            }
        }
    }
    IsometryCheck {
        isometric: true,
        witness_columns: None,
    }
}

/// Left inverse of an isometric stochastic matrix on its range: each target
/// row is aggregated back to the source bin whose column it supports.
///
/// Rows outside every column support are not in the range; their columns in
/// the inverse are zero and listed in `uncovered_rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeInverse {
    /// `cols(Φ) × rows(Φ)`, row-major.
    pub entries: Vec<Vec<f64>>,
    pub uncovered_rows: Vec<usize>,
}

impl RangeInverse {
    pub fn apply(&self, z: &SignedMeasure) -> Result<SignedMeasure> {
        let m = self.entries.first().map_or(0, Vec::len);
        if z.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: z.dim(),
            });
        }
        SignedMeasure::new(
            self.entries
                .iter()
                .map(|row| row.iter().zip(z.weights()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Completes the partial inverse to a stochastic matrix on the whole
    /// target space by routing uncovered rows to `fallback_bin`.
    pub fn to_stochastic(&self, fallback_bin: usize) -> Result<StochasticMatrix> {
        let n = self.entries.len();
        if fallback_bin >= n {
            return Err(Error::InvalidArgument(format!(
                "fallback bin {fallback_bin} outside 0..{n}"
            )));
        }
        let mut rows = self.entries.clone();
        for &r in &self.uncovered_rows {
            rows[fallback_bin][r] = 1.0;
        }
        StochasticMatrix::new(rows)
    }
}

pub fn inverse_on_range(phi: &StochasticMatrix) -> Result<RangeInverse> {
    let check = is_isometry(phi, SUPPORT_TOL);
    if let Some((j, k)) = check.witness_columns {
        return Err(Error::InvalidArgument(format!(
            "map is not isometric: columns {j} and {k} overlap"
        )));
    }
    let mut entries = vec![vec![0.0; phi.rows]; phi.cols];
    let mut covered = vec![false; phi.rows];
    for (j, row) in entries.iter_mut().enumerate() {
        for i in phi.column_support(j) {
            row[i] = 1.0;
            covered[i] = true;
        }
    }
    let uncovered_rows = (0..phi.rows).filter(|&i| !covered[i]).collect();
    Ok(RangeInverse {
        entries,
        uncovered_rows,
    })
}

/// Evidence that a stochastic matrix cannot be undone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreversibilityWitness {
    /// The overlapping columns `(j, k)`; the witness pair is `(δ_j, δ_k)`.
    pub columns: (usize, usize),
    pub x: State<SignedMeasure>,
    pub y: State<SignedMeasure>,
    /// `d[Φx/Φy] ≻ d[x/y]`, which fails.
    pub dominance: DominanceVerdict,
    /// LP search for a map sending `(Φx, Φy)` back to `(x, y)`; present when
    /// the dimensions are within [`transport::MAX_DIM`].
    pub transport_back: Option<TransportCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Reversibility {
    Reversible { inverse: RangeInverse },
    Irreversible { witness: IrreversibilityWitness },
}

impl Reversibility {
    pub fn is_reversible(&self) -> bool {
        matches!(self, Reversibility::Reversible { .. })
    }
}

/// A stochastic matrix is reversible iff it is an isometry. Irreversible maps
/// get the point-mass pair on the lowest overlapping columns as witness.
pub fn classify_reversible(phi: &StochasticMatrix, tol: f64) -> Result<Reversibility> {
    let check = is_isometry(phi, tol);
    let Some((j, k)) = check.witness_columns else {
        return Ok(Reversibility::Reversible {
            inverse: inverse_on_range(phi)?,
        });
    };
    let n = phi.cols;
    let x = State::point_mass(n, j);
    let y = State::point_mass(n, k);
    let fx = phi.apply_state(&x)?;
    let fy = phi.apply_state(&y)?;
    let dominance = mixdist::dominates((&fx, &fy), (&x, &y), mixdist::DEFAULT_TOL)?;
    let transport_back = if phi.rows.max(phi.cols) <= transport::MAX_DIM {
        Some(transport::find_transport(&fx, &fy, &x, &y)?)
    } else {
        None
    };
    Ok(Reversibility::Irreversible {
        witness: IrreversibilityWitness {
            columns: (j, k),
            x,
            y,
            dominance,
            transport_back,
        },
    })
}
