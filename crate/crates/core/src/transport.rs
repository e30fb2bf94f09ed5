//! Pair transport: does one stochastic matrix send `(x, y)` to `(x′, y′)`?
//!
//! The question is an LP feasibility problem over the `m·n` entries of `Φ`:
//!
//! ```text
//! Φ ≥ 0,   Σᵢ Φᵢⱼ = 1 (every column j),   Φ·x = x′,   Φ·y = y′
//! ```
//!
//! For finite classical spaces feasibility is equivalent to dominance of the
//! mixing distances, `d[x/y] ≻ d[x′/y′]`; [`check_rss_equivalence`] computes
//! both sides independently and reports whether they agree.

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{verify_stochastic, StochasticMatrix, STOCHASTIC_TOL};
use crate::cone::{SignedMeasure, State};
use crate::error::{Error, Result};
use crate::mixdist::{self, DominanceVerdict};
use crate::sample;
use crate::simplex::{self, find_feasible, LpOutcome, LpScalar};

/// Largest dimension accepted for either side of a transport problem.
pub const MAX_DIM: usize = 16;

/// Bound on `‖Φx − x′‖₁` and `‖Φy − y′‖₁` for an accepted transport.
pub const SOUNDNESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpMode {
    /// `f64` simplex, equalities met to 1e-9.
    #[default]
    Float,
    /// Rational simplex on the decimal values of the inputs.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceWitness {
    pub t: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportCertificate {
    pub feasible: bool,
    pub transport: Option<StochasticMatrix>,
    /// `max(‖Φx − x′‖₁, ‖Φy − y′‖₁)` of the returned transport.
    pub residual: Option<f64>,
    /// Farkas multipliers proving infeasibility, ordered as
    /// (column sums, `Φx = x′` rows, `Φy = y′` rows).
    pub farkas: Option<Vec<f64>>,
    pub dominance_witness: Option<DominanceWitness>,
}

type Lp = (Vec<Vec<f64>>, Vec<f64>);

/// Constraint system for the transport LP. Variable `Φᵢⱼ` has index `i·n + j`.
pub fn transport_lp(x: &[f64], y: &[f64], xp: &[f64], yp: &[f64]) -> Lp {
    let n = x.len();
    let m = xp.len();
    let nv = m * n;
    let mut a = Vec::with_capacity(n + 2 * m);
    let mut b = Vec::with_capacity(n + 2 * m);
    for j in 0..n {
        let mut row = vec![0.0; nv];
        for i in 0..m {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(1.0);
    }
    for (src, dst) in [(x, xp), (y, yp)] {
        for i in 0..m {
            let mut row = vec![0.0; nv];
            row[i * n..(i + 1) * n].copy_from_slice(src);
            a.push(row);
            b.push(dst[i]);
        }
    }
    (a, b)
}

fn check_dims(x: &SignedMeasure, y: &SignedMeasure, xp: &SignedMeasure, yp: &SignedMeasure) -> Result<()> {
    use crate::cone::ConeElement;
    let (n, m) = (x.dim(), xp.dim());
    for d in [n, m] {
        if d > MAX_DIM {
            return Err(Error::DimensionBound { dim: d, max: MAX_DIM });
        }
    }
    if y.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.dim(),
        });
    }
    if yp.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: yp.dim(),
        });
    }
    Ok(())
}

pub fn find_transport(
    x: &State<SignedMeasure>,
    y: &State<SignedMeasure>,
    xp: &State<SignedMeasure>,
    yp: &State<SignedMeasure>,
) -> Result<TransportCertificate> {
    find_transport_with(x, y, xp, yp, LpMode::Float)
}

pub fn find_transport_with(
    x: &State<SignedMeasure>,
    y: &State<SignedMeasure>,
    xp: &State<SignedMeasure>,
    yp: &State<SignedMeasure>,
    mode: LpMode,
) -> Result<TransportCertificate> {
    check_dims(x, y, xp, yp)?;
    let (a, b) = transport_lp(x.weights(), y.weights(), xp.weights(), yp.weights());
    let outcome = match mode {
        LpMode::Float => to_f64_outcome(find_feasible(&a, &b)?),
        LpMode::Exact => {
            let conv = |v: &f64| {
                simplex::rational_from_decimal(*v)
                    .ok_or_else(|| Error::InvalidArgument(format!("{v} has no rational value")))
            };
            let ar = a
                .iter()
                .map(|row| row.iter().map(conv).collect::<Result<Vec<BigRational>>>())
                .collect::<Result<Vec<_>>>()?;
            let br = b.iter().map(conv).collect::<Result<Vec<_>>>()?;
            to_f64_outcome(find_feasible(&ar, &br)?)
        }
    };

    let (n, m) = (x.weights().len(), xp.weights().len());
    match outcome {
        LpOutcome::Feasible { x: phi } => {
            let rows: Vec<Vec<f64>> = phi.chunks(n).map(<[f64]>::to_vec).collect();
            let check = verify_stochastic(&rows, STOCHASTIC_TOL);
            if !check.valid {
                return Err(Error::LpFailure(format!(
                    "solution is not stochastic: {}",
                    check.diagnostics.join("; ")
                )));
            }
            let transport = StochasticMatrix::from_parts_unchecked(m, n, phi);
            let rx = transport.apply(x)?.distance(xp)?;
            let ry = transport.apply(y)?.distance(yp)?;
            let residual = rx.max(ry);
            if residual > SOUNDNESS_TOL {
                return Err(Error::LpFailure(format!(
                    "transport misses its targets by {residual:e}"
                )));
            }
            Ok(TransportCertificate {
                feasible: true,
                transport: Some(transport),
                residual: Some(residual),
                farkas: None,
                dominance_witness: None,
            })
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let verdict = mixdist::dominates((x, y), (xp, yp), mixdist::DEFAULT_TOL)?;
            Ok(TransportCertificate {
                feasible: false,
                transport: None,
                residual: None,
                farkas: Some(farkas),
                dominance_witness: verdict.witness().map(|(t, gap)| DominanceWitness { t, gap }),
            })
        }
    }
}

fn to_f64_outcome<S: LpScalar>(o: LpOutcome<S>) -> LpOutcome<f64> {
    match o {
        LpOutcome::Feasible { x } => LpOutcome::Feasible {
            x: x.iter().map(LpScalar::to_f64).collect(),
        },
        LpOutcome::Infeasible {
            farkas,
            phase1_objective,
        } => LpOutcome::Infeasible {
            farkas: farkas.iter().map(LpScalar::to_f64).collect(),
            phase1_objective: phase1_objective.to_f64(),
        },
    }
}

/// Both sides of the pair-transport equivalence for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssReport {
    pub feasible: bool,
    pub dominates: bool,
    pub agree: bool,
    pub certificate: TransportCertificate,
    pub dominance: DominanceVerdict,
}

pub fn check_rss_equivalence(
    x: &State<SignedMeasure>,
    y: &State<SignedMeasure>,
    xp: &State<SignedMeasure>,
    yp: &State<SignedMeasure>,
    tol: f64,
) -> Result<RssReport> {
    let certificate = find_transport(x, y, xp, yp)?;
    let dominance = mixdist::dominates((x, y), (xp, yp), tol)?;
    Ok(RssReport {
        feasible: certificate.feasible,
        dominates: dominance.holds,
        agree: certificate.feasible == dominance.holds,
        certificate,
        dominance,
    })
}

/// Whether `(x′, y′)` can be transported back to `(x, y)`.
pub fn is_reversible_transition(
    x: &State<SignedMeasure>,
    y: &State<SignedMeasure>,
    xp: &State<SignedMeasure>,
    yp: &State<SignedMeasure>,
) -> Result<bool> {
    Ok(find_transport(xp, yp, x, y)?.feasible)
}

/// One random transport instance `(x, y, x′, y′)` on `n → m` bins.
///
/// Mixes three families: images under a random stochastic matrix (always
/// feasible), images under a permutation or isometry, and independent pairs.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> [State<SignedMeasure>; 4] {
    let x = sample::classical_state(rng, n);
    let y = sample::classical_state(rng, n);
    let phi = match rng.random_range(0..3) {
        0 => {
            let sparse = rng.random_bool(0.3);
            sample::stochastic_matrix(rng, m, n, sparse)
        }
        1 if m >= n => sample::column_disjoint_isometry(rng, m, n),
        _ => {
            let xp = sample::classical_state(rng, m);
            let yp = sample::classical_state(rng, m);
            return [x, y, xp, yp];
        }
    };
    let xp = phi.apply_state(&x).expect("stochastic image of a state");
    let yp = phi.apply_state(&y).expect("stochastic image of a state");
    [x, y, xp, yp]
}

/// A row of the randomized equivalence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub feasible: bool,
    pub dominates: bool,
    pub agree: bool,
    pub witness_t: Option<f64>,
    pub gap: Option<f64>,
}

/// Runs `count` random instances on `dim → dim` bins.
pub fn rss_sweep<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize, tol: f64) -> Result<Vec<SweepRow>> {
    (0..count)
        .map(|index| {
            let [x, y, xp, yp] = random_instance(rng, dim, dim);
            let r = check_rss_equivalence(&x, &y, &xp, &yp, tol)?;
            Ok(SweepRow {
                index,
                feasible: r.feasible,
                dominates: r.dominates,
                agree: r.agree,
                witness_t: r.dominance.witness_t,
                gap: r.dominance.gap,
            })
        })
        .collect()
}
