//! Dense phase-1 simplex for feasibility of `A·x = b, x ≥ 0`.
//!
//! Bland's rule (lowest-index entering column, lowest-index leaving basic
//! variable among ratio ties) rules out cycling. The solver is generic over
//! the scalar: `f64` with small pivot tolerances, or [`BigRational`] for
//! exact arithmetic.
//!
//! On infeasibility the final simplex multipliers are returned as a Farkas
//! certificate `y` with `yᵀA ≤ 0` and `yᵀb > 0`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_PIVOTS: usize = 50_000;

/// Scalar field the simplex runs over.
pub trait LpScalar: Clone + Debug + PartialOrd + Signed {
    /// Magnitude below which a value counts as zero when pivoting.
    fn pivot_eps() -> Self;
    /// Largest artificial value still accepted as feasible.
    fn feasibility_tol() -> Self;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl LpScalar for f64 {
    fn pivot_eps() -> Self {
        1e-12
    }
    fn feasibility_tol() -> Self {
        1e-9
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn pivot_eps() -> Self {
        BigRational::zero()
    }
    fn feasibility_tol() -> Self {
        BigRational::zero()
    }
    fn from_f64(x: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact rational from a decimal-ish float (shortest round-trip digits).
///
/// `0.1_f64` becomes `1/10` rather than the binary expansion, which is what
/// users mean when they write decimal inputs.
pub fn rational_from_decimal(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x:e}");
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Some(r)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Feasible {
        x: Vec<S>,
    },
    Infeasible {
        /// Farkas multipliers in the orientation of the original rows.
        farkas: Vec<S>,
        phase1_objective: S,
    },
}

struct Tableau<S> {
    rows: usize,
    /// structural + artificial columns, rhs last
    width: usize,
    n_vars: usize,
    t: Vec<Vec<S>>,
    /// reduced costs for every column, objective value last
    obj: Vec<S>,
    basis: Vec<usize>,
}

impl<S: LpScalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.t[i].iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = c;
    }

    fn entering(&self) -> Option<usize> {
        let eps = S::pivot_eps();
        (0..self.width - 1).find(|&j| self.obj[j] < -eps.clone())
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let eps = S::pivot_eps();
        let rhs = self.width - 1;
        let mut best: Option<(usize, S)> = None;
        for i in 0..self.rows {
            let a = &self.t[i][c];
            if *a <= eps {
                continue;
            }
            let ratio = self.t[i][rhs].clone() / a.clone();
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }
}

/// Finds `x ≥ 0` with `A·x = b`, or a Farkas certificate that none exists.
///
/// `a` is given by rows; every row must have the same length.
pub fn find_feasible<S: LpScalar>(a: &[Vec<S>], b: &[S]) -> Result<LpOutcome<S>> {
    let rows = a.len();
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: b.len(),
        });
    }
    let n_vars = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n_vars) {
        return Err(Error::LpFailure("ragged constraint matrix".into()));
    }

    // normalize to b ≥ 0
    let signs: Vec<S> = b
        .iter()
        .map(|bi| if bi.is_negative() { -S::one() } else { S::one() })
        .collect();
    let width = n_vars + rows + 1;
    let mut t = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().map(|v| v.clone() * signs[i].clone()));
        row.extend((0..rows).map(|k| if k == i { S::one() } else { S::zero() }));
        row.push(b[i].clone() * signs[i].clone());
        t.push(row);
    }
    // phase-1 cost: 1 on artificials; reduced costs after pricing out the basis
    let mut obj = vec![S::zero(); width];
    for row in &t {
        for j in 0..n_vars {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[width - 1] = obj[width - 1].clone() - row[width - 1].clone();
    }
    let mut tab = Tableau {
        rows,
        width,
        n_vars,
        t,
        obj,
        basis: (n_vars..n_vars + rows).collect(),
    };

    let mut pivots = 0;
    while let Some(c) = tab.entering() {
        let Some(r) = tab.leaving(c) else {
            return Err(Error::LpFailure("phase-1 objective unbounded below".into()));
        };
        tab.pivot(r, c);
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::LpFailure(format!("no termination after {MAX_PIVOTS} pivots")));
        }
    }

    let rhs = width - 1;
    let tol = S::feasibility_tol();
    let artificial_max = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= tab.n_vars)
        .map(|(i, _)| tab.t[i][rhs].clone())
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc });

    if artificial_max <= tol {
        let mut x = vec![S::zero(); tab.n_vars];
        for (i, &v) in tab.basis.iter().enumerate() {
            if v < tab.n_vars {
                let val = tab.t[i][rhs].clone();
                x[v] = if val.is_negative() { S::zero() } else { val };
            }
        }
        Ok(LpOutcome::Feasible { x })
    } else {
        // multiplier y_i = c_art − reduced cost of artificial i
        let farkas = (0..rows)
            .map(|i| (S::one() - tab.obj[n_vars + i].clone()) * signs[i].clone())
            .collect();
        Ok(LpOutcome::Infeasible {
            farkas,
            phase1_objective: -tab.obj[rhs].clone(),
        })
    }
}

/// Checks `yᵀA ≤ tol` componentwise and `yᵀb > tol`.
pub fn verify_farkas(a: &[Vec<f64>], b: &[f64], y: &[f64], tol: f64) -> bool {
    if y.len() != a.len() || b.len() != a.len() {
        return false;
    }
    let n = a.first().map_or(0, Vec::len);
    let yb: f64 = y.iter().zip(b).map(|(p, q)| p * q).sum();
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    (0..n).all(|j| a.iter().zip(y).map(|(row, yi)| row[j] * yi).sum::<f64>() <= tol * scale)
        && yb > tol * scale
}
