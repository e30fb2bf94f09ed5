//! Mixing distance of state pairs and the dominance ordering between pairs.
//!
//! The mixing distance `(α, β) ↦ ‖α·x₀ − β·y₀‖₁` is positively homogeneous,
//! so it is fully described by its slice on `α = t, β = 1 − t`:
//!
//! ```text
//! g(t) = ‖t·x₀ − (1−t)·y₀‖₁,   t ∈ [0, 1]
//! ```
//!
//! `g` is convex with `g(0) = g(1) = 1` and `|2t − 1| ≤ g(t) ≤ 1`.
//! Classically it is piecewise linear with kinks at `yᵢ/(xᵢ+yᵢ)`, so the
//! profile is exact. Quantumly it is only sampled on a uniform grid and
//! comparisons use the Lipschitz constant 2 to bound what happens between
//! samples.

use serde::{Deserialize, Serialize};

use crate::cone::{is_orthogonal, ConeElement, State};
use crate::error::{Error, Result};

/// Default tolerance for dominance checks.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default number of samples for profiles without exact kinks.
pub const DEFAULT_GRID: usize = 2048;

/// Lipschitz constant of `t ↦ ‖t·x₀ − (1−t)·y₀‖₁` for normalized inputs.
pub const PROFILE_LIPSCHITZ: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    ClassicalExact,
    QuantumSampled,
}

/// The function `t ↦ g(t)` as breakpoints and values.
///
/// For [`ProfileKind::ClassicalExact`] linear interpolation between
/// breakpoints is exact. For [`ProfileKind::QuantumSampled`] it is an upper
/// bound (by convexity) and `lipschitz_bound` controls the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub kind: ProfileKind,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub lipschitz_bound: Option<f64>,
}

impl MixingProfile {
    pub fn eval(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        let t = t.clamp(0.0, 1.0);
        let idx = bp.partition_point(|&b| b < t);
        if idx == 0 {
            return self.values[0];
        }
        if idx == bp.len() {
            return *self.values.last().expect("profile is nonempty");
        }
        let (t0, t1) = (bp[idx - 1], bp[idx]);
        let (g0, g1) = (self.values[idx - 1], self.values[idx]);
        if t1 == t0 {
            return g1;
        }
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }

    /// Sample spacing for sampled profiles; zero for exact ones.
    pub fn grid_step(&self) -> f64 {
        match self.kind {
            ProfileKind::ClassicalExact => 0.0,
            ProfileKind::QuantumSampled => 1.0 / (self.breakpoints.len() - 1) as f64,
        }
    }

    /// Lists violated structural properties: unit endpoints, the bounds
    /// `|2t−1| ≤ g ≤ 1`, and convexity on consecutive breakpoint triples.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.values.len();
        if (self.values[0] - 1.0).abs() > tol || (self.values[n - 1] - 1.0).abs() > tol {
            out.push(format!(
                "endpoints g(0)={} g(1)={} differ from 1",
                self.values[0],
                self.values[n - 1]
            ));
        }
        for (&t, &g) in self.breakpoints.iter().zip(&self.values) {
            if g > 1.0 + tol || g < (2.0 * t - 1.0).abs() - tol {
                out.push(format!("g({t}) = {g} outside [|2t-1|, 1]"));
            }
        }
        for k in 1..n.saturating_sub(1) {
            let (t0, t1, t2) = (self.breakpoints[k - 1], self.breakpoints[k], self.breakpoints[k + 1]);
            let chord = self.values[k - 1]
                + (self.values[k + 1] - self.values[k - 1]) * (t1 - t0) / (t2 - t0);
            if self.values[k] > chord + tol {
                out.push(format!("convexity fails at t={t1}"));
            }
        }
        out
    }

    /// Two-column CSV with header `t,g`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,g\n");
        for (t, g) in self.breakpoints.iter().zip(&self.values) {
            s.push_str(&format!("{t},{g}\n"));
        }
        s
    }
}

/// Outcome of comparing two mixing-distance profiles.
///
/// `holds` means `g_a(t) ≥ g_b(t) − certified_tol` on all of `[0, 1]`. When
/// it fails, `witness_t` and `gap = g_b − g_a` locate a strict violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub holds: bool,
    pub witness_t: Option<f64>,
    pub gap: Option<f64>,
    pub certified_tol: f64,
}

impl DominanceVerdict {
    pub fn witness(&self) -> Option<(f64, f64)> {
        self.witness_t.zip(self.gap)
    }
}

/// `g(t)` evaluated directly from the pair.
pub fn profile_value<E: ConeElement>(x: &E, y: &E, t: f64) -> Result<f64> {
    let nx = x.one_norm()?;
    let ny = y.one_norm()?;
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::InvalidArgument("mixing distance needs nonzero elements".into()));
    }
    E::combine(t / nx, x, -(1.0 - t) / ny, y)?.one_norm()
}

fn check_pair<E: ConeElement>(x: &E, y: &E) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

/// Profile of the pair with the default sample count where sampling is needed.
pub fn mixing_profile<E: ConeElement>(x: &State<E>, y: &State<E>) -> Result<MixingProfile> {
    mixing_profile_with_grid(x, y, DEFAULT_GRID)
}

pub fn mixing_profile_with_grid<E: ConeElement>(
    x: &State<E>,
    y: &State<E>,
    grid: usize,
) -> Result<MixingProfile> {
    check_pair(x.as_ref(), y.as_ref())?;
    if grid < 2 {
        return Err(Error::InvalidArgument("profile grid needs at least 2 samples".into()));
    }
    let (kind, breakpoints, lipschitz_bound) = match E::mixing_kinks(x, y) {
        Some(kinks) => {
            let mut bp = Vec::with_capacity(kinks.len() + 2);
            bp.push(0.0);
            bp.extend(kinks);
            bp.push(1.0);
            (ProfileKind::ClassicalExact, bp, None)
        }
        None => (
            ProfileKind::QuantumSampled,
            uniform_grid(grid),
            Some(PROFILE_LIPSCHITZ),
        ),
    };
    let values = breakpoints
        .iter()
        .map(|&t| profile_value(x.as_ref(), y.as_ref(), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixingProfile {
        kind,
        breakpoints,
        values,
        lipschitz_bound,
    })
}

fn verdict_from_gaps(gaps: impl Iterator<Item = (f64, f64)>, tol: f64, certified_tol: f64) -> DominanceVerdict {
    let (t_star, worst) = gaps.fold((0.0, f64::NEG_INFINITY), |acc, cur| {
        if cur.1 > acc.1 {
            cur
        } else {
            acc
        }
    });
    if worst > tol {
        DominanceVerdict {
            holds: false,
            witness_t: Some(t_star),
            gap: Some(worst),
            certified_tol,
        }
    } else {
        DominanceVerdict {
            holds: true,
            witness_t: None,
            gap: None,
            certified_tol,
        }
    }
}

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = a.iter().chain(b).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Decides `d[x/y] ≻ d[x′/y′]` for `pair_a = (x, y)` and `pair_b = (x′, y′)`.
///
/// The two pairs may live in spaces of different dimension. Pairs with exact
/// kinks are compared at the union of both kink sets, where the sign of the
/// piecewise-linear difference is decided. Otherwise both are sampled on
/// [`DEFAULT_GRID`] points and a pass is certified up to
/// `tol + 2·(grid step)`.
pub fn dominates<E: ConeElement>(
    pair_a: (&State<E>, &State<E>),
    pair_b: (&State<E>, &State<E>),
    tol: f64,
) -> Result<DominanceVerdict> {
    dominates_with_grid(pair_a, pair_b, tol, DEFAULT_GRID)
}

pub fn dominates_with_grid<E: ConeElement>(
    (xa, ya): (&State<E>, &State<E>),
    (xb, yb): (&State<E>, &State<E>),
    tol: f64,
    grid: usize,
) -> Result<DominanceVerdict> {
    check_pair(xa.as_ref(), ya.as_ref())?;
    check_pair(xb.as_ref(), yb.as_ref())?;
    let (ts, certified_tol) = match (E::mixing_kinks(xa, ya), E::mixing_kinks(xb, yb)) {
        (Some(ka), Some(kb)) => (merged(&merged(&ka, &kb), &[0.0, 1.0]), tol),
        _ => {
            if grid < 2 {
                return Err(Error::InvalidArgument("grid needs at least 2 samples".into()));
            }
            let h = 1.0 / (grid - 1) as f64;
            (uniform_grid(grid), tol + PROFILE_LIPSCHITZ * h)
        }
    };
    let gaps = ts
        .iter()
        .map(|&t| {
            let ga = profile_value(xa.as_ref(), ya.as_ref(), t)?;
            let gb = profile_value(xb.as_ref(), yb.as_ref(), t)?;
            Ok((t, gb - ga))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(verdict_from_gaps(gaps.into_iter(), tol, certified_tol))
}

/// Dominance between two precomputed profiles of the same kind. Sampled
/// profiles must share the same grid.
pub fn dominates_profiles(a: &MixingProfile, b: &MixingProfile, tol: f64) -> Result<DominanceVerdict> {
    if a.kind != b.kind {
        return Err(Error::KindMismatch);
    }
    match a.kind {
        ProfileKind::ClassicalExact => {
            let ts = merged(&a.breakpoints, &b.breakpoints);
            let gaps = ts.iter().map(|&t| (t, b.eval(t) - a.eval(t)));
            Ok(verdict_from_gaps(gaps, tol, tol))
        }
        ProfileKind::QuantumSampled => {
            if a.breakpoints != b.breakpoints {
                return Err(Error::KindMismatch);
            }
            let gaps = a
                .breakpoints
                .iter()
                .zip(a.values.iter().zip(&b.values))
                .map(|(&t, (ga, gb))| (t, gb - ga));
            Ok(verdict_from_gaps(gaps, tol, tol + PROFILE_LIPSCHITZ * a.grid_step()))
        }
    }
}

/// Maximal mixing distance, `g ≡ 1`. Equivalent to orthogonality of the pair.
pub fn is_max_distance<E: ConeElement>(x: &State<E>, y: &State<E>, tol: f64) -> Result<bool> {
    check_pair(x.as_ref(), y.as_ref())?;
    is_orthogonal(x.as_ref(), y.as_ref(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::HermitianOperator;

    fn cs(w: &[f64]) -> State<crate::cone::SignedMeasure> {
        State::from_weights(w.to_vec()).unwrap()
    }

    #[test]
    fn orthogonal_pair_profile_is_flat() {
        let p = mixing_profile(&cs(&[1.0, 0.0]), &cs(&[0.0, 1.0])).unwrap();
        assert_eq!(p.kind, ProfileKind::ClassicalExact);
        for k in 0..=100 {
            assert!((p.eval(k as f64 / 100.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_states_profile() {
        let x = cs(&[0.2, 0.3, 0.5]);
        let p = mixing_profile(&x, &x).unwrap();
        assert_eq!(p.breakpoints, vec![0.0, 0.5, 1.0]);
        assert!(p.values[1].abs() < 1e-15);
        assert!(p.violations(1e-12).is_empty());
    }

    #[test]
    fn kink_at_two_thirds() {
        // brute force: min over a dense grid of ‖t·x − (1−t)·y‖₁
        let x = cs(&[0.5, 0.5]);
        let y = cs(&[1.0, 0.0]);
        let brute = |t: f64| (t * 0.5 - (1.0 - t)).abs() + (t * 0.5).abs();
        let (t_min, g_min) = (0..=300_000)
            .map(|k| k as f64 / 300_000.0)
            .map(|t| (t, brute(t)))
            .fold((0.0, f64::MAX), |a, c| if c.1 < a.1 { c } else { a });
        assert!((t_min - 2.0 / 3.0).abs() < 1e-5);
        assert!((g_min - 1.0 / 3.0).abs() < 1e-5);

        let p = mixing_profile(&x, &y).unwrap();
        assert_eq!(p.breakpoints.len(), 3);
        assert!((p.breakpoints[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.values[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.values[0] - 1.0).abs() < 1e-15 && (p.values[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dominance_examples() {
        let e1 = cs(&[1.0, 0.0]);
        let e2 = cs(&[0.0, 1.0]);
        let u = cs(&[0.5, 0.5]);
        let v = dominates((&e1, &e2), (&u, &u), DEFAULT_TOL).unwrap();
        assert!(v.holds && v.witness().is_none());
        let v = dominates((&u, &u), (&e1, &e2), DEFAULT_TOL).unwrap();
        assert!(!v.holds);
        let (t, gap) = v.witness().unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        assert!((gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dominance_on_profiles_matches_states() {
        let a = (cs(&[0.6, 0.3, 0.1]), cs(&[0.1, 0.2, 0.7]));
        let b = (cs(&[0.5, 0.5]), cs(&[0.3, 0.7]));
        let direct = dominates((&a.0, &a.1), (&b.0, &b.1), DEFAULT_TOL).unwrap();
        let pa = mixing_profile(&a.0, &a.1).unwrap();
        let pb = mixing_profile(&b.0, &b.1).unwrap();
        let via = dominates_profiles(&pa, &pb, DEFAULT_TOL).unwrap();
        assert_eq!(direct.holds, via.holds);
    }

    #[test]
    fn max_distance() {
        assert!(is_max_distance(&cs(&[1.0, 0.0]), &cs(&[0.0, 1.0]), 1e-12).unwrap());
        let x = cs(&[0.4, 0.6]);
        assert!(!is_max_distance(&x, &x, 1e-12).unwrap());
        let p = State::new(HermitianOperator::from_real_diag(&[1.0, 0.0]).unwrap()).unwrap();
        let q = State::new(HermitianOperator::from_real_diag(&[0.0, 1.0]).unwrap()).unwrap();
        assert!(is_max_distance(&p, &q, 1e-12).unwrap());
    }

    #[test]
    fn quantum_profile_is_sampled() {
        let p = State::<HermitianOperator>::basis(2, 0);
        let q = State::<HermitianOperator>::maximally_mixed(2);
        let prof = mixing_profile_with_grid(&p, &q, 65).unwrap();
        assert_eq!(prof.kind, ProfileKind::QuantumSampled);
        assert_eq!(prof.breakpoints.len(), 65);
        assert!(prof.violations(1e-9).is_empty());
    }

    #[test]
    fn mismatched_profiles() {
        let c = mixing_profile(&cs(&[1.0, 0.0]), &cs(&[0.0, 1.0])).unwrap();
        let p = State::<HermitianOperator>::basis(2, 0);
        let q = mixing_profile_with_grid(&p, &p, 16).unwrap();
        assert_eq!(dominates_profiles(&c, &q, 1e-8), Err(Error::KindMismatch));
        let x = cs(&[1.0, 0.0]);
        let y = cs(&[0.0, 0.5, 0.5]);
        assert!(matches!(mixing_profile(&x, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn csv_layout() {
        let x = cs(&[1.0, 0.0]);
        let csv = mixing_profile(&x, &x).unwrap().to_csv();
        assert_eq!(csv, "t,g\n0,1\n0.5,0\n1,1\n");
    }
}
