//! The integer shift semigroup.
//!
//! `γ: ℤ → ℤ₊` interleaves the two half-lines: `k ↦ 2k` for `k ≥ 1` and
//! `k ↦ 2|k| + 1` for `k ≤ 0`. It is a bijection onto the positive integers,
//! so pushing mass forward along `γⁿ` gives maps `Φₙ` that preserve the
//! 1-norm, compose as `Φₙ∘Φₘ = Φₙ₊ₘ`, and are inverted on their range by
//! pulling back along `γⁿ`. None of them is onto: nothing maps to `0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cone::State;
use crate::error::{Error, Result};
use crate::transport::{find_transport, TransportCertificate};

/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// `γ(k)`; `None` on overflow.
pub fn gamma(k: i64) -> Option<i64> {
    if k >= 1 {
        k.checked_mul(2)
    } else {
        k.checked_neg()?.checked_mul(2)?.checked_add(1)
    }
}

/// `γ⁻¹(m)`, defined exactly for `m ≥ 1`.
pub fn gamma_inverse(m: i64) -> Option<i64> {
    match m {
        m if m >= 2 && m % 2 == 0 => Some(m / 2),
        m if m >= 1 => Some(-(m - 1) / 2),
        _ => None,
    }
}

/// `γⁿ(k)`; `None` on overflow.
pub fn gamma_pow(k: i64, n: u32) -> Option<i64> {
    (0..n).try_fold(k, |acc, _| gamma(acc))
}

/// Whether `m` lies in `γⁿ(ℤ)`.
pub fn in_range(m: i64, n: u32) -> bool {
    (0..n).try_fold(m, |acc, _| gamma_inverse(acc)).is_some()
}

/// Finitely supported measure on ℤ.
pub type SparseMeasure = BTreeMap<i64, f64>;

/// Pushes a finitely supported (signed) measure forward along `γⁿ`.
pub fn push_forward(z: &SparseMeasure, n: u32) -> Result<SparseMeasure> {
    z.iter()
        .map(|(&k, &w)| Ok((gamma_pow(k, n).ok_or(Error::Overflow)?, w)))
        .collect()
}

/// Pulls back along `γⁿ`; `None` if some mass lies outside the range.
pub fn pull_back(z: &SparseMeasure, n: u32) -> Option<SparseMeasure> {
    z.iter()
        .map(|(&m, &w)| Some(((0..n).try_fold(m, |acc, _| gamma_inverse(acc))?, w)))
        .collect()
}

/// `Σ|wₖ|`, summed in increasing magnitude so the result depends only on
/// the multiset of weights and not on where they sit.
pub fn sparse_one_norm(z: &SparseMeasure) -> f64 {
    let mut mags: Vec<f64> = z.values().map(|w| w.abs()).collect();
    mags.sort_by(f64::total_cmp);
    mags.iter().sum()
}

/// Probability distribution with finite support on ℤ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SparseMeasure", into = "SparseMeasure")]
pub struct ShiftState {
    bins: SparseMeasure,
}

impl TryFrom<SparseMeasure> for ShiftState {
    type Error = Error;
    fn try_from(bins: SparseMeasure) -> Result<Self> {
        Self::new(bins)
    }
}

impl From<ShiftState> for SparseMeasure {
    fn from(s: ShiftState) -> Self {
        s.bins
    }
}

impl ShiftState {
    pub fn new(bins: SparseMeasure) -> Result<Self> {
        if bins.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NotAState("masses must be finite and nonnegative".into()));
        }
        let total: f64 = bins.values().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::NotAState(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { bins })
    }

    pub fn point_mass(k: i64) -> Self {
        Self {
            bins: BTreeMap::from([(k, 1.0)]),
        }
    }

    pub fn bins(&self) -> &SparseMeasure {
        &self.bins
    }

    pub fn mass(&self, k: i64) -> f64 {
        self.bins.get(&k).copied().unwrap_or(0.0)
    }

    /// Indices carrying nonzero mass.
    pub fn support(&self) -> Vec<i64> {
        self.bins.iter().filter(|(_, &w)| w != 0.0).map(|(&k, _)| k).collect()
    }

    pub fn one_norm(&self) -> f64 {
        sparse_one_norm(&self.bins)
    }
}

/// `Φₙ(s)`, the pushforward of `s` along `γⁿ`.
pub fn shift_map(s: &ShiftState, n: u32) -> Result<ShiftState> {
    Ok(ShiftState {
        bins: push_forward(&s.bins, n)?,
    })
}

/// Stochastic inverse of `Φₙ` on its range; `None` off the range.
pub fn shift_inverse_on_range(s: &ShiftState, n: u32) -> Option<ShiftState> {
    pull_back(&s.bins, n).map(|bins| ShiftState { bins })
}

/// A point mass outside the range of `Φₙ`, namely `δ_{γⁿ⁻¹(0)}`: `0` has no
/// `γ`-preimage, so `γⁿ⁻¹(0)` has no `γⁿ`-preimage.
pub fn shift_surjectivity_witness(n: u32) -> Result<ShiftState> {
    if n == 0 {
        return Err(Error::InvalidArgument("Φ₀ is the identity and is onto".into()));
    }
    let k = gamma_pow(0, n - 1).ok_or(Error::Overflow)?;
    debug_assert!(!in_range(k, n));
    Ok(ShiftState::point_mass(k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    /// Source bin `j` of the candidate preimage `δ_j`.
    pub source: i64,
    pub feasible: bool,
    pub certificate: TransportCertificate,
}

/// Finite-window view of why `Φ₁⁻¹` has no stochastic extension reaching the
/// witness `δ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowIllustration {
    pub window: (i64, i64),
    /// Target bins `0..=max γ(window)`.
    pub target_bins: usize,
    pub rows: Vec<WindowRow>,
}

impl WindowIllustration {
    pub fn all_infeasible(&self) -> bool {
        self.rows.iter().all(|r| !r.feasible)
    }
}

/// For each `j` in `[lo, hi]`, asks the transport oracle for a stochastic map
/// sending `(δ_j, u)` to `(δ₀, Φ₁u)`, where `u` is uniform on the window. Any
/// map agreeing with `Φ₁` on `u` that produced `δ₀` would need one; all are
/// infeasible because `δ₀ ⊥ Φ₁u` while `δ_j` overlaps `u`.
pub fn finite_window_illustration(lo: i64, hi: i64) -> Result<WindowIllustration> {
    if lo > hi {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    let width = (hi - lo + 1) as usize;
    let targets = (lo..=hi)
        .map(|k| gamma(k).ok_or(Error::Overflow))
        .collect::<Result<Vec<_>>>()?;
    let target_bins = *targets.iter().max().expect("window is nonempty") as usize + 1;
    let u = vec![1.0 / width as f64; width];
    let mut phi_u = vec![0.0; target_bins];
    for &m in &targets {
        phi_u[m as usize] += 1.0 / width as f64;
    }
    let mut delta0 = vec![0.0; target_bins];
    delta0[0] = 1.0;
    let delta0 = State::from_weights(delta0)?;
    let phi_u = State::from_weights(phi_u)?;
    let u = State::from_weights(u)?;
    let rows = (lo..=hi)
        .map(|j| {
            let x = State::point_mass(width, (j - lo) as usize);
            let certificate = find_transport(&x, &u, &delta0, &phi_u)?;
            Ok(WindowRow {
                source: j,
                feasible: certificate.feasible,
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowIllustration {
        window: (lo, hi),
        target_bins,
        rows,
    })
}
