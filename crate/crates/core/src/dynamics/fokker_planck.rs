//! One-dimensional Fokker–Planck relaxation
//!
//! ```text
//! ∂ρ/∂t = −∂(bρ)/∂X + ½·∂²(σ²ρ)/∂X²
//! ```
//!
//! on a bounded interval with zero-flux walls, discretized by an explicit
//! conservative finite-volume scheme: upwinded drift at cell interfaces,
//! centered diffusion of `a = σ²/2` taken at cell centers. Within the
//! stability bound every step is a column-stochastic matrix with nonnegative
//! entries, so mass is conserved and positivity is preserved exactly.

use serde::{Deserialize, Serialize};

use crate::cone::{SignedMeasure, State};
use crate::error::{Error, Result};
use crate::mixdist::{dominates_profiles, mixing_profile, DEFAULT_TOL};

/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// Slack allowed when checking that the distance to equilibrium never grows.
pub const MONOTONE_SLACK: f64 = 1e-6;

/// Courant-type safety factor in the stability bound.
pub const CFL: f64 = 0.4;

/// Cell-integrated probability masses on a uniform grid over `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    lower: f64,
    upper: f64,
    masses: Vec<f64>,
}

fn check_domain(lower: f64, upper: f64, cells: usize) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(Error::InvalidArgument(format!("invalid domain [{lower}, {upper}]")));
    }
    if cells < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 cells".into()));
    }
    Ok(())
}

impl DensityGrid {
    pub fn new(lower: f64, upper: f64, masses: Vec<f64>) -> Result<Self> {
        check_domain(lower, upper, masses.len())?;
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument("masses must be finite and nonnegative".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { lower, upper, masses })
    }

    /// Cell masses of the density `f` (any positive multiple), integrated
    /// with composite Simpson quadrature and normalized.
    pub fn from_density(lower: f64, upper: f64, cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_domain(lower, upper, cells)?;
        const SUB: usize = 8;
        let dx = (upper - lower) / cells as f64;
        let h = dx / SUB as f64;
        let masses: Vec<f64> = (0..cells)
            .map(|i| {
                let a = lower + i as f64 * dx;
                let mut s = f(a) + f(a + dx);
                for k in 1..SUB {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * f(a + k as f64 * h);
                }
                s * h / 3.0
            })
            .collect();
        Self::normalize(lower, upper, masses)
    }

    /// Gaussian bump of the given center and width, truncated to the domain.
    pub fn gaussian(lower: f64, upper: f64, cells: usize, center: f64, width: f64) -> Result<Self> {
        if width.is_nan() || width <= 0.0 {
            return Err(Error::InvalidArgument("bump width must be positive".into()));
        }
        Self::from_density(lower, upper, cells, |x| (-0.5 * ((x - center) / width).powi(2)).exp())
    }

    /// All mass in the cell containing `x`.
    pub fn point_mass(lower: f64, upper: f64, cells: usize, x: f64) -> Result<Self> {
        check_domain(lower, upper, cells)?;
        if !(lower..=upper).contains(&x) {
            return Err(Error::InvalidArgument(format!("{x} lies outside [{lower}, {upper}]")));
        }
        let dx = (upper - lower) / cells as f64;
        let k = (((x - lower) / dx) as usize).min(cells - 1);
        let mut masses = vec![0.0; cells];
        masses[k] = 1.0;
        Ok(Self { lower, upper, masses })
    }

    pub fn uniform(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        check_domain(lower, upper, cells)?;
        Ok(Self {
            lower,
            upper,
            masses: vec![1.0 / cells as f64; cells],
        })
    }

    fn normalize(lower: f64, upper: f64, masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidArgument("density has no mass on the domain".into()));
        }
        Self::new(lower, upper, masses.into_iter().map(|m| m / total).collect())
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn cells(&self) -> usize {
        self.masses.len()
    }

    pub fn dx(&self) -> f64 {
        (self.upper - self.lower) / self.cells() as f64
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.cells()).map(|i| self.lower + (i as f64 + 0.5) * dx).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.centers().iter().zip(&self.masses).map(|(x, m)| x * m).sum()
    }

    fn check_same_grid(&self, other: &DensityGrid) -> Result<()> {
        if self.cells() != other.cells() {
            return Err(Error::DimensionMismatch {
                expected: self.cells(),
                found: other.cells(),
            });
        }
        if self.lower != other.lower || self.upper != other.upper {
            return Err(Error::InvalidArgument("grids cover different domains".into()));
        }
        Ok(())
    }

    /// Total-variation style 1-norm `Σ|mᵢ − m′ᵢ|`.
    pub fn l1_distance(&self, other: &DensityGrid) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.masses.iter().zip(&other.masses).map(|(a, b)| (a - b).abs()).sum())
    }

    /// The masses as a classical state, renormalized against rounding drift.
    pub fn to_state(&self) -> Result<State<SignedMeasure>> {
        State::normalized(SignedMeasure::new(self.masses.clone())?)
    }
}

/// Precomputed explicit step for fixed drift, amplitude, grid and `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FokkerPlanck {
    lower: f64,
    upper: f64,
    dt: f64,
    /// `b⁺/dx` at the `cells − 1` interior interfaces.
    drift_right: Vec<f64>,
    /// `b⁻/dx` at the interior interfaces.
    drift_left: Vec<f64>,
    /// `a/dx²` at cell centers.
    diffusion: Vec<f64>,
    stability_bound: f64,
}

impl FokkerPlanck {
    /// Builds the step operator; fails when `dt` exceeds the stability bound.
    pub fn new(
        lower: f64,
        upper: f64,
        cells: usize,
        drift: impl Fn(f64) -> f64,
        sigma: impl Fn(f64) -> f64,
        dt: f64,
    ) -> Result<Self> {
        check_domain(lower, upper, cells)?;
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        let dx = (upper - lower) / cells as f64;
        let b: Vec<f64> = (1..cells).map(|k| drift(lower + k as f64 * dx)).collect();
        let s2: Vec<f64> = (0..cells)
            .map(|i| sigma(lower + (i as f64 + 0.5) * dx).powi(2))
            .collect();
        if b.iter().chain(&s2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("drift and amplitude must be finite on the grid".into()));
        }
        let drift_right: Vec<f64> = b.iter().map(|v| v.max(0.0) / dx).collect();
        let drift_left: Vec<f64> = b.iter().map(|v| (-v).max(0.0) / dx).collect();
        let diffusion: Vec<f64> = s2.iter().map(|v| 0.5 * v / (dx * dx)).collect();

        let max_s2 = s2.iter().cloned().fold(0.0, f64::max);
        let max_b = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut bound = f64::INFINITY;
        if max_s2 > 0.0 {
            bound = bound.min(CFL * dx * dx / max_s2);
        }
        if max_b > 0.0 {
            bound = bound.min(CFL * dx / max_b);
        }
        let mut op = Self {
            lower,
            upper,
            dt,
            drift_right,
            drift_left,
            diffusion,
            stability_bound: f64::INFINITY,
        };
        let max_out = (0..cells).map(|i| op.outflow_rate(i)).fold(0.0, f64::max);
        if max_out > 0.0 {
            // the diagonal of the step matrix must stay nonnegative
            bound = bound.min(1.0 / max_out);
        }
        op.stability_bound = bound;
        // relative slack so that a dt computed from the same formula passes
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::StabilityBound { dt, bound });
        }
        Ok(op)
    }

    /// Ornstein–Uhlenbeck drift `b(X) = −θX` with constant amplitude `σ`.
    pub fn ornstein_uhlenbeck(lower: f64, upper: f64, cells: usize, theta: f64, sigma: f64, dt: f64) -> Result<Self> {
        Self::new(lower, upper, cells, move |x| -theta * x, move |_| sigma, dt)
    }

    /// Largest admissible `dt` for the given model and grid.
    pub fn stability_bound_for(
        lower: f64,
        upper: f64,
        cells: usize,
        drift: impl Fn(f64) -> f64,
        sigma: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        match Self::new(lower, upper, cells, drift, sigma, f64::MIN_POSITIVE) {
            Ok(op) => Ok(op.stability_bound),
            Err(e) => Err(e),
        }
    }

    pub fn stability_bound(&self) -> f64 {
        self.stability_bound
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cells(&self) -> usize {
        self.diffusion.len()
    }

    fn outflow_rate(&self, i: usize) -> f64 {
        let n = self.cells();
        let mut r = 0.0;
        if i + 1 < n {
            r += self.drift_right[i] + self.diffusion[i];
        }
        if i > 0 {
            r += self.drift_left[i - 1] + self.diffusion[i];
        }
        r
    }

    fn check_grid(&self, rho: &DensityGrid) -> Result<()> {
        if rho.cells() != self.cells() {
            return Err(Error::DimensionMismatch {
                expected: self.cells(),
                found: rho.cells(),
            });
        }
        if rho.lower != self.lower || rho.upper != self.upper {
            return Err(Error::InvalidArgument("density and operator cover different domains".into()));
        }
        Ok(())
    }

    /// One explicit step. Written with the nonnegative matrix entries so no
    /// cancellation can produce a negative mass.
    pub fn step(&self, rho: &DensityGrid) -> Result<DensityGrid> {
        self.check_grid(rho)?;
        let n = self.cells();
        let m = &rho.masses;
        let dt = self.dt;
        let masses = (0..n)
            .map(|i| {
                let mut v = m[i] * (1.0 - dt * self.outflow_rate(i));
                if i > 0 {
                    v += dt * (self.drift_right[i - 1] + self.diffusion[i - 1]) * m[i - 1];
                }
                if i + 1 < n {
                    v += dt * (self.drift_left[i] + self.diffusion[i + 1]) * m[i + 1];
                }
                v
            })
            .collect();
        Ok(DensityGrid {
            lower: rho.lower,
            upper: rho.upper,
            masses,
        })
    }

    /// Exact fixed point of [`FokkerPlanck::step`], from the vanishing of
    /// every interface flux. Needs a positive amplitude everywhere.
    pub fn stationary(&self) -> Result<DensityGrid> {
        let n = self.cells();
        let mut log_m = vec![0.0; n];
        for k in 0..n - 1 {
            let forward = self.drift_right[k] + self.diffusion[k];
            let backward = self.drift_left[k] + self.diffusion[k + 1];
            if !(forward > 0.0 && backward > 0.0) {
                return Err(Error::InvalidArgument(
                    "stationary state needs positive transfer rates across every interface".into(),
                ));
            }
            log_m[k + 1] = log_m[k] + forward.ln() - backward.ln();
        }
        let top = log_m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let masses: Vec<f64> = log_m.iter().map(|l| (l - top).exp()).collect();
        DensityGrid::normalize(self.lower, self.upper, masses)
    }
}

/// One step of the scheme for the given drift `b` and amplitude `σ`.
pub fn fokker_planck_step(
    rho: &DensityGrid,
    drift: impl Fn(f64) -> f64,
    sigma: impl Fn(f64) -> f64,
    dt: f64,
) -> Result<DensityGrid> {
    FokkerPlanck::new(rho.lower, rho.upper, rho.cells(), drift, sigma, dt)?.step(rho)
}

/// Normalized cell masses of the Ornstein–Uhlenbeck equilibrium
/// `ρ*(X) ∝ exp(−θX²/σ²)` on the grid.
pub fn ou_stationary(lower: f64, upper: f64, cells: usize, theta: f64, sigma: f64) -> Result<DensityGrid> {
    DensityGrid::from_density(lower, upper, cells, |x| (-theta * x * x / (sigma * sigma)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceFailure {
    pub s: f64,
    pub t: f64,
    pub witness_t: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTrace {
    pub times: Vec<f64>,
    /// `‖ρ_t − ρ*‖₁` at each sampled time.
    pub distances: Vec<f64>,
    pub means: Vec<f64>,
    /// Largest `|Σm − 1|` seen after any step.
    pub max_mass_drift: f64,
    /// Largest one-step increase of the distance between samples.
    pub max_distance_increase: f64,
    pub monotone: bool,
    pub pairs_checked: usize,
    pub dominance_failures: Vec<DominanceFailure>,
    pub stationary: DensityGrid,
    pub final_density: DensityGrid,
}

/// Runs `steps` steps from `rho0`, sampling every `sample_every` steps (and
/// at the end). At every sample records the 1-norm distance to the discrete
/// equilibrium; afterwards checks that `(ρ_s, ρ*)` dominates `(ρ_t, ρ*)` for
/// every sampled pair `s < t`.
pub fn relaxation_run(
    rho0: &DensityGrid,
    op: &FokkerPlanck,
    steps: usize,
    sample_every: usize,
) -> Result<RelaxationTrace> {
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample interval must be positive".into()));
    }
    op.check_grid(rho0)?;
    let stationary = op.stationary()?;
    let star_state = stationary.to_state()?;

    let mut times = Vec::new();
    let mut distances = Vec::new();
    let mut means = Vec::new();
    let mut profiles = Vec::new();
    let mut record = |k: usize, rho: &DensityGrid| -> Result<()> {
        times.push(k as f64 * op.dt);
        distances.push(rho.l1_distance(&stationary)?);
        means.push(rho.mean());
        profiles.push(mixing_profile(&rho.to_state()?, &star_state)?);
        Ok(())
    };

    let mut rho = rho0.clone();
    let mut max_mass_drift: f64 = (rho.total_mass() - 1.0).abs();
    record(0, &rho)?;
    for k in 1..=steps {
        rho = op.step(&rho)?;
        max_mass_drift = max_mass_drift.max((rho.total_mass() - 1.0).abs());
        if k % sample_every == 0 || k == steps {
            record(k, &rho)?;
        }
    }

    let max_distance_increase = distances
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);

    let mut pairs_checked = 0;
    let mut dominance_failures = Vec::new();
    for s in 0..profiles.len() {
        for t in (s + 1)..profiles.len() {
            pairs_checked += 1;
            let v = dominates_profiles(&profiles[s], &profiles[t], DEFAULT_TOL)?;
            if let Some((witness_t, gap)) = v.witness() {
                dominance_failures.push(DominanceFailure {
                    s: times[s],
                    t: times[t],
                    witness_t,
                    gap,
                });
            }
        }
    }

    Ok(RelaxationTrace {
        monotone: max_distance_increase <= MONOTONE_SLACK,
        times,
        distances,
        means,
        max_mass_drift,
        max_distance_increase,
        pairs_checked,
        dominance_failures,
        stationary,
        final_density: rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou(cells: usize) -> FokkerPlanck {
        let dx = 12.0 / cells as f64;
        FokkerPlanck::ornstein_uhlenbeck(-6.0, 6.0, cells, 1.0, 2f64.sqrt(), 0.4 * dx * dx / 2.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(DensityGrid::new(0.0, 1.0, vec![0.5, 0.6]).is_err());
        assert!(DensityGrid::new(0.0, 1.0, vec![1.5, -0.5]).is_err());
        assert!(DensityGrid::new(1.0, 0.0, vec![0.5, 0.5]).is_err());
        let g = DensityGrid::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(g.centers(), vec![0.125, 0.375, 0.625, 0.875]);
        assert!((g.mean() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stability_bound_is_enforced() {
        let dx: f64 = 0.06;
        let bound = FokkerPlanck::stability_bound_for(-6.0, 6.0, 200, |x| -x, |_| 2f64.sqrt()).unwrap();
        assert!((bound - 0.4 * dx * dx / 2.0).abs() < 1e-15);
        let err = FokkerPlanck::ornstein_uhlenbeck(-6.0, 6.0, 200, 1.0, 2f64.sqrt(), 2.0 * bound).unwrap_err();
        assert!(matches!(err, Error::StabilityBound { .. }));
    }

    #[test]
    fn pure_diffusion_keeps_symmetry_and_mass() {
        let rho = DensityGrid::gaussian(-1.0, 1.0, 50, 0.0, 0.2).unwrap();
        let op = FokkerPlanck::new(-1.0, 1.0, 50, |_| 0.0, |_| 0.5, 1e-3).unwrap();
        let mut r = rho;
        for _ in 0..200 {
            r = op.step(&r).unwrap();
            assert!((r.total_mass() - 1.0).abs() < 1e-12);
            let m = r.masses();
            for i in 0..25 {
                assert!((m[i] - m[49 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pure_diffusion_equilibrates_to_uniform() {
        let op = FokkerPlanck::new(0.0, 1.0, 20, |_| 0.0, |_| 1.0, 1e-3).unwrap();
        let star = op.stationary().unwrap();
        let uniform = DensityGrid::uniform(0.0, 1.0, 20).unwrap();
        assert!(star.l1_distance(&uniform).unwrap() < 1e-13);
        let rho0 = DensityGrid::point_mass(0.0, 1.0, 20, 0.1).unwrap();
        let tr = relaxation_run(&rho0, &op, 3000, 100).unwrap();
        assert!(*tr.distances.last().unwrap() < 1e-3);
        assert!(tr.monotone);
    }

    #[test]
    fn stationary_is_a_fixed_point() {
        let op = ou(200);
        let star = op.stationary().unwrap();
        let next = op.step(&star).unwrap();
        assert!(next.l1_distance(&star).unwrap() < 1e-13);
        let tr = relaxation_run(&star, &op, 50, 10).unwrap();
        assert!(tr.distances.iter().all(|&d| d < 1e-12));
    }

    #[test]
    fn discrete_equilibrium_is_close_to_gaussian() {
        let star = ou(200).stationary().unwrap();
        let analytic = ou_stationary(-6.0, 6.0, 200, 1.0, 2f64.sqrt()).unwrap();
        // first-order upwinding shifts the discrete equilibrium by O(dx)
        assert!(star.l1_distance(&analytic).unwrap() < 0.025);
        assert!(star.mean().abs() < 1e-12);
    }
}
