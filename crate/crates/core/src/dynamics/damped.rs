//! Free motion with linear friction, `Ẍ = −κẊ`.
//!
//! The flow has the closed form
//!
//! ```text
//! X(t) = X(0) + Ẋ(0)·(1 − e^{−κt})/κ,   Ẋ(t) = Ẋ(0)·e^{−κt}
//! ```
//!
//! which is defined for every real `t`, so `S_t⁻¹ = S_{−t}`. Motion reversal
//! `θ(X, V) = (X, −V)` nevertheless fails to undo it: `θ S_t θ S_t ≠ id`
//! whenever `V ≠ 0` and `t ≠ 0`. The speed `|Ẋ|` is a Lyapunov variable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub v: f64,
}

impl PhasePoint {
    pub fn new(x: f64, v: f64) -> Result<Self> {
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::InvalidArgument("phase point must be finite".into()));
        }
        Ok(Self { x, v })
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.v - other.v)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa <= 0.0 || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("friction κ must be positive, got {kappa}")));
    }
    Ok(())
}

/// `S_t(p)` for friction `κ > 0`; any real `t`.
pub fn damped_flow(p: PhasePoint, t: f64, kappa: f64) -> Result<PhasePoint> {
    check_kappa(kappa)?;
    // 1 − e^{−κt} without cancellation for small κt
    let decay_gap = -(-kappa * t).exp_m1();
    Ok(PhasePoint {
        x: p.x + p.v * decay_gap / kappa,
        v: p.v * (-kappa * t).exp(),
    })
}

/// `θ(X, V) = (X, −V)`, an involution.
pub fn time_inversion(p: PhasePoint) -> PhasePoint {
    PhasePoint { x: p.x, v: -p.v }
}

/// Distance between `θ⁻¹ S_t θ S_t (p)` and `p`. Zero exactly when the
/// motion-reversed trajectory returns to its origin.
pub fn motion_reversal_defect(p: PhasePoint, t: f64, kappa: f64) -> Result<f64> {
    let forward = damped_flow(p, t, kappa)?;
    let back = damped_flow(time_inversion(forward), t, kappa)?;
    Ok(time_inversion(back).distance(&p))
}

/// `|V(t)|` at each of the sorted `times`.
pub fn lyapunov_speed_trace(p: PhasePoint, kappa: f64, times: &[f64]) -> Result<Vec<f64>> {
    check_kappa(kappa)?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be sorted".into()));
    }
    times
        .iter()
        .map(|&t| Ok(damped_flow(p, t, kappa)?.v.abs()))
        .collect()
}

/// Moves every point of an ensemble along the flow; the ensemble stands in
/// for a phase-space density.
pub fn transport_ensemble(points: &[PhasePoint], t: f64, kappa: f64) -> Result<Vec<PhasePoint>> {
    points.iter().map(|&p| damped_flow(p, t, kappa)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_life_example() {
        let p = damped_flow(PhasePoint::new(0.0, 1.0).unwrap(), std::f64::consts::LN_2, 1.0).unwrap();
        assert!((p.x - 0.5).abs() < 1e-15);
        assert!((p.v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_time_is_identity_and_group_inverse() {
        let p = PhasePoint::new(0.3, -1.7).unwrap();
        assert_eq!(damped_flow(p, 0.0, 2.0).unwrap(), p);
        let q = damped_flow(damped_flow(p, 1.3, 2.0).unwrap(), -1.3, 2.0).unwrap();
        assert!(q.distance(&p) < 1e-12);
    }

    #[test]
    fn inversion_is_involution() {
        let p = PhasePoint::new(1.0, 2.0).unwrap();
        assert_eq!(time_inversion(p), PhasePoint { x: 1.0, v: -2.0 });
        assert_eq!(time_inversion(time_inversion(p)), p);
        let rest = PhasePoint::new(4.0, 0.0).unwrap();
        assert_eq!(time_inversion(rest).distance(&rest), 0.0);
    }

    #[test]
    fn reversal_defect_values() {
        let p = PhasePoint::new(0.0, 1.0).unwrap();
        // independent closed form: ((1−e)²V/κ, V(e²−1)) with e = e^{−κt}
        let e = (-1.0f64).exp();
        let expected = ((1.0 - e).powi(2)).hypot(e * e - 1.0);
        let d = motion_reversal_defect(p, 1.0, 1.0).unwrap();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 0.952_6).abs() < 1e-4);
        assert_eq!(motion_reversal_defect(PhasePoint::new(2.0, 0.0).unwrap(), 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(motion_reversal_defect(p, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn speed_trace() {
        let p = PhasePoint::new(0.0, 1.0).unwrap();
        let tr = lyapunov_speed_trace(p, 1.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(tr[0], 1.0);
        assert!((tr[1] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((tr[2] - (-2.0f64).exp()).abs() < 1e-15);
        let still = lyapunov_speed_trace(PhasePoint::new(3.0, 0.0).unwrap(), 1.0, &[0.0, 5.0]).unwrap();
        assert_eq!(still, vec![0.0, 0.0]);
        assert!(lyapunov_speed_trace(p, 1.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_nonpositive_friction() {
        assert!(damped_flow(PhasePoint::new(0.0, 1.0).unwrap(), 1.0, 0.0).is_err());
        assert!(PhasePoint::new(f64::NAN, 0.0).is_err());
    }
}
