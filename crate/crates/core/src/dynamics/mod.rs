//! Time-parameterized families of stochastic maps.
//!
//! - [`damped`]: damped free motion. The flow extends to a group, yet it is
//!   not reversible under motion reversal.
//! - [`fokker_planck`]: one-dimensional Fokker–Planck relaxation toward a
//!   stationary density.
//! - [`shift`]: the integer shift semigroup. Every map is an isometry with a
//!   stochastic inverse on its range, but no map is onto.

pub mod damped;
pub mod fokker_planck;
pub mod shift;

pub use damped::{damped_flow, lyapunov_speed_trace, motion_reversal_defect, time_inversion, PhasePoint};
pub use fokker_planck::{fokker_planck_step, relaxation_run, DensityGrid, FokkerPlanck, RelaxationTrace};
pub use shift::{gamma, shift_map, shift_surjectivity_witness, ShiftState};
