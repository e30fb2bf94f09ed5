//! Measure cones, mixing distance and reversibility of stochastic maps on
//! finite classical and quantum state spaces.
//!
//! - [`cone`]: signed measures and Hermitian operators as ordered vector
//!   spaces, states, minimal decompositions and orthogonality.
//! - [`mixdist`]: mixing-distance profiles of state pairs and the dominance
//!   preorder between pairs.
//! - [`classical`]: column-stochastic matrices, isometry and reversibility.
//! - [`transport`]: LP oracle deciding whether a stochastic map sends one
//!   pair to another, with Farkas and dominance certificates.
//! - [`quantum`]: Kraus channels, block isometries and their left inverses.
//! - [`dynamics`]: damped motion, Fokker–Planck relaxation and the integer
//!   shift semigroup.

pub mod classical;
pub mod cone;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod mixdist;
pub mod quantum;
pub mod sample;
pub mod simplex;
pub mod transport;

pub use classical::{classify_reversible, is_isometry, verify_stochastic, Reversibility, StochasticMatrix};
pub use cone::{is_orthogonal, ConeElement, HermitianOperator, MinimalDecomposition, SignedMeasure, State};
pub use error::{Error, Result};
pub use mixdist::{dominates, mixing_profile, DominanceVerdict, MixingProfile};
pub use quantum::{IsometryBlueprint, KrausChannel};
pub use transport::{find_transport, TransportCertificate};
