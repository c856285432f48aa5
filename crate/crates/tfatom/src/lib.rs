//! Thomas-Fermi atom solver and verification toolkit for the Z^{5/3}
//! quantum correction to the ground-state energy.
//!
//! The screening function f(x) solves f'' = f^{3/2}/sqrt(x) with f(0) = 1
//! and f(inf) = 0. From it the crate computes the correction coefficient
//! c = (4/9pi^2)(3pi/4)^{2/3} int f^2 dx two independent ways (closed form
//! and direct radial integration of the local correction density), and
//! verifies the intermediate identities of the derivation: exact moment
//! identities of f, equivalence of the two density forms, surface-term
//! vanishing, origin cancellation of the Coulomb subtraction, and the
//! semiclassical order counting behind the density formula.

pub mod correction;
pub mod error;
pub mod ode;
pub mod parallel;
pub mod potentials;
pub mod quadrature;
pub mod report;
pub mod semiclassical;
pub mod tf_solver;
pub mod verify;

pub use correction::{delta_e_closed, delta_e_oracle, schwinger_coefficient, CorrectionResult};
pub use error::{Result, TfError};
pub use potentials::{AtomicModel, PotentialField, PotentialKind};
pub use quadrature::{tf_moments, TfMoments};
pub use tf_solver::{solve_tf, TfParams, TfSolution};
