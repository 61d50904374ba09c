//! Dynamics and Conley-index toolkit for the extended modified van der Pol
//! oscillator
//!
//! ```text
//! x' = y
//! y' = -(x^2 - theta) y - x (x + d)(x + e) / (d e)
//! ```
//!
//! * [`model`] holds the vector field, its Jacobian and the closed-form
//!   classification of the three equilibria.
//! * [`flow`] integrates trajectories, shoots saddle manifolds, finds the
//!   limit cycle near the Hopf point and brackets saddle connections in theta.
//! * [`conley`] is exact Z2 algebra: posets, Morse decompositions,
//!   connection matrices and transition matrices.

pub mod conley;
pub mod flow;
pub mod model;

pub use model::{Equilibrium, State, SystemParams};
