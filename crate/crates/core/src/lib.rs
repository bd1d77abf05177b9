//! Exact and mean-field treatment of the Tavis-Cummings model across the
//! condensate to quantum-correlated crossover.
//!
//! * [`model`] builds the conserved-excitation blocks of the Hamiltonian.
//! * [`eigen`] finds their ground states (Sturm bisection + inverse iteration).
//! * [`observables`] turns a ground state into photon and matter statistics,
//!   `g²(0)`, linear entropy and density-matrix elements.
//! * [`variational`] solves the separable coherent-state mean field.
//! * [`sweep`] runs the above across manifolds and parameter grids.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod model;
pub mod observables;
pub mod sweep;
pub mod variational;

pub use error::{Error, Result};
pub use model::{ManifoldBasis, ModelParams, TridiagonalBlock};
pub use observables::{GroundState, ObservableRecord};
pub use variational::{MeanField, VariationalSolution};
