//! Liouvillian solvability of ξ″ = gξ via the Kovacic algorithm, and its
//! application to the axisymmetric Bianchi IX model.
//!
//! - [`algebra`]: exact rational-function arithmetic over Q(i)
//! - [`kovacic`]: cases 1, 2, 3 and Galois group labels
//! - [`model`]: Hamiltonian, Taub family, variational-equation coefficients
//! - [`dynamics`]: DOP853 integration and Poincaré sections
//! - [`evidence`]: numerical checks of closed forms, identities and monodromy

pub mod algebra;
pub mod dynamics;
pub mod evidence;
pub mod kovacic;
pub mod model;
pub mod numeric;
