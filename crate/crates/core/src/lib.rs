//! Stability analysis and simulation of diffusively coupled network
//! dynamical systems.
//!
//! The crate models networks of identical nonlinear nodes exchanging state
//! through linear coupling along the edges of a graph. It provides:
//!
//! * graph construction, parsing and structural predicates ([`graph`]),
//! * node and network vector fields with analytic Jacobians ([`dynamics`]),
//! * coupling Laplacians, dense eigensolves, critical coupling strengths and
//!   stability verdicts ([`spectral`]),
//! * fixed-step and adaptive ODE integration of static and switched
//!   networks ([`sim`]),
//! * Lyapunov-based sufficient conditions for switching stability
//!   ([`lyapunov`]).
//!
//! Everything random is driven by explicit `u64` seeds and is reproducible
//! across runs on the same build.

pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lyapunov;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::RealMatrix;
