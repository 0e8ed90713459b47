//! U(n)-invariant Kähler metrics on toric spaces, computed in symplectic
//! (action-angle) coordinates.
//!
//! The crate is organised bottom-up:
//! [`jets`] (Taylor arithmetic) → [`polytope`] (facet data) → [`potentials`]
//! (Kähler and t-potentials) → [`curvature`] (Hessians, scalar curvature,
//! Legendre duality) → [`scalarflat`] (boundary matching on the blow-up) →
//! [`asymptotics`] (decay at infinity). [`cli`] and [`report`] drive it all
//! from the command line.

// Guards are written as `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod jets;
pub mod linalg;
pub mod polytope;
pub mod potentials;
pub mod quadrature;
pub mod report;
pub mod scalarflat;

pub use error::{Error, Result};
pub use jets::TaylorJet;
pub use polytope::{AffineFunctional, DelzantPolytope, PolytopeKind};
pub use potentials::{RadialKahlerPotential, TPotential};
