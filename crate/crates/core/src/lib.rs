//! Snapping capability and singularity distance of isostatic frameworks
//! built from bars and triangular plates.
//!
//! The total Green-Lagrange strain energy of a framework is a quadratic form
//! in the lifted vector `(1, L'_1^2, ..., L'_b^2)` of squared edge lengths.
//! Its density `U / (A L)` induces a pseudometric on realizations, which is
//! used here to measure
//!
//! - the *snappability* of an undeformed realization: the lowest energy
//!   density of a shaky saddle realization that can be reached along a
//!   monotone deformation path, and
//! - the *singularity distance*: the lowest energy density of a shaky
//!   realization reachable along such a path, found by constrained
//!   minimization over the shakiness variety.
//!
//! The crate is `no_std` (with `alloc`). The default `std` feature only
//! enables parallel execution of independent solver work items.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod continuation;
pub mod critical;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod pathtrack;
mod par;
pub mod rigidity;
pub mod strain;

pub use error::{Error, Result};
pub use model::{Configuration, Edge, Framework, Gauge, Knot, Plate, StrainModel};
