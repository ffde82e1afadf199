//! Kähler geometry of pure quantum states on a truncated Fock space.
//!
//! The crate evaluates observables as Kählerian functions on the Hilbert
//! space and on its projectivisation, builds the Fubini–Study geometry and
//! the Hamiltonian vector fields of those functions, treats the coordinate
//! observables `x`, `p`, `alpha`, `alpha_bar` as noncommutative coordinates,
//! and relates the two pictures through coordinate-map Jacobians. Every
//! identity is checked numerically by the [`suite`] module, which backs the
//! `kahler-qm` command-line tool.
//!
//! ```
//! use kahler_qm::fock::{build_coordinate_operators, FockSpace, StateVector};
//! use kahler_qm::kahler::{eval_f, kahler_product, Picture};
//!
//! let space = FockSpace::new(1, 6, 1.0).unwrap();
//! let ops = build_coordinate_operators(&space);
//! let phi = StateVector::basis(&space, &[1]).unwrap();
//! let product = kahler_product(ops.x(0), ops.p(0), &phi, Picture::Homogeneous).unwrap();
//! let direct = eval_f(&(ops.x(0) * ops.p(0)), &phi).unwrap().value;
//! assert!((product - direct).norm() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod fields;
pub mod flow;
pub mod fock;
pub mod geometry;
pub mod kahler;
pub mod nc;
pub mod numdiff;
pub mod pullback;
pub mod random;
pub mod reconstruct;
pub mod suite;

pub use error::{Error, Result};
pub use fock::{CoordinateOperators, FockSpace, Operator, Space, StateVector, C64};
pub use kahler::Picture;
