//! Nonabelian SL(2,C) representations of the genus one two-bridge knots
//! `J(2m, 2n)`, their adjoint twisted Alexander polynomials and the
//! nonabelian Reidemeister torsion.
//!
//! The polynomial is computed two independent ways: a closed form in the
//! Riley coordinates `(x, y)` and a Fox-calculus pipeline that differentiates
//! the concrete relator letter by letter. [`atap::cross_check`] compares them.

pub mod adjoint;
pub mod atap;
pub mod dd;
pub mod error;
pub mod fox;
pub mod freegroup;
pub mod laurent;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod sl2;

pub use error::{Error, Result};
pub use scalar::{Complex, Tolerances};
pub use sl2::{KnotParams, NonabelianRep};
