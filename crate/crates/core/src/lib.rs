//! Rank-one perturbations `T(x) = Sx + f(x)u` of cone automorphisms.
//!
//! The crate builds such operators for seven concrete cone families, checks
//! that they are positive and invertible, and searches for explicit points
//! `y ∈ K` whose preimage `T⁻¹y` lies outside `K`, certifying that `T` is not
//! an automorphism.
//!
//! * [`numerics`]: symmetric matrices, Jacobi eigenvalues, the simplex oracle.
//! * [`cones`]: membership margins, sampling, dual functionals, extremals.
//! * [`operators`]: functionals, maps, the perturbation and its inverse.
//! * [`witnesses`]: boundary bisection and the witness strategies.
//! * [`verify`]: property suites, golden scenarios and reports.
//! * [`text`]: parsers for the text forms and scenario configs.

pub mod cones;
pub mod error;
pub mod numerics;
pub mod operators;
pub mod rng;
pub mod text;
pub mod verify;
pub mod witnesses;

pub use error::{Error, Result};
pub use rng::RngStream;
