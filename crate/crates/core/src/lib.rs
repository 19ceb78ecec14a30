//! Coamoebas of simplicial real algebraic hypersurfaces.
//!
//! A real Laurent polynomial with exactly `n + 1` monomials whose exponents
//! span an `n`-simplex has a coamoeba (closure of the argument image in the
//! torus `Tⁿ`) that is the complement of `d₁⋯dₙ` open zonotopes, where the
//! `dᵢ` are the Smith invariants of the exponent matrix. This crate builds
//! that arrangement exactly, computes the action of complex conjugation on
//! the ℤ₂-homology of the coamoeba, the number of real components, and the
//! resulting Galois-maximality defect. Every quantity is computed by two
//! independent routes which are compared on each run:
//!
//! * closed-form ranks vs. a rank assembled from geometric slice counts,
//! * a half-circle membership predicate vs. zonotope containment,
//! * closed-form Betti numbers vs. a brute-force cubical complex.
//!
//! Angles are rationals measured in turns (1 turn = 2π) and every predicate
//! is exact.

pub mod coamoeba;
pub mod cubical;
pub mod error;
pub mod exactmath;
pub mod homology;
pub mod model;

pub use error::{Error, Result};
