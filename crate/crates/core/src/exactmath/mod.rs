//! Exact integer and GF(2) linear algebra.
//!
//! Integer matrices use arbitrary-precision entries so that intermediate
//! growth during Smith reduction can never overflow. GF(2) matrices pack rows
//! into 64-bit words.

mod lattice;
mod matrix;
mod snf;
mod z2;

pub use lattice::{column_norms_ceil, lll_reduce, ReducedBasis};
pub use matrix::IntMatrix;
pub use snf::{minor_gcd, snf, SmithDecomposition};
pub use z2::{z2_in_span, z2_rank, EchelonBasis, Z2Matrix, Z2Vector};

pub(crate) use matrix::serialize_bigint_slice;
pub(crate) use snf::combinations;
