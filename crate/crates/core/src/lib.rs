//! Exact computer algebra for q-series identities of conformal field theory
//! characters.
//!
//! The crate is organized around one universal value type, [`qseries::QSeries`]:
//! a truncated Laurent series in `q` with exponents on a rational lattice and
//! arbitrary-precision integer coefficients. Everything else is built on top:
//!
//! - [`qseries`]: the exact series ring, q-Pochhammer symbols and Gaussian
//!   binomial coefficients;
//! - [`bivariate`]: finite Laurent polynomials in a second variable `z` with
//!   `QSeries` coefficients (two-variable characters);
//! - [`minimal_model`]: structural data of the minimal models M(p,p') --
//!   continued fractions, incidence/Cartan matrices, Takahashi lengths -- and
//!   the bosonic polynomial;
//! - [`bailey`]: bilateral Bailey pairs, their duals, and the Bailey lemma
//!   specializations;
//! - [`superconformal`]: N=1 and N=2 character series, spectral flow, and the
//!   flow-side sums built from the bosonic polynomial;
//! - [`fermionic`]: fermionic lattice sums, the enlarged-matrix systems, and a
//!   brute-force discovery oracle for their undetermined data;
//! - [`harness`]: a job runner that certifies each character identity by
//!   expanding both sides exactly and diffing coefficients.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod bailey;
pub mod bivariate;
pub mod fermionic;
pub mod harness;
pub mod minimal_model;
pub mod qseries;
pub mod rat;
pub mod superconformal;

pub use qseries::{QSeries, SignedMonomial, Validity};
pub use rat::Rat;
