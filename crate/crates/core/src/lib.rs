//! Generalized Szász–Kantorovich operators built from Charlier polynomials.
//!
//! The crate is organised bottom-up:
//!
//! - [`charlier`]: Charlier polynomials and the operator weight law
//!   (Poisson(1) convolved with a generalized negative binomial).
//! - [`quadrature`]: Gauss–Legendre rules used for the Kantorovich cell averages.
//! - [`operators`]: center maps and the four operator families.
//! - [`moments`]: closed-form moments next to their series counterparts.
//! - [`bounds`]: moduli of continuity/smoothness and error-bound certificates.
//! - [`library`]: the built-in test functions with analytic moduli.
//! - [`report`] and [`cli`]: tabular CSV/JSON output and the `opk` front end.

// `!(x > y)` comparisons deliberately reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod charlier;
pub mod cli;
mod error;
pub mod library;
pub mod moments;
pub mod operators;
pub mod quadrature;
pub mod report;
mod sum;

pub use error::{Error, Result};
pub use sum::CompensatedSum;
