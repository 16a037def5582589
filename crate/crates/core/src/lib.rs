//! Exact-arithmetic laboratory for uniform Diophantine approximation.
//!
//! Everything numeric is certified: quantities are exact rationals, or
//! intervals with rational endpoints that provably contain the true value.
//! On top of that substrate the crate provides best-approximation
//! enumeration for systems of linear forms under arbitrary norms, explicit
//! constructions of vectors and matrices with prescribed Dirichlet constant,
//! Dirichlet-constant estimation, transference boxes, and the closed-form
//! measure constants used by the covering arguments.

pub mod bestapprox;
pub mod cli;
pub mod constants;
pub mod constructions;
pub mod error;
pub mod exactnum;
pub mod normspace;
pub mod spectrum;
pub mod transference;

pub use error::Error;
pub use exactnum::{ExactReal, IntervalReal, Rational};

pub type Result<T> = std::result::Result<T, Error>;
