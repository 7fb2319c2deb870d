//! Matroids, toric ideals of matroids, and a binomial Buchberger engine for
//! deciding whether those ideals have quadratic Gröbner bases made of
//! symmetric exchanges, on small ground sets.

pub mod catalog;
pub mod cli;
pub mod groebner;
pub mod matroid;
pub mod toric;

pub use matroid::{Basis, Matroid, MatroidError};
