//! Exact-arithmetic toolkit for finitely presented models of quantum symmetry
//! groups: magic unitaries, metric and graph relation schemes, truncated
//! Bratteli diagrams, the Cantor tower, matrix models and classical oracles.
//!
//! Everything is computed over the rationals. Relations live in a free
//! \*-algebra ([`ncstar`]); combinatorial inputs live in [`spaces`]; the
//! builders in [`presentations`] turn the latter into the former, and
//! [`classical`] / [`models`] provide independent ways of checking them.

pub mod classical;
pub mod continuum;
pub mod error;
pub mod matrix;
pub mod models;
pub mod ncstar;
pub mod presentations;
pub mod rational;
pub mod spaces;

pub use error::{Error, Result};
pub use matrix::RatMatrix;
pub use rational::Q;
