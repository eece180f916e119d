//! Nonlinear supercoherent states of the supersymmetric harmonic oscillator.
//!
//! Everything is computed twice: once through closed forms built on the
//! generalized hypergeometric function `0F2`, and once through truncated
//! Fock-space matrices. The matrix path is the oracle; the closed forms
//! are the product.

pub mod coherent;
pub mod fock;
pub mod geomphase;
pub mod hypergeom;
pub mod scan;
pub mod supercoherent;
pub mod susy;
pub mod validate;

mod error;

pub use error::Error;

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

pub type Result<T> = std::result::Result<T, Error>;
