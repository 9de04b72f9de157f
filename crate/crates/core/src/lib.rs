//! Construction and verification toolkit for R_II-type orthogonal polynomial
//! sequences with quadratic factor (x - a_n)(x - b_n), specialized to
//! (x^2 + w^2): sequence generation, self-perturbations L_n = P_n - a_n P_{n-1},
//! the tridiagonal linear pencils (J, K, G) with their factorizations, and the
//! biorthogonality / zero-interlacing checks that come with them.
//!
//! Everything is desk scale (n <= 64, dense, double precision) with an exact
//! Gaussian-rational mode for the polynomial identities that should hold with
//! zero residual.

pub mod analysis;
pub mod biortho;
pub mod eigen;
pub mod error;
pub mod hypergeom;
pub mod pencil;
pub mod perturbation;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod recurrence;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{CPoly, Poly, QPoly};
pub use rational::GaussRational;
pub use recurrence::{GCRRSpec, RIIParams};
pub use scalar::Scalar;

pub use num::complex::Complex64;
