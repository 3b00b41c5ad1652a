//! Exact arithmetic of integral quadratic forms.
//!
//! The crate is organised around [`QuadraticForm`], an integer-valued form
//! stored through its even symmetric Hessian matrix. On top of it:
//!
//! * [`local`]: square classes, Hilbert symbols, Hasse invariants, Jordan
//!   decompositions over `Z_p` and local/global isometry tests.
//! * [`densities`]: local representation densities and Eisenstein
//!   coefficients of theta series.
//! * [`theta`]: theta series coefficients by lattice point enumeration and
//!   their modular transformation data.
//! * [`genus`]: isometry testing, automorphism groups, Kneser neighbors,
//!   genus enumeration and masses.
//! * [`clifford`]: Clifford algebras, reflections and spinor norms.

pub mod arith;
pub mod clifford;
pub mod densities;
pub mod error;
pub mod forms;
pub mod genus;
pub mod linalg;
pub mod local;
pub mod theta;

pub use error::{Error, Result};
pub use forms::{BasisChange, QuadraticForm};
