//! Genus two partition functions from sewing two tori (the epsilon scheme)
//! or self-sewing one torus (the rho scheme).
//!
//! Conventions: `q = exp(2 pi i tau)`, Eisenstein series are normalised so that
//! `E_2(q) = -1/12 + 2 sum sigma_1(n) q^n`, and the torus lattice is
//! `2 pi i (Z tau + Z)`.

pub mod cli;
pub mod comparison;
pub mod error;
pub mod extract;
pub mod graphs;
pub mod lattice;
pub mod linalg;
pub mod modular_forms;
pub mod series;
pub mod sewing_eps;
pub mod sewing_rho;
pub mod verify;
pub mod voa_fock;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// `2 pi i`.
pub const TWO_PI_I: C64 = C64::new(0.0, 2.0 * std::f64::consts::PI);
