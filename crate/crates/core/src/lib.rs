//! Finite-field towers, multivariate polynomials and the hidden polynomial
//! equations public-key scheme with its signature and signcryption modes,
//! plus the Imai-Matsumoto scheme and the linearization attack on it.

#![allow(clippy::needless_range_loop)]

pub mod alphabet;
pub mod attack;
pub mod error;
pub mod ext;
pub mod format;
mod fqpoly;
pub mod gf;
pub mod hpe;
pub mod im;
pub mod linalg;
pub mod mvpoly;
pub mod sig;
pub mod upoly;

pub use error::{Error, Result};
pub use ext::{ExtensionField, FieldElement, FrobeniusTable, MultTensor};
pub use gf::{BaseField, Fq};
