//! Exact and numeric tools for the fuzzy sphere and its field bundles.

pub mod coefficients;
pub mod error;
pub mod halfint;
pub mod limits;
pub mod matrep;
pub mod poly;
pub mod psi;
pub mod surd;
pub mod symalg;
pub mod verify;

pub use error::{Error, Result};
pub use halfint::HalfInt;
