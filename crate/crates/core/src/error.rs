use thiserror::Error;

use crate::halfint::HalfInt;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid basis label (n={n}, m={m})")]
    InvalidLabel { n: i64, m: i64 },

    #[error("invalid field label (n={n}, r={r}, m={m})")]
    InvalidPsiLabel { n: HalfInt, r: HalfInt, m: HalfInt },

    #[error("negative representation label k={0}")]
    NegativeSpin(HalfInt),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("base mismatch: left operand based at k={left}, right operand maps into k={right}")]
    BaseMismatch { left: HalfInt, right: HalfInt },

    #[error("element lies outside the spanned basis (n_max={nmax}): residual {residual}")]
    OutsideSpan { nmax: i64, residual: String },

    #[error("degenerate basis norm for n={n}, r={r} at k={k}")]
    DegenerateNorm { n: HalfInt, r: HalfInt, k: HalfInt },

    #[error("non-invertible scalar: {0}")]
    NotInvertible(String),

    #[error("pole: denominator vanishes at evaluation point")]
    Pole,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("k={k} exceeds configured cap {cap}")]
    KCap { k: HalfInt, cap: HalfInt },
}

pub type Result<T> = std::result::Result<T, Error>;
