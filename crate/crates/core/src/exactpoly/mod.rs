//! Exact rational arithmetic and sparse multivariate polynomials under the
//! pure lexicographic order `x1 > x2 > ... > z`.

mod monomial;
mod poly;
mod rational;
mod unipoly;

pub use monomial::{Monomial, MAX_VARS};
pub use poly::{default_names, sum_tree, Poly};
pub use rational::{denominator_lcm, ParseRationalError, Rational};
pub use unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),
    #[error("division is not exact")]
    NotExact,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("variable index {index} out of range for {nvars} variables")]
    VarOutOfRange { index: usize, nvars: usize },
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("{0} variables exceeds the supported maximum")]
    TooManyVariables(usize),
    #[error("degree {degree} exceeds homogenization degree {target}")]
    DegreeTooLarge { degree: u32, target: u32 },
}
