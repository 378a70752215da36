//! Exact construction and verification of an explicit basis for the module of
//! logarithmic derivations of the cone over the type D Shi arrangement.

pub mod arrangement;
pub mod bernoulli;
pub mod cli;
pub mod exactpoly;
pub mod oracle;
pub mod shi_basis;
pub mod verify;
