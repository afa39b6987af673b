//! Exact symbolic computation with differential forms on almost complex
//! manifolds: structure equations, bidegree splitting, transversality of
//! `(p,p)`-forms, first-order deformation checks, and obstruction criteria.

pub mod acs;
pub mod catalog;
pub mod cli;
pub mod deform;
pub mod dsl;
pub mod error;
pub mod exterior;
pub mod obstruct;
pub mod pkahler;
pub mod symexpr;

#[cfg(test)]
mod testkit;

pub use error::{Error, Result};
