//! Schur rings over finite abelian groups: construction, enumeration,
//! structural decomposition, duality and schurity testing.

pub mod arith;
pub mod constructions;
pub mod enumeration;
pub mod classify;
pub mod cli;
pub mod aut;
pub mod error;
pub mod group;
pub mod perm;
pub mod schurity;
pub mod sring;

pub use error::{Error, Result};
