//! Fuzzy attribute implications whose semantics is parameterized by finite
//! monoids of isotone Galois connections over finite residuated chains.

pub mod cli;
pub mod config;
pub mod context;
pub mod error;
pub mod fset;
pub mod gconn;
pub mod lattice;
pub mod proof;
pub mod semantics;

pub use error::{Error, Result};
