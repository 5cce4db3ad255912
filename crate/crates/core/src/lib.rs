//! Lattice counting in quaternion orders.
//!
//! The crate is organised bottom up: exact integer and rational kernels
//! ([`arith`], [`linalg`]), the quaternion algebra itself ([`quat`]),
//! lattices inside a maximal order ([`lattice`]), small coprime linear
//! combinations ([`coprime`]), enumeration and the injection certificate
//! ([`counting`]), balanced conjugates ([`balance`]), Hecke combinations and
//! exponent calculators ([`amplifier`]) and the experiment driver ([`cli`]).

pub mod amplifier;
pub mod arith;
pub mod balance;
pub mod cli;
pub mod coprime;
pub mod counting;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod quat;

pub use error::{Error, Result};
