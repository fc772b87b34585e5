//! Classical laboratory for Trotterized real-time dynamics of the 1D
//! Fermi-Hubbard model.
//!
//! Qubit convention used throughout: the electron at site `j` with spin up
//! lives on qubit `2j`, spin down on qubit `2j + 1`, and qubit 0 is the least
//! significant bit of a basis-state index. Letter strings and bit strings are
//! printed with qubit 0 leftmost.

pub mod circuit;
pub mod error;
pub mod exact;
pub mod harness;
pub mod linalg;
pub mod mitigation;
pub mod model;
pub mod mps;
pub mod rng;
pub mod statevector;
pub mod tolerance;
pub mod trotter;

pub use error::{Error, Result};
