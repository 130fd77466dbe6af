//! Flows on Cayley graphs of free soluble groups.
//!
//! An element of the free soluble group `Sol(m, d)` of rank `m` and derived
//! length `d` is stored as a flow on the Cayley graph of `Sol(m, d-1)`, with
//! `Sol(m, 1) = Z^m` at the bottom of the tower. On top of that representation
//! the crate computes word lengths, dead-end depth, shortest relations and
//! growth data.

pub mod cli;
pub mod config;
pub mod deadend;
pub mod error;
pub mod flows;
pub mod geodesic;
pub mod growth;
pub mod relations;
pub mod tower;
pub mod words;

pub use config::{Limits, Parallelism};
pub use error::{Error, Result};
pub use flows::{CayleyGraph, EdgeKey, Flow, Lattice};
pub use tower::{GroupSpec, SolubleElement, SolubleGroup};
pub use words::{FreeWord, Letter};
