//! Quantum walks built from a coisometry and a unitary involution: operator
//! construction, spectral verification of the walk/discriminant
//! correspondence, spectral sets of Sierpiński-type lattices, and time
//! evolution with localization diagnostics.

pub mod battery;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod mapping;
pub mod operators;
pub mod sierpinski;
pub mod spectral;

pub use error::{Error, Result};
