//! Exact computation of sheaf cohomology on finite topological spaces.

pub mod corpus;
pub mod error;
pub mod exactalg;
pub mod finspace;
pub mod godement;
pub mod random;
pub mod sheaves;
pub mod spectral;

pub use error::{Error, Result};
