pub mod analysis;
pub mod catalog;
pub mod error;
pub mod grs;
pub mod lattice;
pub mod linalg;
pub mod rootdatum;
pub mod superalgebra;
pub mod supermatrix;

pub use error::{Error, Result};
