//! Cleaved-link algebras, tangle type D structures and their reduction by
//! cancellation.

pub mod algebra;
pub mod checks;
pub mod deltagen;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod planar;
pub mod tangle;
pub mod typed;

pub use error::{Error, Result};
