//! Reduction of CM abelian varieties: enumerates CM types of a finite
//! Galois group, reduces them along Frobenius elements and decomposes the
//! resulting p-torsion into circular words and quasi-polarized pieces.

pub mod catalog;
pub mod cli;
pub mod cm;
pub mod error;
pub mod perm;
pub mod pipeline;
pub mod render;
pub mod words;

pub use error::{Error, Result};
