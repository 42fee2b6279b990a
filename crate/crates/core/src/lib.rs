//! Exact-arithmetic multipath cohomology of directed graphs.
//!
//! The pipeline: enumerate the path poset of a digraph, evaluate the
//! algebra/bimodule functor on its multipaths and coverings, assemble the
//! signed cochain complex, and compute Betti numbers by exact sparse
//! elimination over ℚ or GF(p). Around that core sit sign-assignment
//! machinery, acyclic-matching shortcuts, the chromatic complexes with
//! their comparison maps, and a bar-complex Hochschild oracle.

pub mod algebra;
pub mod chromatic;
pub mod cli;
pub mod complex;
pub mod digraph;
pub mod error;
pub mod functor;
pub mod hochschild;
pub mod homology;
pub mod morse;
pub mod pathposet;
pub mod selftest;
pub mod signs;

pub use error::{Error, Result};
