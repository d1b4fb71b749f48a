//! Exact systems of partial isometries on finite metric trees.
//!
//! The crate works without `std`; it needs only an allocator. Every quantity
//! is an exact [`Scalar`], so equalities in the tests are equalities, not
//! tolerances.

#![no_std]

extern crate alloc;

pub mod approx;
pub mod catalog;
pub mod error;
pub mod heart;
pub mod lamination;
pub mod scalar;
pub mod suspension;
pub mod system;
pub mod tree;
pub mod words;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};
pub use system::{GeneratorSpec, IsometrySystem, PartialIsometry, PartialMap};
pub use tree::{Bridge, Edge, Embedding, MetricTree, Subtree, TreePoint};
pub use words::{Alphabet, BiinfiniteWord, InfiniteWord, Letter, Word};
