//! Cover-encoding maps for combinatorial optimization.
//!
//! Two problem families are covered:
//!
//! * quadratic spin glasses, encoded by spanning forests whose components
//!   freeze groups of spins parallel ([`spinglass`], [`encoding`]);
//! * number partitioning, encoded by prepartitions ([`npp`]).
//!
//! On top of these sit adaptive walks on the encoded and direct landscapes
//! ([`search`]), the restart-walk p-value protocol and cluster statistics
//! ([`analysis`]), and a small exhaustive toolkit for encoding digraphs and
//! their collapsing maps ([`semigroup`]).

pub mod analysis;
pub mod encoding;
pub mod error;
pub mod io;
pub mod npp;
pub mod rng;
pub mod search;
pub mod semigroup;
pub mod spinglass;
mod union_find;

pub use error::{Error, Result};
pub use union_find::UnionFind;
