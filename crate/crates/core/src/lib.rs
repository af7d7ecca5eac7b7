//! Bootstrap percolation on rhombus tilings.
//!
//! Tilings are generated as multigrid duals ([`multigrid`]), turned into
//! labelled adjacency graphs ([`graph`]), evolved by threshold rules
//! ([`dynamics`]), inspected geometrically ([`analysis`]) and sampled by
//! Monte Carlo ([`percolation`]).

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod graph;
pub mod multigrid;
pub mod percolation;

pub use error::{Error, Result};
