//! Degree statistics of random recursive trees.
//!
//! Two exchangeable constructions are provided: direct uniform attachment
//! ([`rrt`]) and the discrete Kingman merge chain ([`kingman`]). The
//! [`exact`] module enumerates both at small `n` with rational arithmetic,
//! [`stats`] holds degree profiles and the Poisson limit reference laws, and
//! [`montecarlo`] runs seeded, thread-count independent experiments.

pub mod error;
pub mod exact;
pub mod kingman;
pub mod montecarlo;
pub mod rng;
pub mod rrt;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use tree::{DegreeMultiset, DegreeVector, RootedTree, Vertex};

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "rrtlab/v1";
