//! Cluster automorphism groups: exact seed mutation, automorphisms as
//! quadruples over a fixed root seed, generator extraction and relation search.
//!
//! Mutation paths are always written in application order (first step first).

pub mod autom;
pub mod catalog;
pub mod error;
pub mod exmatrix;
pub mod grouplab;
pub mod laurent;
pub mod perm;
pub mod search;
pub mod seeds;

pub use autom::{AutDump, AutQuad, Sign};
pub use error::{Error, Result};
pub use exmatrix::{ClassKey, ExchangeMatrix, MatrixFile, WeightSum, WeightedGraph};
pub use grouplab::{GenSet, Word};
pub use laurent::LaurentPoly;
pub use perm::Perm;
pub use search::{extract_generators, GenWord, Generators, Mode, SearchBounds};
pub use seeds::{ClusterPattern, LabeledSeed, TreePath};
