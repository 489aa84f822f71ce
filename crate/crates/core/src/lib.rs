//! Feedback centralities on directed weighted graphs.
//!
//! Eigenvector centrality, Katz centrality, Katz prestige and PageRank (without
//! teleportation), the spread processes that define them, executable checks of
//! their axioms, and the constructions used to characterize them.

pub mod axioms;
pub mod centrality;
pub mod classes;
pub mod components;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod process;
pub mod scalar;
pub mod spectral;
pub mod transforms;

pub use centrality::{compute_measure, CentralityVector, Measure};
pub use classes::{classify, GraphClass};
pub use error::Error;
pub use graph::{ExactGraph, FloatGraph, Graph, NodeId};
pub use scalar::{Rational, Scalar};
