//! Exact minimum and parameterized vertex cover with component-aware branch-and-reduce
//! on a pool of worker threads.

pub mod engine;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod node;
pub mod oracle;
pub mod preprocess;
pub mod reduce;
pub mod registry;

pub use engine::{solve, Mode, SolveResult, SolverConfig, Stats};
pub use error::{Error, Result};
pub use graph::{StaticGraph, Vertex};
pub use node::DegreeWidth;
