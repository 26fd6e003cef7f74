//! Independent sets in the discrete hypercube.
//!
//! Exact counting, closures and linkage, isoperimetry, the Lovász–Stein cover,
//! and the two-stage container approximation for sets in a `d`-regular
//! bipartite graph, all at sizes small enough to check exhaustively.

pub mod census;
pub mod cli;
pub mod combinatorics;
pub mod containers;
pub mod error;
pub mod graph;
pub mod graph_io;
pub mod iso;
pub mod structure;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::{build_hypercube, EdgeBoundary, Parity, RegularBipartiteGraph, Side};
pub use graph_io::{load_graph, parse_graph, write_graph};
pub use vertex_set::{Vertex, VertexSet};
