//! Graph ingestion, clique-complex lifting and higher-order incidence matrices.

mod graph;
mod incidence;
mod lift;

pub use graph::{load_graph, write_edges, Graph, LoadReport};
pub use incidence::{incidence_matrix, IncidenceMatrix};
pub use lift::{clique_lift, SimplicialComplex, DEFAULT_MAX_ORDER};
