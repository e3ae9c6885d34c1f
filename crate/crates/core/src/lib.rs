pub mod chordal;
pub mod graph;
pub mod hardness;
pub mod host;
pub mod io;
pub mod oracle;
pub mod representation;
pub mod solver;
pub mod structure;
pub mod template;

pub use graph::{Graph, VertexSet};
pub use host::{Host, HostTree};
pub use representation::{Mode, Representation};
