//! Classification invariants of graph C*-algebras for finite directed
//! graphs: ideal lattices, K-theory diagrams with positive cones, the
//! projection monoid, maximal tails, and the Ext obstruction groups.

pub mod compare;
pub mod cone;
pub mod corpus;
pub mod diagrams;
pub mod error;
pub mod fd;
pub mod graph;
pub mod group;
pub mod intmat;
pub mod io;
pub mod ktheory;
pub mod lattice;
pub mod limits;
pub mod lp;
pub mod monoid;
pub mod report;
pub mod vset;

pub use error::{Error, Result};
pub use graph::{Cycle, Graph, GraphDescription};
pub use limits::Limits;
pub use vset::VertexSet;
