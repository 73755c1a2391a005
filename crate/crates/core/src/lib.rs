pub mod bits;
pub mod bounds;
pub mod cli;
pub mod clique;
pub mod distinguish;
pub mod enumeration;
pub mod error;
pub mod families;
pub mod graph;
pub mod interval;

pub use error::{Error, Result};
pub use graph::{doubling_compatible, DegreeProfile, DoublingPredicate, LabeledGraph};
