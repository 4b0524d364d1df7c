//! Parse a subset of C++ headers into an abstract semantic graph, transform
//! it with controller passes and emit Boost.Python wrappers.

pub mod asg;
pub mod controllers;
pub mod doc;
pub mod generators;
pub mod lint;
pub mod parser;
pub mod registry;

pub use asg::{Asg, AsgError, Node, NodeData, NodeId, NodeKind, QualifiedType};
pub use lint::Lint;
