//! The abstract semantic graph: node taxonomy, queries, persistence and
//! merging.

mod graph;
mod merge;
pub mod naming;
mod node;
mod persist;
mod types;

pub use graph::{Asg, Edge, EdgeKind};
pub use node::{
    Base, BasePattern, ClassInfo, Dependency, FreeOrigin, HeaderInfo, Language, Location, MemberPattern, MemberPatternKind,
    Node, NodeData, NodeKind, Param, ParamPattern, Signature, TemplateBody, TemplateInfo, TemplateParam, TypeBase, TypeExpr,
};
pub use persist::{diff, AsgDiff, FORMAT_VERSION};
pub use types::{
    fundamental_id, is_fundamental_id, spelling_of, Access, ExportFlag, NodeId, QualifiedType, Qualifier, FUNDAMENTALS, ROOT,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsgError {
    #[error("no node named `{0}`")]
    NotFound(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("`{id}` is a {found}, expected a {expected}")]
    KindError { id: String, expected: &'static str, found: NodeKind },
    #[error("merge conflict on `{id}`: {reason}")]
    MergeConflict { id: String, reason: String },
    #[error("format error: {0}")]
    FormatError(String),
    #[error("edge from `{from}` to missing node `{target}`")]
    Dangling { from: String, target: String },
    #[error("scope chain of `{0}` is cyclic")]
    ScopeCycle(String),
    #[error("scope chain of `{0}` does not reach `::`")]
    Orphan(String),
}
