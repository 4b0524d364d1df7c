use super::graph::Asg;
use super::node::{Node, NodeData};
use super::types::ExportFlag;
use super::AsgError;

impl Asg {
    /// Unions `other` into this graph. On id collisions, a definition wins
    /// over a declaration, an explicit export flag from `other` replaces an
    /// unset one and `other`'s already-exported mark is kept. Contradictory
    /// structure is a [`AsgError::MergeConflict`] and leaves `self` untouched.
    pub fn merge(&mut self, other: &Asg) -> Result<(), AsgError> {
        let mut merged = self.clone();
        for theirs in other.nodes() {
            let node = match merged.get(theirs.id.as_str()) {
                None => theirs.clone(),
                Some(ours) => reconcile(ours, theirs)?,
            };
            merged.insert(node);
        }
        for path in other.search_paths() {
            merged.add_search_path(path.clone());
        }
        merged.validate()?;
        *self = merged;
        Ok(())
    }
}

fn conflict(id: &super::types::NodeId, reason: impl Into<String>) -> AsgError {
    AsgError::MergeConflict { id: id.to_string(), reason: reason.into() }
}

fn reconcile(ours: &Node, theirs: &Node) -> Result<Node, AsgError> {
    if ours.kind() != theirs.kind() {
        return Err(conflict(&ours.id, format!("{} vs {}", ours.kind(), theirs.kind())));
    }
    if ours.parent != theirs.parent {
        return Err(conflict(&ours.id, "different scope"));
    }
    let mut out = ours.clone();
    let take_theirs = match (&ours.data, &theirs.data) {
        (NodeData::Class(a), NodeData::Class(b)) => pick(&ours.id, a.is_complete, b.is_complete, a == b)?,
        (
            NodeData::Specialization { template: ta, args: aa, class: a },
            NodeData::Specialization { template: tb, args: ab, class: b },
        ) => {
            if ta != tb || aa != ab {
                return Err(conflict(&ours.id, "different template arguments"));
            }
            pick(&ours.id, a.is_complete, b.is_complete, a == b)?
        }
        (NodeData::ClassTemplate(a), NodeData::ClassTemplate(b)) => {
            if a.params != b.params {
                return Err(conflict(&ours.id, "different template parameters"));
            }
            pick(&ours.id, a.definition.is_some(), b.definition.is_some(), a == b)?
        }
        (NodeData::Header(_), NodeData::Header(_)) => false,
        (a, b) => {
            if a != b {
                return Err(conflict(&ours.id, "different signature"));
            }
            false
        }
    };
    if take_theirs {
        out.data = theirs.data.clone();
        out.header = theirs.header.clone();
        out.location = theirs.location;
    }
    if out.header.is_none() {
        out.header = theirs.header.clone();
        out.location = theirs.location;
    }
    if out.doc.is_empty() {
        out.doc = theirs.doc.clone();
    }
    if out.export == ExportFlag::Unset {
        out.export = theirs.export;
    }
    if theirs.already_exported.is_some() {
        out.already_exported = theirs.already_exported.clone();
    }
    Ok(out)
}

/// Whether to take the other side's definition: completeness wins, two
/// definitions must agree.
fn pick(id: &super::types::NodeId, ours_complete: bool, theirs_complete: bool, equal: bool) -> Result<bool, AsgError> {
    match (ours_complete, theirs_complete) {
        (true, true) if !equal => Err(conflict(id, "two different definitions")),
        (false, true) => Ok(true),
        _ => Ok(false),
    }
}
