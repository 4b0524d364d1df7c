use serde::{Deserialize, Serialize};

use super::graph::{Asg, Edge};
use super::node::Node;
use super::AsgError;

/// First line of every persisted graph.
pub const FORMAT_VERSION: &str = "asg-format/1";

#[derive(Serialize, Deserialize)]
struct Document {
    search_paths: Vec<String>,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Asg {
    /// Serializes the graph: a version line followed by a JSON document with
    /// `nodes` and `edges` arrays. Output is a pure function of the graph.
    pub fn save(&self) -> String {
        let doc = Document { search_paths: self.search_paths().to_vec(), nodes: self.nodes().cloned().collect(), edges: self.edges() };
        let body = serde_json::to_string_pretty(&doc).expect("graph serializes");
        format!("{FORMAT_VERSION}\n{body}\n")
    }

    pub fn load(text: &str) -> Result<Asg, AsgError> {
        let (version, body) = text.split_once('\n').unwrap_or((text, ""));
        if version.trim_end() != FORMAT_VERSION {
            return Err(AsgError::FormatError(format!("expected version header `{FORMAT_VERSION}`, found `{}`", version.trim_end())));
        }
        let doc: Document = serde_json::from_str(body).map_err(|e| AsgError::FormatError(e.to_string()))?;
        let mut ids = std::collections::BTreeSet::new();
        for n in &doc.nodes {
            if !ids.insert(n.id.clone()) {
                return Err(AsgError::FormatError(format!("duplicate node `{}`", n.id)));
            }
        }
        let asg = Asg::from_parts(doc.nodes, doc.search_paths);
        let mut stored = doc.edges;
        stored.sort();
        if stored != asg.edges() {
            return Err(AsgError::FormatError("edge list does not match node properties".into()));
        }
        asg.validate().map_err(|e| AsgError::FormatError(e.to_string()))?;
        Ok(asg)
    }
}

/// Structural difference between two graphs.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct AsgDiff {
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
    pub changed: Vec<String>,
    pub search_paths_differ: bool,
}

impl AsgDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty() && self.changed.is_empty() && !self.search_paths_differ
    }

    /// One line per difference: `- id`, `+ id`, `~ id`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for id in &self.only_left {
            out.push_str(&format!("- {id}\n"));
        }
        for id in &self.only_right {
            out.push_str(&format!("+ {id}\n"));
        }
        for id in &self.changed {
            out.push_str(&format!("~ {id}\n"));
        }
        if self.search_paths_differ {
            out.push_str("~ search paths\n");
        }
        out
    }
}

pub fn diff(left: &Asg, right: &Asg) -> AsgDiff {
    let mut d = AsgDiff::default();
    for node in left.nodes() {
        match right.get(node.id.as_str()) {
            None => d.only_left.push(node.id.to_string()),
            Some(other) if other != node => d.changed.push(node.id.to_string()),
            Some(_) => {}
        }
    }
    for node in right.nodes() {
        if !left.contains(node.id.as_str()) {
            d.only_right.push(node.id.to_string());
        }
    }
    d.search_paths_differ = left.search_paths() != right.search_paths();
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_round_trips() {
        let asg = Asg::new();
        let text = asg.save();
        assert!(text.starts_with("asg-format/1\n"));
        let back = Asg::load(&text).unwrap();
        assert_eq!(back, asg);
        assert!(diff(&asg, &back).is_empty());
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = Asg::new().save().replacen("asg-format/1", "asg-format/2", 1);
        assert!(matches!(Asg::load(&text), Err(AsgError::FormatError(_))));
    }

    #[test]
    fn corrupted_body_is_rejected() {
        let mut text = Asg::new().save();
        text.truncate(text.len() / 2);
        assert!(matches!(Asg::load(&text), Err(AsgError::FormatError(_))));
    }

    #[test]
    fn tampered_edges_are_rejected() {
        let text = Asg::new().save().replacen("\"kind\": \"scope\"", "\"kind\": \"return_type\"", 1);
        assert!(matches!(Asg::load(&text), Err(AsgError::FormatError(_))));
    }
}
