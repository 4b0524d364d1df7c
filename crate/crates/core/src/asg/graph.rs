use std::collections::{BTreeMap, BTreeSet, VecDeque};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::node::{Node, NodeData, NodeKind};
use super::types::{fundamental_id, Access, NodeId, FUNDAMENTALS, ROOT};
use super::AsgError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeKind {
    Scope,
    DeclaredIn,
    BaseOf { access: Access },
    UnderlyingType,
    ParameterType { index: usize },
    ReturnType,
    FieldType,
    TemplateArgument { index: usize },
    SpecializationOf,
    TemplateMemberType,
}

/// Directed edge from the node that mentions to the node mentioned.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    #[serde(flatten)]
    pub kind: EdgeKind,
}

/// The abstract semantic graph: file-system and C++ declaration nodes keyed
/// by canonical global name, with scope edges stored on the nodes and a
/// derived child index.
#[derive(Clone, Debug)]
pub struct Asg {
    nodes: BTreeMap<NodeId, Node>,
    children: BTreeMap<NodeId, BTreeSet<NodeId>>,
    search_paths: Vec<String>,
}

impl PartialEq for Asg {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.search_paths == other.search_paths
    }
}

impl Eq for Asg {}

impl Default for Asg {
    fn default() -> Self {
        Asg::new()
    }
}

impl Asg {
    /// A graph holding only the global namespace and the fundamental types.
    pub fn new() -> Self {
        let mut asg = Asg { nodes: BTreeMap::new(), children: BTreeMap::new(), search_paths: Vec::new() };
        asg.insert(Node::new(NodeId::root(), "", None, NodeData::Namespace));
        for name in FUNDAMENTALS {
            asg.insert(Node::new(fundamental_id(name), *name, Some(NodeId::root()), NodeData::Fundamental));
        }
        asg
    }

    pub(crate) fn from_parts(nodes: Vec<Node>, search_paths: Vec<String>) -> Self {
        let mut asg = Asg { nodes: BTreeMap::new(), children: BTreeMap::new(), search_paths };
        for node in nodes {
            asg.insert(node);
        }
        asg
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn get(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    /// Mutable access to a node. The scope parent is not reachable through
    /// this handle; use [`Asg::reparent`].
    pub fn get_mut(&mut self, id: &str) -> Option<&mut Node> {
        self.nodes.get_mut(id)
    }

    pub fn lookup(&self, global_name: &str) -> Result<&Node, AsgError> {
        self.nodes.get(global_name).ok_or_else(|| AsgError::NotFound(global_name.to_string()))
    }

    pub fn root(&self) -> &Node {
        &self.nodes[ROOT]
    }

    /// All nodes, ordered by id.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn search_paths(&self) -> &[String] {
        &self.search_paths
    }

    pub fn add_search_path(&mut self, path: String) {
        if !self.search_paths.contains(&path) {
            self.search_paths.push(path);
        }
    }

    /// Inserts or replaces a node, keeping the child index in sync.
    pub fn insert(&mut self, node: Node) {
        if let Some(old) = self.nodes.get(&node.id) {
            if let Some(p) = old.parent.clone() {
                if let Some(set) = self.children.get_mut(&p) {
                    set.remove(&node.id);
                }
            }
        }
        if let Some(p) = &node.parent {
            self.children.entry(p.clone()).or_default().insert(node.id.clone());
        }
        self.nodes.insert(node.id.clone(), node);
    }

    /// Removes a node. Children are left in place; callers removing a scope
    /// remove its members too.
    pub fn remove(&mut self, id: &str) -> Option<Node> {
        let node = self.nodes.remove(id)?;
        if let Some(p) = &node.parent {
            if let Some(set) = self.children.get_mut(p) {
                set.remove(id);
            }
        }
        Some(node)
    }

    /// Removes a node together with everything scoped inside it.
    pub fn remove_subtree(&mut self, id: &str) -> Vec<Node> {
        let mut removed = Vec::new();
        let mut stack = vec![NodeId::from(id)];
        while let Some(current) = stack.pop() {
            stack.extend(self.children(current.as_str()).map(|c| c.id.clone()));
            if let Some(n) = self.remove(current.as_str()) {
                removed.push(n);
            }
        }
        self.children.remove(id);
        removed
    }

    pub fn reparent(&mut self, id: &str, parent: NodeId) {
        if let Some(mut node) = self.remove(id) {
            node.parent = Some(parent);
            self.insert(node);
        }
    }

    /// Nodes scoped directly inside `id`, ordered by id.
    pub fn children<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a Node> + 'a {
        self.children.get(id).into_iter().flatten().filter_map(move |c| self.nodes.get(c))
    }

    pub fn parent_of(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)?.parent.as_ref().and_then(|p| self.nodes.get(p))
    }

    /// Chain of enclosing scopes from the direct parent up to `::`.
    pub fn ancestors(&self, id: &str) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut current = self.parent_of(id);
        while let Some(node) = current {
            out.push(node);
            if out.len() > self.nodes.len() {
                break;
            }
            current = self.parent_of(node.id.as_str());
        }
        out
    }

    /// Prefix used to name entities scoped inside `id`: empty for `::`,
    /// `::a::B` for `class ::a::B`.
    pub fn scope_path(&self, id: &NodeId) -> String {
        if id.is_root() {
            return String::new();
        }
        super::types::spelling_of(id).to_string()
    }

    pub fn is_internal(&self, node: &Node) -> bool {
        node.header
            .as_ref()
            .and_then(|h| self.get(h.as_str()))
            .and_then(Node::header_info)
            .is_some_and(|h| h.dependency == super::node::Dependency::Internal)
    }

    /// Nodes of the given kinds whose id matches `pattern` (unanchored
    /// search), in id order. An empty kind set means every kind.
    pub fn iterate(&self, kinds: &BTreeSet<NodeKind>, pattern: Option<&str>) -> Result<Vec<&Node>, AsgError> {
        let re = pattern.map(Regex::new).transpose().map_err(|e| AsgError::InvalidPattern(e.to_string()))?;
        Ok(self
            .nodes
            .values()
            .filter(|n| kinds.is_empty() || kinds.contains(&n.kind()))
            .filter(|n| re.as_ref().is_none_or(|re| re.is_match(n.id.as_str())))
            .collect())
    }

    pub fn classes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(|n| n.kind().is_class_like())
    }

    /// Classes deriving from `base`: direct ones, or the transitive closure
    /// without `base` itself.
    pub fn subclasses(&self, base: &str, recursive: bool) -> Result<Vec<&Node>, AsgError> {
        let node = self.lookup(base)?;
        if !node.kind().is_class_like() {
            return Err(AsgError::KindError { id: base.to_string(), expected: "class", found: node.kind() });
        }
        let mut derived: BTreeMap<&NodeId, BTreeSet<&NodeId>> = BTreeMap::new();
        for class in self.classes() {
            for b in &class.class_info().expect("class-like").bases {
                derived.entry(&b.target).or_default().insert(&class.id);
            }
        }
        let mut found: BTreeSet<&NodeId> = BTreeSet::new();
        let mut queue: VecDeque<&NodeId> = VecDeque::from([&node.id]);
        while let Some(current) = queue.pop_front() {
            for sub in derived.get(current).into_iter().flatten() {
                if *sub != &node.id && found.insert(sub) && recursive {
                    queue.push_back(sub);
                }
            }
        }
        Ok(found.into_iter().map(|id| &self.nodes[id]).collect())
    }

    /// Specialization nodes that some qualified type (or base) refers to and
    /// that have no definition yet.
    pub fn incomplete_referenced_specializations(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for node in self.nodes.values() {
            let mut targets: Vec<&NodeId> = node.qualified_types().into_iter().map(|t| &t.target).collect();
            if let Some(c) = node.class_info() {
                targets.extend(c.bases.iter().map(|b| &b.target));
            }
            for t in targets {
                if let Some(target) = self.get(t.as_str()) {
                    if target.kind() == NodeKind::Specialization && !target.is_complete() {
                        out.insert(target.id.clone());
                    }
                }
            }
        }
        out
    }

    /// Every scope and semantic edge, derived from node properties, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for node in self.nodes.values() {
            node_edges(node, &mut out);
        }
        out.sort();
        out
    }

    /// Checks the structural invariants: scope forest rooted at `::`, no
    /// dangling edges, ids unique by construction.
    pub fn validate(&self) -> Result<(), AsgError> {
        let edges = self.edges();
        for e in &edges {
            if !self.nodes.contains_key(&e.target) {
                return Err(AsgError::Dangling { from: e.source.to_string(), target: e.target.to_string() });
            }
        }
        for node in self.nodes.values() {
            if node.kind() == NodeKind::Header || node.id.is_root() {
                continue;
            }
            let mut steps = 0;
            let mut current = node;
            while let Some(p) = current.parent.as_ref() {
                current = self.nodes.get(p).ok_or_else(|| AsgError::Dangling {
                    from: node.id.to_string(),
                    target: p.to_string(),
                })?;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(AsgError::ScopeCycle(node.id.to_string()));
                }
            }
            if !current.id.is_root() {
                return Err(AsgError::Orphan(node.id.to_string()));
            }
        }
        Ok(())
    }
}

fn node_edges(node: &Node, out: &mut Vec<Edge>) {
    let mut push = |target: &NodeId, kind: EdgeKind| {
        out.push(Edge { source: node.id.clone(), target: target.clone(), kind });
    };
    if let Some(p) = &node.parent {
        push(p, EdgeKind::Scope);
    }
    if let Some(h) = &node.header {
        push(h, EdgeKind::DeclaredIn);
    }
    match &node.data {
        NodeData::Variable { ty } | NodeData::Field { ty, .. } => push(&ty.target, EdgeKind::FieldType),
        NodeData::Function(sig) => {
            push(&sig.returns.target, EdgeKind::ReturnType);
            for (index, p) in sig.params.iter().enumerate() {
                push(&p.ty.target, EdgeKind::ParameterType { index });
            }
        }
        NodeData::Method { signature, origin, .. } => {
            push(&signature.returns.target, EdgeKind::ReturnType);
            let receiver = origin.iter().map(|o| &o.receiver);
            for (index, p) in receiver.chain(signature.params.iter()).enumerate() {
                push(&p.ty.target, EdgeKind::ParameterType { index });
            }
        }
        NodeData::Constructor { params, .. } => {
            for (index, p) in params.iter().enumerate() {
                push(&p.ty.target, EdgeKind::ParameterType { index });
            }
        }
        NodeData::Class(c) => {
            for b in &c.bases {
                push(&b.target, EdgeKind::BaseOf { access: b.access });
            }
        }
        NodeData::Specialization { template, args, class } => {
            push(template, EdgeKind::SpecializationOf);
            for (index, a) in args.iter().enumerate() {
                push(&a.target, EdgeKind::TemplateArgument { index });
            }
            for b in &class.bases {
                push(&b.target, EdgeKind::BaseOf { access: b.access });
            }
        }
        NodeData::Alias { underlying } => push(&underlying.target, EdgeKind::UnderlyingType),
        NodeData::ClassTemplate(t) => {
            let mut refs = Vec::new();
            for p in &t.params {
                if let Some(d) = &p.default {
                    d.referenced_nodes(&mut refs);
                }
            }
            if let Some(body) = &t.definition {
                for b in &body.bases {
                    b.ty.referenced_nodes(&mut refs);
                }
                for m in &body.members {
                    use super::node::MemberPatternKind as K;
                    match &m.kind {
                        K::Field { ty, .. } => ty.referenced_nodes(&mut refs),
                        K::Method { returns, params, .. } => {
                            returns.referenced_nodes(&mut refs);
                            params.iter().for_each(|p| p.ty.referenced_nodes(&mut refs));
                        }
                        K::Constructor { params, .. } => params.iter().for_each(|p| p.ty.referenced_nodes(&mut refs)),
                        K::Alias { underlying } => underlying.referenced_nodes(&mut refs),
                        K::Destructor { .. } => {}
                    }
                }
            }
            refs.sort();
            refs.dedup();
            for r in &refs {
                push(r, EdgeKind::TemplateMemberType);
            }
        }
        NodeData::Header(_)
        | NodeData::Fundamental
        | NodeData::Namespace
        | NodeData::Enumeration { .. }
        | NodeData::Enumerator { .. }
        | NodeData::Destructor { .. } => {}
    }
}
