use std::collections::BTreeMap;

use crate::asg::{Asg, NodeId, NodeKind};
use crate::generators::names;

/// Sphinx cross-reference role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Meth,
    Func,
    Class,
    Attr,
    Mod,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Meth => "meth",
            Role::Func => "func",
            Role::Class => "class",
            Role::Attr => "attr",
            Role::Mod => "mod",
        }
    }
}

/// Maps a C++ name written in a comment to a role and a dotted Python path.
pub trait RefResolver {
    fn resolve(&self, name: &str) -> Option<(Role, String)>;
}

/// Resolves nothing.
pub struct NoResolver;

impl RefResolver for NoResolver {
    fn resolve(&self, _name: &str) -> Option<(Role, String)> {
        None
    }
}

/// Fixed table, keyed by the name as written.
#[derive(Clone, Debug, Default)]
pub struct MapResolver(pub BTreeMap<String, (Role, String)>);

impl MapResolver {
    pub fn with(mut self, name: &str, role: Role, path: &str) -> Self {
        self.0.insert(name.to_string(), (role, path.to_string()));
        self
    }
}

impl RefResolver for MapResolver {
    fn resolve(&self, name: &str) -> Option<(Role, String)> {
        self.0.get(name).cloned()
    }
}

/// Looks names up in the graph the way C++ would from `context`: the
/// context's own scope first, then each enclosing scope. Paths are prefixed
/// with the dotted module name.
pub struct AsgResolver<'a> {
    pub asg: &'a Asg,
    pub module: String,
    pub context: NodeId,
}

impl<'a> AsgResolver<'a> {
    pub fn new(asg: &'a Asg, module: impl Into<String>, context: NodeId) -> Self {
        AsgResolver { asg, module: module.into(), context }
    }

    fn scopes(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(node) = self.asg.get(self.context.as_str()) {
            if matches!(node.kind(), NodeKind::Namespace | NodeKind::Class | NodeKind::Specialization) {
                out.push(self.asg.scope_path(&node.id));
            }
            for a in self.asg.ancestors(node.id.as_str()) {
                out.push(self.asg.scope_path(&a.id));
            }
        }
        if !out.contains(&String::new()) {
            out.push(String::new());
        }
        out
    }

    fn find(&self, full: &str) -> Option<(Role, NodeId)> {
        for (prefix, role) in [("class ", Role::Class), ("enum ", Role::Class), ("typedef ", Role::Class)] {
            let id = format!("{prefix}{full}");
            if self.asg.contains(&id) {
                return Some((role, NodeId::new(id)));
            }
        }
        if let Some(n) = self.asg.get(full) {
            let role = match n.kind() {
                NodeKind::Namespace => Role::Mod,
                _ => Role::Attr,
            };
            return Some((role, n.id.clone()));
        }
        let call = format!("{full}(");
        let n = self.asg.nodes().find(|n| n.id.as_str().starts_with(&call))?;
        let role = if n.kind() == NodeKind::Function { Role::Func } else { Role::Meth };
        Some((role, n.id.clone()))
    }
}

impl RefResolver for AsgResolver<'_> {
    fn resolve(&self, name: &str) -> Option<(Role, String)> {
        let name = name.trim_end_matches("()");
        let candidates = match name.strip_prefix("::") {
            Some(abs) => vec![format!("::{abs}")],
            None => self.scopes().into_iter().map(|s| format!("{s}::{name}")).collect(),
        };
        for full in candidates {
            if let Some((role, id)) = self.find(&full) {
                let path = names::python_path(self.asg, &id)?;
                return Some((role, names::join(&self.module, &path)));
            }
        }
        None
    }
}
