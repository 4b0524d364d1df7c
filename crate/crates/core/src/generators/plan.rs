use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use super::names;
use super::{closure_with_exclusions, exported_elsewhere, infer_call_policy, is_exception_class, resolve_aliases, CallPolicy, GenerateConfig, GenerateError};
use crate::asg::{is_fundamental_id, naming, Access, Asg, ExportFlag, Node, NodeData, NodeId, NodeKind};
use crate::doc::{convert_with_lints, AsgResolver};
use crate::lint::{codes, Lint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnitKind {
    Namespace,
    Enumeration,
    Variable,
    OverloadSet,
    Class,
}

/// A wrapped member inlined into its parent's export file (or one function
/// of an overload set).
#[derive(Clone, Debug)]
pub struct UnitMember {
    pub id: NodeId,
    pub py_name: String,
    pub policy: CallPolicy,
    /// Name of the setter decorator, and the Python name it is bound to.
    pub decorator: Option<(String, String)>,
    pub doc: String,
}

/// The content of one export file.
#[derive(Clone, Debug)]
pub struct ExportUnit {
    pub kind: UnitKind,
    /// The wrapped entity; for an overload set, its enclosing scope.
    pub owner: NodeId,
    /// Canonical name the file name is derived from.
    pub key: String,
    pub digest: String,
    pub path: PathBuf,
    pub members: Vec<UnitMember>,
    pub doc: String,
    /// Incomplete class wrapped without members.
    pub opaque: bool,
    pub exception: bool,
    /// Wrapped public bases, in declaration order.
    pub bases: Vec<NodeId>,
}

impl ExportUnit {
    /// Node ids this file wraps.
    pub fn covered(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        if self.kind != UnitKind::OverloadSet {
            out.push(self.owner.clone());
        }
        out.extend(self.members.iter().map(|m| m.id.clone()));
        out
    }
}

/// Everything the templates need, computed once.
pub struct Plan<'a> {
    pub asg: &'a Asg,
    pub config: &'a GenerateConfig,
    /// Dotted extension module name.
    pub module: String,
    /// Units in emission order: by key, bases before derived classes.
    pub units: Vec<ExportUnit>,
    /// Aliases bound by the decorator script.
    pub aliases: Vec<NodeId>,
    /// Other modules providing referenced wrappers.
    pub dependencies: BTreeSet<String>,
    pub lints: Vec<Lint>,
    wrapped: BTreeSet<NodeId>,
}

type Check = Result<Option<Lint>, GenerateError>;

impl<'a> Plan<'a> {
    pub fn build(asg: &'a Asg, config: &'a GenerateConfig) -> Result<Plan<'a>, GenerateError> {
        let module = config.module_name();
        let selected: BTreeSet<NodeId> = config.nodes.iter().filter(|id| asg.contains(id.as_str())).cloned().collect();
        let (wrapped, refused) = if config.closure {
            closure_with_exclusions(asg, &selected, &module)
        } else {
            let refused = selected.iter().filter(|id| asg.get(id.as_str()).is_some_and(|n| n.export == ExportFlag::No)).cloned().collect();
            let kept = selected
                .iter()
                .filter(|id| asg.get(id.as_str()).is_some_and(|n| n.export != ExportFlag::No && !exported_elsewhere(n, &module)))
                .cloned()
                .collect();
            (kept, refused)
        };
        let mut plan = Plan {
            asg,
            config,
            module,
            units: Vec::new(),
            aliases: Vec::new(),
            dependencies: BTreeSet::new(),
            lints: Vec::new(),
            wrapped,
        };
        for id in &refused {
            if asg.get(id.as_str()).is_some_and(|n| n.kind().is_class_like()) && is_exception_class(asg, id) {
                plan.lints.push(Lint::new(
                    codes::LOST_TRANSLATION,
                    id.as_str(),
                    "exception class is not exported; throwing it will not raise a translated Python exception",
                ));
            }
        }
        plan.collect_units()?;
        plan.order_units()?;
        plan.lints.sort_by(|a, b| (a.code, &a.name, &a.message).cmp(&(b.code, &b.name, &b.message)));
        plan.lints.dedup();
        Ok(plan)
    }

    pub fn is_wrapped(&self, id: &NodeId) -> bool {
        self.wrapped.contains(id)
    }

    /// Python expression (relative to the wrapped module, or absolute for a
    /// dependency module) of a class or enumeration wrapper.
    pub fn wrapper_expr(&self, id: &NodeId) -> Option<String> {
        let node = self.asg.get(id.as_str())?;
        let path = names::python_path(self.asg, id)?;
        if self.is_wrapped(id) {
            Some(names::join("_lib", &path))
        } else {
            node.already_exported.as_ref().map(|m| names::join(m, &path))
        }
    }

    fn doc(&mut self, node: &Node) -> String {
        if node.doc.is_empty() {
            return String::new();
        }
        let resolver = AsgResolver::new(self.asg, self.module.clone(), node.id.clone());
        let (text, lints) = convert_with_lints(&node.doc, &resolver, node.id.as_str());
        self.lints.extend(lints);
        text
    }

    fn satisfied(&mut self, target: &NodeId) -> bool {
        if is_fundamental_id(target) || self.wrapped.contains(target) {
            return true;
        }
        match self.asg.get(target.as_str()) {
            Some(n) if exported_elsewhere(n, &self.module) => {
                self.dependencies.insert(n.already_exported.clone().expect("marked"));
                true
            }
            _ => false,
        }
    }

    /// Whether the types `node` mentions can be wrapped: `Ok(Some(lint))`
    /// means skip it.
    fn check_types(&mut self, node: &Node) -> Check {
        for ty in node.qualified_types() {
            if ty.has_array() {
                return Ok(Some(Lint::new(codes::C_ARRAY, node.id.as_str(), "C arrays and pointers to arrays are not wrapped")));
            }
            let resolved = resolve_aliases(self.asg, ty);
            if let Some(target) = self.asg.get(resolved.target.as_str()) {
                if target.export == ExportFlag::No {
                    return Ok(Some(Lint::new(
                        codes::EXCLUDED_DEPENDENCY,
                        node.id.as_str(),
                        format!("skipped: `{}` is marked as not exported", target.id),
                    )));
                }
            }
            if !self.satisfied(&resolved.target) {
                return Err(GenerateError::UnsatisfiedDependency { from: node.id.to_string(), target: resolved.target.to_string() });
            }
        }
        Ok(None)
    }

    fn member(&mut self, node: &Node) -> Result<Option<UnitMember>, GenerateError> {
        if let Some(lint) = self.check_types(node)? {
            self.lints.push(lint);
            return Ok(None);
        }
        let py_name = match node.kind() {
            NodeKind::Constructor => "__init__".to_string(),
            NodeKind::Function | NodeKind::Method => match names::callable_name(node) {
                Some(n) => n,
                None => {
                    log::info!("{}: no Python counterpart, skipped", node.id);
                    return Ok(None);
                }
            },
            _ => node.local_name.clone(),
        };
        let policy = node.signature().map_or(CallPolicy::Default, |s| infer_call_policy(self.asg, &s.returns));
        let doc = self.doc(node);
        Ok(Some(UnitMember { id: node.id.clone(), py_name, policy, decorator: None, doc }))
    }

    /// Aliases of a wrapped class or enumeration (no pointer or reference).
    fn bindable(&mut self, alias: &Node) -> bool {
        let NodeData::Alias { underlying } = &alias.data else { return false };
        let target = resolve_aliases(self.asg, underlying);
        let is_type = self.asg.get(target.target.as_str()).is_some_and(|t| t.kind().is_class_like() || t.kind() == NodeKind::Enumeration);
        target.is_value() && is_type && (self.wrapped.contains(&target.target) || self.satisfied(&target.target))
    }

    fn unit(&self, kind: UnitKind, owner: NodeId, key: String) -> ExportUnit {
        let digest = names::digest(&key);
        let ext = self.config.module.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "cpp".into());
        let file = format!("{}{digest}.{ext}", self.config.prefix);
        let path = self.config.module.with_file_name(file);
        ExportUnit { kind, owner, key, digest, path, members: Vec::new(), doc: String::new(), opaque: false, exception: false, bases: Vec::new() }
    }

    fn collect_units(&mut self) -> Result<(), GenerateError> {
        let asg = self.asg;
        let mut overloads: BTreeMap<String, (NodeId, Vec<&Node>)> = BTreeMap::new();
        let ids: Vec<NodeId> = self.wrapped.iter().cloned().collect();
        for id in &ids {
            let node = asg.get(id.as_str()).expect("closure holds existing nodes");
            let parent = asg.parent_of(id.as_str());
            let in_class = parent.is_some_and(|p| p.kind().is_class_like());
            match node.kind() {
                NodeKind::Namespace if !node.id.is_root() => {
                    let mut unit = self.unit(UnitKind::Namespace, id.clone(), id.to_string());
                    unit.doc = self.doc(node);
                    self.units.push(unit);
                }
                NodeKind::Enumeration => {
                    let mut unit = self.unit(UnitKind::Enumeration, id.clone(), id.to_string());
                    unit.doc = self.doc(node);
                    let mut values: Vec<&Node> = asg.children(id.as_str()).filter(|c| self.wrapped.contains(&c.id)).collect();
                    values.sort_by_key(|n| decl_order(n));
                    for v in values {
                        let doc = self.doc(v);
                        unit.members.push(UnitMember { id: v.id.clone(), py_name: v.local_name.clone(), policy: CallPolicy::Default, decorator: None, doc });
                    }
                    self.units.push(unit);
                }
                NodeKind::Variable if !in_class => {
                    if let Some(lint) = self.check_types(node)? {
                        self.lints.push(lint);
                        continue;
                    }
                    let mut unit = self.unit(UnitKind::Variable, id.clone(), id.to_string());
                    unit.doc = self.doc(node);
                    self.units.push(unit);
                }
                NodeKind::Function if !in_class => {
                    let scope = node.parent().cloned().unwrap_or_else(NodeId::root);
                    let key = naming::overload_set_name(&asg.scope_path(&scope), &node.local_name);
                    overloads.entry(key).or_insert_with(|| (scope, Vec::new())).1.push(node);
                }
                NodeKind::Class | NodeKind::Specialization => {
                    let unit = self.class_unit(node)?;
                    self.units.push(unit);
                }
                NodeKind::Method | NodeKind::Constructor | NodeKind::Field | NodeKind::Enumerator => {
                    let parent_wrapped = node.parent().is_some_and(|p| self.wrapped.contains(p));
                    if !parent_wrapped && node.access == Access::Public {
                        let target = node.parent().map(NodeId::to_string).unwrap_or_default();
                        return Err(GenerateError::UnsatisfiedDependency { from: id.to_string(), target });
                    }
                }
                NodeKind::Alias => {
                    let parent_ok = parent.is_some_and(|p| p.kind() == NodeKind::Namespace || self.wrapped.contains(&p.id));
                    if parent_ok && self.bindable(node) {
                        self.aliases.push(id.clone());
                    }
                }
                _ => {}
            }
        }
        for (key, (scope, mut functions)) in overloads {
            functions.sort_by_key(|n| decl_order(n));
            let mut unit = self.unit(UnitKind::OverloadSet, scope, key);
            for f in functions {
                if let Some(m) = self.member(f)? {
                    unit.members.push(m);
                }
            }
            if !unit.members.is_empty() {
                self.units.push(unit);
            }
        }
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for unit in &self.units {
            if let Some(first) = seen.insert(unit.digest.clone(), unit.key.clone()) {
                return Err(GenerateError::HashCollision { first, second: unit.key.clone(), digest: unit.digest.clone() });
            }
        }
        Ok(())
    }

    fn class_unit(&mut self, node: &'a Node) -> Result<ExportUnit, GenerateError> {
        let asg = self.asg;
        let info = node.class_info().expect("class-like");
        let mut unit = self.unit(UnitKind::Class, node.id.clone(), node.id.to_string());
        unit.doc = self.doc(node);
        unit.exception = is_exception_class(asg, &node.id);
        for b in info.bases.iter().filter(|b| b.access == Access::Public) {
            if self.wrapped.contains(&b.target) {
                unit.bases.push(b.target.clone());
            } else if let Some(n) = asg.get(b.target.as_str()).filter(|n| exported_elsewhere(n, &self.module)) {
                self.dependencies.insert(n.already_exported.clone().expect("marked"));
                unit.bases.push(b.target.clone());
            }
        }
        if !info.is_complete {
            unit.opaque = true;
            self.lints.push(Lint::new(codes::INCOMPLETE_CLASS, node.id.as_str(), "class is only declared; wrapped without members"));
            return Ok(unit);
        }
        let mut members: Vec<&Node> = asg
            .children(node.id.as_str())
            .filter(|m| m.access == Access::Public && self.wrapped.contains(&m.id))
            .filter(|m| matches!(m.kind(), NodeKind::Method | NodeKind::Constructor | NodeKind::Field))
            .collect();
        members.sort_by(|a, b| member_order(a).cmp(&member_order(b)));
        for m in &members {
            if let Some(member) = self.member(m)? {
                unit.members.push(member);
            }
        }
        let mut count = 0;
        for member in &mut unit.members {
            let m = asg.get(member.id.as_str()).expect("member exists");
            let decorated = matches!(m.data, NodeData::Method { is_static: false, origin: None, .. }) && member.policy == CallPolicy::InternalReference;
            if decorated {
                let suffix = if count == 0 { String::new() } else { format!("_{count}") };
                let setter = if m.local_name == "operator[]" { "__setitem__".to_string() } else { member.py_name.clone() };
                member.decorator = Some((format!("method_decorator_{}{suffix}", unit.digest), setter));
                count += 1;
            }
        }
        self.overload_lints(node, &unit);
        Ok(unit)
    }

    /// Static/non-static mixes and const overloads declared before an
    /// identical non-const one.
    fn overload_lints(&mut self, class: &Node, unit: &ExportUnit) {
        let mut groups: BTreeMap<&str, Vec<&Node>> = BTreeMap::new();
        for m in &unit.members {
            let node = self.asg.get(m.id.as_str()).expect("member exists");
            if node.kind() == NodeKind::Method {
                groups.entry(node.local_name.as_str()).or_default().push(node);
            }
        }
        let scope = self.asg.scope_path(&class.id);
        for (name, mut methods) in groups {
            methods.sort_by_key(|n| decl_order(n));
            let set = naming::overload_set_name(&scope, name);
            let statics = methods.iter().filter(|m| m.is_static_method()).count();
            if statics > 0 && statics < methods.len() {
                self.lints.push(Lint::new(
                    codes::OVERLOAD_STATIC,
                    set.clone(),
                    "static and non-static overloads share a name; all of them become static in Python",
                ));
            }
            let shadowed = methods.iter().enumerate().any(|(i, first)| {
                methods[i + 1..].iter().any(|later| first.is_const_method() && !later.is_const_method() && same_params(first, later))
            });
            if shadowed {
                self.lints.push(Lint::new(
                    codes::OVERLOAD_CONST,
                    set,
                    "a const overload is declared before a non-const one with the same parameters and is hidden in Python",
                ));
            }
        }
    }

    /// Sorts units by key, then moves each class after its wrapped bases.
    fn order_units(&mut self) -> Result<(), GenerateError> {
        let mut pending = std::mem::take(&mut self.units);
        pending.sort_by(|a, b| a.key.cmp(&b.key));
        let keys: BTreeSet<String> = pending.iter().map(|u| u.key.clone()).collect();
        let mut done: BTreeSet<String> = BTreeSet::new();
        while !pending.is_empty() {
            let ready = pending
                .iter()
                .position(|u| u.bases.iter().all(|b| done.contains(b.as_str()) || !keys.contains(b.as_str())))
                .unwrap_or(0);
            let unit = pending.remove(ready);
            done.insert(unit.key.clone());
            self.units.push(unit);
        }
        Ok(())
    }
}

fn same_params(a: &Node, b: &Node) -> bool {
    let spell = |n: &Node| n.params().unwrap_or(&[]).iter().map(|p| p.ty.without_top_const()).collect::<Vec<_>>();
    spell(a) == spell(b)
}

/// Declaration order: header, then position.
fn decl_order(n: &Node) -> (Option<NodeId>, u32, u32, NodeId) {
    let (line, column) = n.location.map_or((0, 0), |l| (l.line, l.column));
    (n.header.clone(), line, column, n.id.clone())
}

/// Constructors first, then members grouped by name; declaration order
/// inside a group.
fn member_order(n: &Node) -> (u8, String, (Option<NodeId>, u32, u32, NodeId)) {
    let rank = if n.kind() == NodeKind::Constructor { 0 } else { 1 };
    (rank, n.local_name.clone(), decl_order(n))
}
