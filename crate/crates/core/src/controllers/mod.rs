//! Graph-transformation passes run between parsing and generation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::asg::{naming, Asg, AsgError, EdgeKind, ExportFlag, FreeOrigin, Node, NodeData, NodeId, NodeKind, Signature};
use crate::lint::{codes, Lint};

/// Value of a controller option (`--key=value` on the command line; a key
/// given several times becomes a list).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OptionValue {
    Bool(bool),
    Str(String),
    List(Vec<String>),
}

impl OptionValue {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            OptionValue::Bool(b) => Some(*b),
            OptionValue::Str(s) => match s.as_str() {
                "true" | "1" | "yes" | "on" => Some(true),
                "false" | "0" | "no" | "off" => Some(false),
                _ => None,
            },
            OptionValue::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Vec<String> {
        match self {
            OptionValue::Bool(b) => vec![b.to_string()],
            OptionValue::Str(s) => vec![s.clone()],
            OptionValue::List(v) => v.clone(),
        }
    }
}

pub type Options = BTreeMap<String, OptionValue>;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("unknown controller `{0}`")]
    UnknownController(String),
    #[error("controller `{controller}`: option `{option}`: {message}")]
    BadOption { controller: String, option: String, message: String },
    #[error(transparent)]
    Asg(#[from] AsgError),
}

/// A controller pass: a pure function of the graph and its options,
/// returning the lints it raised.
pub type Controller = fn(&mut Asg, &Options) -> Result<Vec<Lint>, ControlError>;

fn check_options(controller: &str, options: &Options, known: &[&str]) -> Result<(), ControlError> {
    match options.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(ControlError::BadOption { controller: controller.into(), option: k.clone(), message: "unknown option".into() }),
        None => Ok(()),
    }
}

/// Refactors free operators into methods, then (unless `clean=false`)
/// removes declarations the library does not depend on.
pub fn default_controller(asg: &mut Asg, options: &Options) -> Result<Vec<Lint>, ControlError> {
    check_options("default", options, &["clean"])?;
    let clean_enabled = match options.get("clean") {
        None => true,
        Some(v) => v.as_bool().ok_or_else(|| ControlError::BadOption {
            controller: "default".into(),
            option: "clean".into(),
            message: "expected true or false".into(),
        })?,
    };
    let lints = refactor_operators(asg);
    if clean_enabled {
        clean(asg);
    }
    Ok(lints)
}

/// Marks every class and enumeration non-exportable except the classes
/// listed in `keep` and all their subclasses.
pub fn subset_controller(asg: &mut Asg, options: &Options) -> Result<Vec<Lint>, ControlError> {
    check_options("subset", options, &["keep"])?;
    let keep = options.get("keep").map(OptionValue::as_list).unwrap_or_default();
    let mut kept = BTreeSet::new();
    for name in &keep {
        let node = asg.lookup(name)?;
        kept.insert(node.id.clone());
        kept.extend(asg.subclasses(name, true)?.into_iter().map(|n| n.id.clone()));
    }
    let targets: Vec<NodeId> = asg
        .nodes()
        .filter(|n| n.kind().is_class_like() || n.kind() == NodeKind::Enumeration)
        .map(|n| n.id.clone())
        .collect();
    for id in targets {
        let flag = if kept.contains(&id) { ExportFlag::Yes } else { ExportFlag::No };
        if let Some(n) = asg.get_mut(id.as_str()) {
            n.export = flag;
        }
    }
    Ok(Vec::new())
}

const BINARY_OPERATORS: &[&str] = &["==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%", "<<", ">>"];
const UNARY_OPERATORS: &[&str] = &["+", "-", "!", "~", "*", "&", "++", "--"];

/// Class-like node a parameter type designates (through aliases), unless
/// it is passed by pointer or array.
fn receiver_class<'a>(asg: &'a Asg, ty: &crate::asg::QualifiedType) -> Option<&'a Node> {
    if ty.is_pointer() || ty.has_array() || !ty.referee().is_value() {
        return None;
    }
    let mut node = asg.get(ty.target.as_str())?;
    for _ in 0..64 {
        match &node.data {
            NodeData::Alias { underlying } if underlying.is_value() => node = asg.get(underlying.target.as_str())?,
            NodeData::Class(_) | NodeData::Specialization { .. } => return Some(node),
            _ => return None,
        }
    }
    None
}

/// Re-homes binary namespace-scope operators whose first parameter is a
/// class from an internal header as methods of that class. Unary ones are
/// left in place and reported.
pub fn refactor_operators(asg: &mut Asg) -> Vec<Lint> {
    let mut lints = Vec::new();
    let candidates: Vec<Node> = asg
        .nodes()
        .filter(|n| n.kind() == NodeKind::Function && n.local_name.starts_with("operator"))
        .filter(|n| asg.parent_of(n.id.as_str()).is_some_and(|p| p.kind() == NodeKind::Namespace))
        .cloned()
        .collect();
    for func in candidates {
        let symbol = &func.local_name["operator".len()..];
        let sig = func.signature().expect("function").clone();
        let Some(class) = sig.params.first().and_then(|p| receiver_class(asg, &p.ty)) else {
            continue;
        };
        if !asg.is_internal(class) {
            continue;
        }
        let class_id = class.id.clone();
        match sig.params.len() {
            2 if BINARY_OPERATORS.contains(&symbol) => {}
            1 if UNARY_OPERATORS.contains(&symbol) => {
                lints.push(Lint::new(
                    codes::UNARY_OPERATOR,
                    func.id.to_string(),
                    format!("unary operator on `{}` is left at namespace scope", crate::asg::spelling_of(&class_id)),
                ));
                continue;
            }
            _ => continue,
        }
        let receiver = sig.params[0].clone();
        let is_const = receiver.ty.is_const_ref() || receiver.ty.is_value();
        let params = vec![sig.params[1].clone()];
        let id = naming::function_id(&asg.scope_path(&class_id), &func.local_name, &params, is_const);
        if asg.contains(id.as_str()) {
            log::info!("not moving {}: {} already exists", func.id, id);
            continue;
        }
        let scope = func.parent().cloned().unwrap_or_else(NodeId::root);
        let mut method = Node::new(
            id,
            func.local_name.clone(),
            Some(class_id),
            NodeData::Method {
                signature: Signature { returns: sig.returns.clone(), params },
                is_static: false,
                is_const,
                is_virtual: false,
                is_pure: false,
                origin: Some(FreeOrigin { function: func.id.clone(), scope: scope.to_string(), receiver }),
            },
        );
        method.header = func.header.clone();
        method.location = func.location;
        method.doc = func.doc.clone();
        method.export = func.export;
        method.already_exported = func.already_exported.clone();
        log::debug!("moving {} into {}", func.id, method.id);
        asg.remove(func.id.as_str());
        asg.insert(method);
    }
    lints
}

/// Mark-and-sweep: declarations from internal headers are kept together
/// with everything they depend on (scope parents, bases, types, template
/// arguments and templates); a kept class or enumeration keeps its
/// members. Everything else is removed. Header nodes are never removed.
pub fn clean(asg: &mut Asg) {
    let mut outgoing: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in asg.edges() {
        if e.kind != EdgeKind::DeclaredIn {
            outgoing.entry(e.source).or_default().push(e.target);
        }
    }
    let mut keep: BTreeSet<NodeId> = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = asg
        .nodes()
        .filter(|n| n.kind().is_declaration() && asg.is_internal(n))
        .map(|n| n.id.clone())
        .collect();
    while let Some(id) = queue.pop_front() {
        if !keep.insert(id.clone()) {
            continue;
        }
        let node = asg.get(id.as_str()).expect("edges do not dangle");
        if node.kind().is_class_like() || node.kind() == NodeKind::Enumeration {
            queue.extend(asg.children(id.as_str()).map(|c| c.id.clone()));
        }
        queue.extend(outgoing.get(&id).into_iter().flatten().cloned());
    }
    let doomed: Vec<NodeId> = asg
        .nodes()
        .filter(|n| n.kind().is_declaration() && !n.id.is_root() && !keep.contains(&n.id))
        .map(|n| n.id.clone())
        .collect();
    log::debug!("clean removes {} declarations", doomed.len());
    for id in doomed {
        asg.remove(id.as_str());
    }
}
