//! Template specialization: argument evaluation, implicit instantiation of
//! class template patterns, the bootstrap loop and class enrichment.

use std::collections::{BTreeMap, BTreeSet};

use super::{Bootstrap, ParseError, SourceLoc};
use crate::asg::naming;
use crate::asg::{
    Access, Asg, Base, ClassInfo, MemberPattern, MemberPatternKind, Node, NodeData, NodeId, Param, QualifiedType, Signature,
    TypeBase, TypeExpr,
};

/// Bindings in effect while turning patterns into concrete members.
#[derive(Clone, Debug, Default)]
pub(crate) struct Env {
    pub args: Vec<QualifiedType>,
    pub self_id: Option<NodeId>,
    pub aliases: BTreeMap<String, QualifiedType>,
}

/// Outcome of [`bootstrap_specializations`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BootstrapReport {
    pub iterations: u32,
    pub instantiated: Vec<NodeId>,
}

pub(crate) fn eval(asg: &mut Asg, expr: &TypeExpr, env: &Env) -> Result<QualifiedType, ParseError> {
    let base = match &expr.base {
        TypeBase::Node(id) => QualifiedType::plain(id.clone()),
        TypeBase::Param(i) => env.args.get(*i).cloned().ok_or_else(|| ParseError::UnknownTemplate {
            loc: None,
            name: format!("template parameter #{i}"),
        })?,
        TypeBase::SelfType => QualifiedType::plain(
            env.self_id.clone().ok_or_else(|| ParseError::UnknownTemplate { loc: None, name: "injected class name".into() })?,
        ),
        TypeBase::MemberAlias(name) => env
            .aliases
            .get(name)
            .cloned()
            .ok_or_else(|| ParseError::UnknownTemplate { loc: None, name: format!("member type `{name}`") })?,
        TypeBase::Specialize { template, args } => {
            let mut concrete = Vec::with_capacity(args.len());
            for a in args {
                concrete.push(eval(asg, a, env)?);
            }
            QualifiedType::plain(specialize(asg, template, concrete)?)
        }
    };
    Ok(base.with_qualifiers(&expr.qualifiers))
}

/// Id of the specialization `template< args >`, with defaults made explicit.
/// Creates the (incomplete) node on first use.
pub(crate) fn specialize(asg: &mut Asg, template: &NodeId, mut args: Vec<QualifiedType>) -> Result<NodeId, ParseError> {
    let tnode = asg.get(template.as_str()).cloned().ok_or_else(|| ParseError::UnknownTemplate { loc: None, name: template.to_string() })?;
    let NodeData::ClassTemplate(info) = &tnode.data else {
        return Err(ParseError::UnknownTemplate { loc: None, name: template.to_string() });
    };
    if args.len() > info.params.len() {
        return Err(arity(template, info.params.len(), args.len()));
    }
    let given = args.len();
    for p in &info.params[given..] {
        let Some(default) = &p.default else {
            return Err(arity(template, info.params.len(), given));
        };
        let env = Env { args: args.clone(), ..Env::default() };
        let value = eval(asg, default, &env)?;
        args.push(value);
    }
    let parent = tnode.parent().cloned().unwrap_or_else(NodeId::root);
    let scope = asg.scope_path(&parent);
    let path = naming::specialization_path(&scope, &tnode.local_name, &args);
    let id = NodeId::new(format!("class {path}"));
    if !asg.contains(id.as_str()) {
        let is_struct = info.definition.as_ref().is_some_and(|d| d.is_struct);
        let local = path[scope.len() + 2..].to_string();
        let mut node = Node::new(
            id.clone(),
            local,
            Some(parent),
            NodeData::Specialization { template: template.clone(), args, class: ClassInfo::declared(is_struct) },
        );
        node.header = tnode.header.clone();
        node.location = tnode.location;
        node.access = tnode.access;
        asg.insert(node);
    }
    Ok(id)
}

fn arity(template: &NodeId, expected: usize, found: usize) -> ParseError {
    ParseError::TemplateArityMismatch { loc: None, template: template.to_string(), expected, found }
}

/// Instantiates the definition of a specialization from its template's
/// pattern. Returns false when the template has no definition (the
/// specialization stays incomplete) or it is already complete.
pub(crate) fn instantiate(asg: &mut Asg, spec: &NodeId) -> Result<bool, ParseError> {
    let node = asg.get(spec.as_str()).cloned().ok_or_else(|| ParseError::UnknownTemplate { loc: None, name: spec.to_string() })?;
    let NodeData::Specialization { template, args, class } = &node.data else {
        return Ok(false);
    };
    if class.is_complete {
        return Ok(false);
    }
    let body = match asg.get(template.as_str()).map(|n| &n.data) {
        Some(NodeData::ClassTemplate(info)) => match &info.definition {
            Some(body) => body.clone(),
            None => return Ok(false),
        },
        _ => return Err(ParseError::UnknownTemplate { loc: None, name: template.to_string() }),
    };
    log::debug!("instantiating {spec}");
    let header = node.header.clone().unwrap_or_else(NodeId::root);
    let mut env = Env { args: args.clone(), self_id: Some(spec.clone()), aliases: BTreeMap::new() };
    let mut bases = Vec::new();
    for b in &body.bases {
        let qt = eval(asg, &b.ty, &env)?;
        let target = class_target(asg, &qt.target).ok_or_else(|| ParseError::Syntax {
            loc: pattern_loc(asg, &header, node.location.map(|l| (l.line, l.column)).unwrap_or((1, 1))),
            message: format!("base `{}` of `{spec}` is not a class", qt.spelling()),
        })?;
        bases.push(Base { target, access: b.access, is_virtual: b.is_virtual });
    }
    if let Some(info) = asg.get_mut(spec.as_str()).and_then(Node::class_info_mut) {
        info.bases = bases;
        info.is_struct = body.is_struct;
    }
    for member in &body.members {
        materialize_member(asg, spec, &header, member, &mut env)?;
    }
    if let Some(info) = asg.get_mut(spec.as_str()).and_then(Node::class_info_mut) {
        info.is_complete = true;
    }
    Ok(true)
}

fn class_target(asg: &Asg, id: &NodeId) -> Option<NodeId> {
    let mut current = id.clone();
    for _ in 0..64 {
        match &asg.get(current.as_str())?.data {
            NodeData::Alias { underlying } if underlying.qualifiers.is_empty() => current = underlying.target.clone(),
            NodeData::Class(_) | NodeData::Specialization { .. } => return Some(current),
            _ => return None,
        }
    }
    None
}

fn pattern_loc(asg: &Asg, header: &NodeId, (line, column): (u32, u32)) -> SourceLoc {
    let path = asg.get(header.as_str()).and_then(Node::header_info).map(|h| h.spelling.clone()).unwrap_or_else(|| header.to_string());
    SourceLoc { path, line, column }
}

/// Adds one member node to `owner` from a (possibly dependent) pattern.
pub(crate) fn materialize_member(
    asg: &mut Asg,
    owner: &NodeId,
    header: &NodeId,
    pattern: &MemberPattern,
    env: &mut Env,
) -> Result<NodeId, ParseError> {
    let scope = asg.scope_path(owner);
    let params = |asg: &mut Asg, ps: &[crate::asg::ParamPattern], env: &Env| -> Result<Vec<Param>, ParseError> {
        ps.iter().map(|p| Ok(Param { name: p.name.clone(), ty: eval(asg, &p.ty, env)?, has_default: p.has_default })).collect()
    };
    let (id, data) = match &pattern.kind {
        MemberPatternKind::Field { ty, is_static } => {
            let ty = eval(asg, ty, env)?;
            (NodeId::new(naming::child_path(&scope, &pattern.name)), NodeData::Field { ty, is_static: *is_static })
        }
        MemberPatternKind::Method { returns, params: ps, is_static, is_const, is_virtual, is_pure } => {
            let returns = eval(asg, returns, env)?;
            let params = params(asg, ps, env)?;
            let id = naming::function_id(&scope, &pattern.name, &params, *is_const);
            let data = NodeData::Method {
                signature: Signature { returns, params },
                is_static: *is_static,
                is_const: *is_const,
                is_virtual: *is_virtual,
                is_pure: *is_pure,
                origin: None,
            };
            (id, data)
        }
        MemberPatternKind::Constructor { params: ps, deleted } => {
            let params = params(asg, ps, env)?;
            (naming::function_id(&scope, &pattern.name, &params, false), NodeData::Constructor { params, deleted: *deleted })
        }
        MemberPatternKind::Destructor { is_virtual } => {
            (NodeId::new(format!("{scope}::{}()", pattern.name)), NodeData::Destructor { is_virtual: *is_virtual })
        }
        MemberPatternKind::Alias { underlying } => {
            let underlying = eval(asg, underlying, env)?;
            let id = naming::alias_id(&scope, &pattern.name);
            env.aliases.insert(pattern.name.clone(), QualifiedType::plain(id.clone()));
            (id, NodeData::Alias { underlying })
        }
    };
    if asg.contains(id.as_str()) {
        return Err(ParseError::Syntax {
            loc: pattern_loc(asg, header, (pattern.location.line, pattern.location.column)),
            message: format!("redeclaration of member `{id}`"),
        });
    }
    let mut node = Node::new(id.clone(), pattern.name.clone(), Some(owner.clone()), data);
    node.header = Some(header.clone());
    node.location = Some(pattern.location);
    node.doc = pattern.doc.clone();
    node.access = pattern.access;
    asg.insert(node);
    Ok(id)
}

/// Repeatedly instantiates every referenced, incomplete specialization
/// whose template is defined, up to the iteration cap of `policy`. Class
/// properties (abstract, copyable) are recomputed afterwards.
pub fn bootstrap_specializations(asg: &mut Asg, policy: Bootstrap) -> Result<BootstrapReport, ParseError> {
    let mut report = BootstrapReport::default();
    let limit = policy.limit();
    while limit.is_none_or(|l| report.iterations < l) {
        let pending: Vec<NodeId> = asg
            .incomplete_referenced_specializations()
            .into_iter()
            .filter(|id| template_defined(asg, id))
            .collect();
        if pending.is_empty() {
            break;
        }
        for id in pending {
            if instantiate(asg, &id)? {
                report.instantiated.push(id);
            }
        }
        report.iterations += 1;
    }
    enrich(asg);
    Ok(report)
}

fn template_defined(asg: &Asg, spec: &NodeId) -> bool {
    let Some(NodeData::Specialization { template, .. }) = asg.get(spec.as_str()).map(|n| &n.data) else {
        return false;
    };
    matches!(asg.get(template.as_str()).map(|n| &n.data), Some(NodeData::ClassTemplate(t)) if t.definition.is_some())
}

/// Sets `is_abstract` (unoverridden pure virtual methods, own or inherited)
/// and `is_copyable` (no deleted or non-public copy constructor, copyable
/// bases and by-value fields) on every complete class.
pub(crate) fn enrich(asg: &mut Asg) {
    let ids: Vec<NodeId> = asg.classes().filter(|c| c.is_complete()).map(|c| c.id.clone()).collect();
    let mut memo = BTreeMap::new();
    for id in &ids {
        props(asg, id, &mut memo, &mut BTreeSet::new());
    }
    for id in ids {
        let (pure, copyable) = memo[&id].clone();
        if let Some(info) = asg.get_mut(id.as_str()).and_then(Node::class_info_mut) {
            info.is_abstract = !pure.is_empty();
            info.is_copyable = copyable;
        }
    }
}

type Props = (BTreeSet<String>, bool);

fn props(asg: &Asg, id: &NodeId, memo: &mut BTreeMap<NodeId, Props>, visiting: &mut BTreeSet<NodeId>) -> Props {
    if let Some(p) = memo.get(id) {
        return p.clone();
    }
    let Some(node) = asg.get(id.as_str()) else {
        return (BTreeSet::new(), true);
    };
    let Some(info) = node.class_info() else {
        return (BTreeSet::new(), true);
    };
    if !info.is_complete || !visiting.insert(id.clone()) {
        return (BTreeSet::new(), true);
    }
    let mut pure = BTreeSet::new();
    let mut copyable = true;
    for b in &info.bases {
        let (bp, bc) = props(asg, &b.target, memo, visiting);
        pure.extend(bp);
        copyable &= bc;
    }
    let prefix = format!("{}::", asg.scope_path(id));
    for child in asg.children(id.as_str()) {
        match &child.data {
            NodeData::Method { is_pure, .. } => {
                let key = child.id.as_str().strip_prefix(&prefix).unwrap_or(child.id.as_str()).to_string();
                if *is_pure {
                    pure.insert(key);
                } else {
                    pure.remove(&key);
                }
            }
            NodeData::Constructor { params, deleted } => {
                let copy = params.first().is_some_and(|p| p.ty.is_lvalue_ref() && p.ty.target == *id)
                    && params.iter().skip(1).all(|p| p.has_default);
                if copy && (*deleted || child.access != Access::Public) {
                    copyable = false;
                }
            }
            NodeData::Field { ty, is_static: false } if ty.is_value() => {
                if asg.get(ty.target.as_str()).is_some_and(|t| t.kind().is_class_like()) && ty.target != *id {
                    copyable &= props(asg, &ty.target, memo, visiting).1;
                }
            }
            _ => {}
        }
    }
    // own pure declarations win over same-key non-pure ones from bases
    for child in asg.children(id.as_str()) {
        if let NodeData::Method { is_pure: true, .. } = child.data {
            pure.insert(child.id.as_str().strip_prefix(&prefix).unwrap_or(child.id.as_str()).to_string());
        }
    }
    visiting.remove(id);
    let out = (pure, copyable);
    memo.insert(id.clone(), out.clone());
    out
}
