use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::types::{Access, ExportFlag, NodeId, QualifiedType, Qualifier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependency {
    Internal,
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    C,
    #[serde(rename = "c++")]
    Cxx,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderInfo {
    /// How generated code includes this header.
    pub spelling: String,
    pub angled: bool,
    pub self_contained: bool,
    pub dependency: Dependency,
    pub language: Language,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: QualifiedType,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub has_default: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub returns: QualifiedType,
    pub params: Vec<Param>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Base {
    pub target: NodeId,
    pub access: Access,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_virtual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub is_struct: bool,
    pub bases: Vec<Base>,
    pub is_abstract: bool,
    pub is_copyable: bool,
    pub is_complete: bool,
}

impl ClassInfo {
    pub fn declared(is_struct: bool) -> Self {
        ClassInfo { is_struct, bases: Vec::new(), is_abstract: false, is_copyable: true, is_complete: false }
    }
}

/// Free operator re-homed as a method: the wrapper still calls the original
/// free function, with `receiver` as its first argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeOrigin {
    pub function: NodeId,
    pub scope: String,
    pub receiver: Param,
}

/// Type expression inside a class template pattern, resolved at definition
/// time except for template parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeExpr {
    pub base: TypeBase,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qualifiers: Vec<Qualifier>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeBase {
    Node(NodeId),
    Param(usize),
    Specialize { template: NodeId, args: Vec<TypeExpr> },
    /// The injected class name inside the template body.
    SelfType,
    /// A typedef declared earlier in the same template body.
    MemberAlias(String),
}

impl TypeExpr {
    pub fn node(id: NodeId, qualifiers: Vec<Qualifier>) -> Self {
        TypeExpr { base: TypeBase::Node(id), qualifiers }
    }

    pub fn is_dependent(&self) -> bool {
        match &self.base {
            TypeBase::Node(_) => false,
            TypeBase::Param(_) | TypeBase::SelfType | TypeBase::MemberAlias(_) => true,
            TypeBase::Specialize { args, .. } => args.iter().any(TypeExpr::is_dependent),
        }
    }

    /// Node ids named by this expression (template parameters excluded).
    pub fn referenced_nodes(&self, out: &mut Vec<NodeId>) {
        match &self.base {
            TypeBase::Node(id) => out.push(id.clone()),
            TypeBase::Specialize { template, args } => {
                out.push(template.clone());
                for a in args {
                    a.referenced_nodes(out);
                }
            }
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateParam {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPattern {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TypeExpr,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub has_default: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "member", rename_all = "snake_case")]
pub enum MemberPatternKind {
    Field {
        #[serde(rename = "type")]
        ty: TypeExpr,
        is_static: bool,
    },
    Method {
        returns: TypeExpr,
        params: Vec<ParamPattern>,
        is_static: bool,
        is_const: bool,
        is_virtual: bool,
        is_pure: bool,
    },
    Constructor {
        params: Vec<ParamPattern>,
        deleted: bool,
    },
    Destructor {
        is_virtual: bool,
    },
    Alias {
        underlying: TypeExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberPattern {
    pub name: String,
    pub access: Access,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub doc: String,
    pub location: Location,
    #[serde(flatten)]
    pub kind: MemberPatternKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePattern {
    #[serde(rename = "type")]
    pub ty: TypeExpr,
    pub access: Access,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_virtual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateBody {
    pub is_struct: bool,
    pub bases: Vec<BasePattern>,
    pub members: Vec<MemberPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateInfo {
    pub params: Vec<TemplateParam>,
    /// `None` while the template is only declared.
    pub definition: Option<TemplateBody>,
}

/// Kind-specific payload of a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeData {
    Header(HeaderInfo),
    Fundamental,
    Namespace,
    Enumeration {
        scoped: bool,
    },
    Enumerator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<String>,
    },
    Variable {
        #[serde(rename = "type")]
        ty: QualifiedType,
    },
    Field {
        #[serde(rename = "type")]
        ty: QualifiedType,
        is_static: bool,
    },
    Function(Signature),
    Method {
        #[serde(flatten)]
        signature: Signature,
        is_static: bool,
        is_const: bool,
        is_virtual: bool,
        is_pure: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin: Option<FreeOrigin>,
    },
    Constructor {
        params: Vec<Param>,
        deleted: bool,
    },
    Destructor {
        is_virtual: bool,
    },
    Class(ClassInfo),
    ClassTemplate(TemplateInfo),
    Specialization {
        template: NodeId,
        args: Vec<QualifiedType>,
        #[serde(flatten)]
        class: ClassInfo,
    },
    Alias {
        underlying: QualifiedType,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Header,
    Fundamental,
    Namespace,
    Enumeration,
    Enumerator,
    Variable,
    Field,
    Function,
    Method,
    Constructor,
    Destructor,
    Class,
    ClassTemplate,
    Specialization,
    Alias,
}

impl NodeKind {
    pub const ALL: [NodeKind; 15] = [
        NodeKind::Header,
        NodeKind::Fundamental,
        NodeKind::Namespace,
        NodeKind::Enumeration,
        NodeKind::Enumerator,
        NodeKind::Variable,
        NodeKind::Field,
        NodeKind::Function,
        NodeKind::Method,
        NodeKind::Constructor,
        NodeKind::Destructor,
        NodeKind::Class,
        NodeKind::ClassTemplate,
        NodeKind::Specialization,
        NodeKind::Alias,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Header => "header",
            NodeKind::Fundamental => "fundamental",
            NodeKind::Namespace => "namespace",
            NodeKind::Enumeration => "enumeration",
            NodeKind::Enumerator => "enumerator",
            NodeKind::Variable => "variable",
            NodeKind::Field => "field",
            NodeKind::Function => "function",
            NodeKind::Method => "method",
            NodeKind::Constructor => "constructor",
            NodeKind::Destructor => "destructor",
            NodeKind::Class => "class",
            NodeKind::ClassTemplate => "class_template",
            NodeKind::Specialization => "specialization",
            NodeKind::Alias => "alias",
        }
    }

    /// Declarations in the C++ sense: everything but files and fundamentals.
    pub fn is_declaration(self) -> bool {
        !matches!(self, NodeKind::Header | NodeKind::Fundamental)
    }

    pub fn is_class_like(self) -> bool {
        matches!(self, NodeKind::Class | NodeKind::Specialization)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s || (s == "enum" && *k == NodeKind::Enumeration) || (s == "typedef" && *k == NodeKind::Alias))
            .ok_or_else(|| format!("unknown node kind `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub local_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub(crate) parent: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    pub access: Access,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub doc: String,
    #[serde(default, skip_serializing_if = "ExportFlag::is_unset")]
    pub export: ExportFlag,
    /// Python module that already wraps this node (set by generation, kept
    /// across save/load and merge).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub already_exported: Option<String>,
    pub data: NodeData,
}

impl Node {
    pub fn new(id: NodeId, local_name: impl Into<String>, parent: Option<NodeId>, data: NodeData) -> Self {
        Node {
            id,
            local_name: local_name.into(),
            parent,
            header: None,
            location: None,
            access: Access::Public,
            doc: String::new(),
            export: ExportFlag::Unset,
            already_exported: None,
            data,
        }
    }

    pub fn parent(&self) -> Option<&NodeId> {
        self.parent.as_ref()
    }

    pub fn kind(&self) -> NodeKind {
        match &self.data {
            NodeData::Header(_) => NodeKind::Header,
            NodeData::Fundamental => NodeKind::Fundamental,
            NodeData::Namespace => NodeKind::Namespace,
            NodeData::Enumeration { .. } => NodeKind::Enumeration,
            NodeData::Enumerator { .. } => NodeKind::Enumerator,
            NodeData::Variable { .. } => NodeKind::Variable,
            NodeData::Field { .. } => NodeKind::Field,
            NodeData::Function(_) => NodeKind::Function,
            NodeData::Method { .. } => NodeKind::Method,
            NodeData::Constructor { .. } => NodeKind::Constructor,
            NodeData::Destructor { .. } => NodeKind::Destructor,
            NodeData::Class(_) => NodeKind::Class,
            NodeData::ClassTemplate(_) => NodeKind::ClassTemplate,
            NodeData::Specialization { .. } => NodeKind::Specialization,
            NodeData::Alias { .. } => NodeKind::Alias,
        }
    }

    pub fn class_info(&self) -> Option<&ClassInfo> {
        match &self.data {
            NodeData::Class(c) | NodeData::Specialization { class: c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn class_info_mut(&mut self) -> Option<&mut ClassInfo> {
        match &mut self.data {
            NodeData::Class(c) | NodeData::Specialization { class: c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn header_info(&self) -> Option<&HeaderInfo> {
        match &self.data {
            NodeData::Header(h) => Some(h),
            _ => None,
        }
    }

    pub fn signature(&self) -> Option<&Signature> {
        match &self.data {
            NodeData::Function(sig) | NodeData::Method { signature: sig, .. } => Some(sig),
            _ => None,
        }
    }

    /// Parameters of functions, methods and constructors.
    pub fn params(&self) -> Option<&[Param]> {
        match &self.data {
            NodeData::Function(sig) | NodeData::Method { signature: sig, .. } => Some(&sig.params),
            NodeData::Constructor { params, .. } => Some(params),
            _ => None,
        }
    }

    pub fn is_static_method(&self) -> bool {
        matches!(self.data, NodeData::Method { is_static: true, .. })
    }

    pub fn is_const_method(&self) -> bool {
        matches!(self.data, NodeData::Method { is_const: true, .. })
    }

    pub fn is_complete(&self) -> bool {
        match &self.data {
            NodeData::ClassTemplate(t) => t.definition.is_some(),
            _ => self.class_info().is_none_or(|c| c.is_complete),
        }
    }

    /// Every qualified type this node mentions, in declaration order.
    pub fn qualified_types(&self) -> Vec<&QualifiedType> {
        match &self.data {
            NodeData::Variable { ty } | NodeData::Field { ty, .. } => vec![ty],
            NodeData::Function(sig) => sig_types(sig, None),
            NodeData::Method { signature, origin, .. } => sig_types(signature, origin.as_ref().map(|o| &o.receiver.ty)),
            NodeData::Constructor { params, .. } => params.iter().map(|p| &p.ty).collect(),
            NodeData::Specialization { args, .. } => args.iter().collect(),
            NodeData::Alias { underlying } => vec![underlying],
            _ => Vec::new(),
        }
    }
}

fn sig_types<'a>(sig: &'a Signature, receiver: Option<&'a QualifiedType>) -> Vec<&'a QualifiedType> {
    let mut out = vec![&sig.returns];
    out.extend(receiver);
    out.extend(sig.params.iter().map(|p| &p.ty));
    out
}
