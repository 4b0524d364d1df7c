use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier of a graph node: the canonical global name of the entity it
/// stands for (`class ::A::B`, `enum ::E`, `::ns::f(int)`, ...), or the
/// canonical file path for header nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn root() -> Self {
        NodeId(ROOT.to_string())
    }

    pub fn is_root(&self) -> bool {
        self.0 == ROOT
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// Id of the global namespace.
pub const ROOT: &str = "::";

/// C++11 arithmetic types plus `void`, spelled canonically.
pub const FUNDAMENTALS: &[&str] = &[
    "void",
    "bool",
    "char",
    "signed char",
    "unsigned char",
    "wchar_t",
    "char16_t",
    "char32_t",
    "short int",
    "unsigned short int",
    "int",
    "unsigned int",
    "long int",
    "unsigned long int",
    "long long int",
    "unsigned long long int",
    "float",
    "double",
    "long double",
];

pub fn fundamental_id(spelling: &str) -> NodeId {
    NodeId(format!("::{spelling}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qualifier {
    Const,
    Pointer,
    LvalueRef,
    /// C array declarator with its extent, if any.
    Array(Option<u64>),
}

/// A use-site reference to a type node plus its qualifier chain, innermost
/// first: `const A &` is `A` with `[Const, LvalueRef]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QualifiedType {
    pub target: NodeId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qualifiers: Vec<Qualifier>,
}

impl QualifiedType {
    pub fn new(target: NodeId, qualifiers: Vec<Qualifier>) -> Self {
        QualifiedType { target, qualifiers }
    }

    pub fn plain(target: NodeId) -> Self {
        QualifiedType { target, qualifiers: Vec::new() }
    }

    pub fn is_lvalue_ref(&self) -> bool {
        self.qualifiers.last() == Some(&Qualifier::LvalueRef)
    }

    /// `T const &`
    pub fn is_const_ref(&self) -> bool {
        let n = self.qualifiers.len();
        n >= 2 && self.qualifiers[n - 1] == Qualifier::LvalueRef && self.qualifiers[n - 2] == Qualifier::Const
    }

    /// Outermost non-const qualifier is a pointer.
    pub fn is_pointer(&self) -> bool {
        self.qualifiers.iter().rev().find(|q| **q != Qualifier::Const) == Some(&Qualifier::Pointer)
    }

    pub fn has_array(&self) -> bool {
        self.qualifiers.iter().any(|q| matches!(q, Qualifier::Array(_)))
    }

    /// No qualifiers other than `const`.
    pub fn is_value(&self) -> bool {
        self.qualifiers.iter().all(|q| *q == Qualifier::Const)
    }

    /// Drops a top-level `const`, which does not take part in function
    /// signatures.
    pub fn without_top_const(&self) -> Self {
        let mut qualifiers = self.qualifiers.clone();
        if qualifiers.last() == Some(&Qualifier::Const) {
            qualifiers.pop();
        }
        QualifiedType { target: self.target.clone(), qualifiers }
    }

    /// Drops a trailing reference and top-level `const`: the referred-to
    /// object type.
    pub fn referee(&self) -> Self {
        let mut qualifiers = self.qualifiers.clone();
        if qualifiers.last() == Some(&Qualifier::LvalueRef) {
            qualifiers.pop();
        }
        if qualifiers.last() == Some(&Qualifier::Const) {
            qualifiers.pop();
        }
        QualifiedType { target: self.target.clone(), qualifiers }
    }

    /// Appends qualifiers, collapsing references (`T& &` is `T&`).
    pub fn with_qualifiers(&self, extra: &[Qualifier]) -> Self {
        let mut qualifiers = self.qualifiers.clone();
        for q in extra {
            match q {
                Qualifier::LvalueRef if qualifiers.last() == Some(&Qualifier::LvalueRef) => {}
                // `const` applied to a reference is ignored.
                Qualifier::Const if qualifiers.last() == Some(&Qualifier::LvalueRef) => {}
                _ => qualifiers.push(*q),
            }
        }
        QualifiedType { target: self.target.clone(), qualifiers }
    }

    /// Canonical spelling used inside node ids and emitted code:
    /// `::A const &`, `int *`, `::std::vector< int, ::std::allocator< int > >`.
    pub fn spelling(&self) -> String {
        let mut out = spelling_of(&self.target).to_string();
        push_qualifiers(&mut out, &self.qualifiers);
        out
    }
}

pub(crate) fn push_qualifiers(out: &mut String, qualifiers: &[Qualifier]) {
    for q in qualifiers {
        match q {
            Qualifier::Const => out.push_str(" const"),
            Qualifier::Pointer => out.push_str(" *"),
            Qualifier::LvalueRef => out.push_str(" &"),
            Qualifier::Array(Some(n)) => out.push_str(&format!(" [{n}]")),
            Qualifier::Array(None) => out.push_str(" []"),
        }
    }
}

/// Type spelling of a type node id: strips the kind keyword of class, enum
/// and alias ids and the `::` anchor of fundamental ids.
pub fn spelling_of(id: &NodeId) -> &str {
    let s = id.as_str();
    for keyword in ["class ", "enum ", "typedef "] {
        if let Some(rest) = s.strip_prefix(keyword) {
            return rest;
        }
    }
    match s.strip_prefix("::") {
        Some(rest) if FUNDAMENTALS.contains(&rest) => rest,
        _ => s,
    }
}

pub fn is_fundamental_id(id: &NodeId) -> bool {
    id.as_str().strip_prefix("::").is_some_and(|rest| FUNDAMENTALS.contains(&rest))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Public,
    Protected,
    Private,
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Public => "public",
            Access::Protected => "protected",
            Access::Private => "private",
        })
    }
}

/// The `boost_python_export` node property.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFlag {
    #[default]
    Unset,
    Yes,
    No,
}

impl ExportFlag {
    pub fn is_unset(&self) -> bool {
        *self == ExportFlag::Unset
    }
}
