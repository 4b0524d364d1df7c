//! Canonical global names.

use super::node::Param;
use super::types::{NodeId, QualifiedType};

pub fn child_path(scope: &str, name: &str) -> String {
    format!("{scope}::{name}")
}

pub fn class_id(scope: &str, name: &str) -> NodeId {
    NodeId::new(format!("class {scope}::{name}"))
}

pub fn enum_id(scope: &str, name: &str) -> NodeId {
    NodeId::new(format!("enum {scope}::{name}"))
}

pub fn alias_id(scope: &str, name: &str) -> NodeId {
    NodeId::new(format!("typedef {scope}::{name}"))
}

/// `::ns::f(int, ::A const &)`, with ` const` appended for const methods.
/// Top-level `const` on parameters is not part of the signature.
pub fn function_id(scope: &str, name: &str, params: &[Param], is_const: bool) -> NodeId {
    let params: Vec<String> = params.iter().map(|p| p.ty.without_top_const().spelling()).collect();
    let suffix = if is_const { " const" } else { "" };
    NodeId::new(format!("{scope}::{name}({}){suffix}", params.join(", ")))
}

/// `::std::vector< int, ::std::allocator< int > >` given the template's
/// scope path and name.
pub fn specialization_path(scope: &str, name: &str, args: &[QualifiedType]) -> String {
    let args: Vec<String> = args.iter().map(QualifiedType::spelling).collect();
    format!("{scope}::{name}< {} >", args.join(", "))
}

/// Name of an overload set: the scope path plus the shared local name.
pub fn overload_set_name(scope: &str, name: &str) -> String {
    child_path(scope, name)
}
