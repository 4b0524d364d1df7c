//! Digests, Python names and dotted paths of wrapped entities.

use std::path::{Component, Path};

use md5::{Digest, Md5};

use crate::asg::{Asg, Node, NodeData, NodeId, NodeKind};

/// 32 lowercase hex characters: MD5 of the canonical global name.
pub fn digest(key: &str) -> String {
    Md5::digest(key.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Dotted Python module of a module file: its directories followed by the
/// underscore-prefixed stem (`test/overload/bar.cpp` gives
/// `test.overload._bar`). Only relative directories contribute.
pub fn module_dotted(module: &Path) -> String {
    let stem = module.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut parts: Vec<String> = Vec::new();
    if module.is_relative() {
        if let Some(dir) = module.parent() {
            for c in dir.components() {
                if let Component::Normal(part) = c {
                    parts.push(part.to_string_lossy().into_owned());
                }
            }
        }
    }
    parts.push(format!("_{stem}"));
    parts.join(".")
}

pub fn join(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a}.{b}"),
    }
}

/// Python special method for an operator, given the number of explicit
/// parameters; `None` for operators with no Python counterpart.
pub fn operator_name(symbol: &str, arity: usize) -> Option<&'static str> {
    Some(match (symbol, arity) {
        ("==", 1) => "__eq__",
        ("!=", 1) => "__ne__",
        ("<", 1) => "__lt__",
        ("<=", 1) => "__le__",
        (">", 1) => "__gt__",
        (">=", 1) => "__ge__",
        ("+", 1) => "__add__",
        ("+", 0) => "__pos__",
        ("-", 1) => "__sub__",
        ("-", 0) => "__neg__",
        ("*", 1) => "__mul__",
        ("/", 1) => "__truediv__",
        ("%", 1) => "__mod__",
        ("&", 1) => "__and__",
        ("|", 1) => "__or__",
        ("^", 1) => "__xor__",
        ("~", 0) => "__invert__",
        ("<<", 1) => "__lshift__",
        (">>", 1) => "__rshift__",
        ("+=", 1) => "__iadd__",
        ("-=", 1) => "__isub__",
        ("*=", 1) => "__imul__",
        ("/=", 1) => "__itruediv__",
        ("%=", 1) => "__imod__",
        ("&=", 1) => "__iand__",
        ("|=", 1) => "__ior__",
        ("^=", 1) => "__ixor__",
        ("<<=", 1) => "__ilshift__",
        (">>=", 1) => "__irshift__",
        ("()", _) => "__call__",
        ("[]", 1) => "__getitem__",
        _ => return None,
    })
}

/// Python name of a function, method or operator.
pub fn callable_name(node: &Node) -> Option<String> {
    let arity = node.params().map_or(0, <[_]>::len);
    match node.local_name.strip_prefix("operator") {
        Some(symbol) if !symbol.is_empty() && !symbol.starts_with(|c: char| c.is_alphanumeric() || c == '_') => {
            operator_name(symbol, arity).map(str::to_string)
        }
        _ => Some(node.local_name.clone()),
    }
}

/// Name under which a class or enumeration is registered in its namespace
/// module: nested types are flattened (`_Outer_Inner`) and specializations
/// get a digest-suffixed name (`_vector_<digest>`).
pub fn registration_name(asg: &Asg, node: &Node) -> String {
    if let NodeData::Specialization { template, .. } = &node.data {
        let template_name = asg.get(template.as_str()).map_or(node.local_name.as_str(), |t| t.local_name.as_str());
        return format!("_{template_name}_{}", digest(node.id.as_str()));
    }
    match asg.parent_of(node.id.as_str()).filter(|p| p.kind().is_class_like()) {
        Some(p) => {
            let outer = registration_name(asg, p);
            let outer = if outer.starts_with('_') { outer } else { format!("_{outer}") };
            format!("{outer}_{}", node.local_name)
        }
        None => node.local_name.clone(),
    }
}

/// Dotted path of the namespace module a node is registered in.
pub fn scope_module(asg: &Asg, id: &NodeId) -> String {
    let names: Vec<&str> = asg
        .ancestors(id.as_str())
        .into_iter()
        .rev()
        .filter(|a| a.kind() == NodeKind::Namespace && !a.id.is_root())
        .map(|a| a.local_name.as_str())
        .collect();
    names.join(".")
}

/// Public dotted path of a node inside the wrapped module (nested types
/// at their re-exported location). `None` for nodes with no Python
/// counterpart.
pub fn python_path(asg: &Asg, id: &NodeId) -> Option<String> {
    let node = asg.get(id.as_str())?;
    let parent = || node.parent().and_then(|p| python_path(asg, p));
    match node.kind() {
        NodeKind::Namespace if node.id.is_root() => Some(String::new()),
        NodeKind::Namespace => Some(join(&parent()?, &node.local_name)),
        NodeKind::Class | NodeKind::Specialization | NodeKind::Enumeration => {
            let p = asg.parent_of(node.id.as_str())?;
            if p.kind().is_class_like() {
                Some(join(&python_path(asg, &p.id)?, &node.local_name))
            } else {
                Some(join(&scope_module(asg, &node.id), &registration_name(asg, node)))
            }
        }
        NodeKind::Function | NodeKind::Method => Some(join(&parent()?, &callable_name(node)?)),
        NodeKind::Constructor => Some(join(&parent()?, "__init__")),
        NodeKind::Field | NodeKind::Variable | NodeKind::Enumerator | NodeKind::Alias => Some(join(&parent()?, &node.local_name)),
        NodeKind::Header | NodeKind::Fundamental | NodeKind::ClassTemplate | NodeKind::Destructor => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_shape() {
        let d = digest("class ::A");
        assert_eq!(d.len(), 32);
        assert!(d.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
    }

    #[test]
    fn dotted_module_names() {
        assert_eq!(module_dotted(Path::new("test/overload/bar.cpp")), "test.overload._bar");
        assert_eq!(module_dotted(Path::new("module.cpp")), "_module");
        assert_eq!(module_dotted(Path::new("/tmp/x/module.cpp")), "_module");
    }

    #[test]
    fn operators() {
        assert_eq!(operator_name("[]", 1), Some("__getitem__"));
        assert_eq!(operator_name("-", 0), Some("__neg__"));
        assert_eq!(operator_name("=", 1), None);
    }
}
