//! Default Boost.Python templates: export files, the module file and the
//! Python decorator script.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::names;
use super::{resolve_aliases, CallPolicy, ExportUnit, Plan, UnitKind, UnitMember};
use crate::asg::{is_fundamental_id, naming, spelling_of, Access, Asg, Node, NodeData, NodeId, NodeKind, Qualifier};

/// Container templates whose specializations get a Python sequence
/// converter, with the method inserting one element.
const CONTAINERS: &[(&str, &str)] = &[
    ("class ::std::vector", "push_back"),
    ("class ::std::set", "insert"),
    ("class ::std::unordered_set", "insert"),
];

/// C++ string literal.
fn literal(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node<'a>(asg: &'a Asg, id: &NodeId) -> &'a Node {
    asg.get(id.as_str()).expect("planned nodes exist")
}

/// `#include` lines for the headers declaring the unit's nodes.
fn includes(plan: &Plan, unit: &ExportUnit) -> String {
    let mut headers = BTreeSet::new();
    for id in std::iter::once(&unit.owner).chain(unit.members.iter().map(|m| &m.id)) {
        let n = node(plan.asg, id);
        let header = n.header.clone().or_else(|| match &n.data {
            NodeData::Specialization { template, .. } => plan.asg.get(template.as_str()).and_then(|t| t.header.clone()),
            _ => None,
        });
        if let Some(info) = header.and_then(|h| plan.asg.get(h.as_str())).and_then(Node::header_info) {
            headers.insert(if info.angled { format!("<{}>", info.spelling) } else { format!("\"{}\"", info.spelling) });
        }
    }
    let mut out = String::from("#include <boost/python.hpp>\n");
    for h in headers {
        let _ = writeln!(out, "#include {h}");
    }
    out
}

/// Opens the scope submodules down to `scope` (a namespace id).
fn scope_chain(plan: &Plan, scope: &NodeId, out: &mut String) {
    let mut chain: Vec<&Node> = plan.asg.ancestors(scope.as_str()).into_iter().rev().collect();
    if let Some(n) = plan.asg.get(scope.as_str()) {
        chain.push(n);
    }
    for ns in chain.into_iter().filter(|n| n.kind() == NodeKind::Namespace && !n.id.is_root()) {
        let d = names::digest(ns.id.as_str());
        let name = &ns.local_name;
        let _ = writeln!(
            out,
            "    std::string name_{d} = boost::python::extract< std::string >(boost::python::scope().attr(\"__name__\") + \".{name}\");"
        );
        let _ = writeln!(
            out,
            "    boost::python::object module_{d}(boost::python::handle<  >(boost::python::borrowed(PyImport_AddModule(name_{d}.c_str()))));"
        );
        let _ = writeln!(out, "    boost::python::scope().attr(\"{name}\") = module_{d};");
        let _ = writeln!(out, "    boost::python::scope scope_{d} = module_{d};");
    }
}

/// Innermost enclosing namespace.
fn namespace_of(asg: &Asg, id: &NodeId) -> NodeId {
    asg.ancestors(id.as_str()).into_iter().find(|a| a.kind() == NodeKind::Namespace).map_or_else(NodeId::root, |n| n.id.clone())
}

fn policy(plan: &Plan, member: &UnitMember, returns: Option<&crate::asg::QualifiedType>) -> Option<String> {
    let p = match member.policy {
        CallPolicy::Default | CallPolicy::OwnershipTransfer => return None,
        CallPolicy::NonOwning => "boost::python::return_value_policy< boost::python::reference_existing_object >()",
        CallPolicy::Copy => "boost::python::return_value_policy< boost::python::copy_const_reference >()",
        CallPolicy::InternalReference => {
            let target = returns.map(|r| resolve_aliases(plan.asg, r).target);
            let by_copy = target.is_some_and(|t| {
                is_fundamental_id(&t) || plan.asg.get(t.as_str()).is_some_and(|n| n.kind() == NodeKind::Enumeration)
            });
            if by_copy {
                "boost::python::return_value_policy< boost::python::copy_non_const_reference >()"
            } else {
                "boost::python::return_internal_reference<  >()"
            }
        }
    };
    Some(p.to_string())
}

fn def_args(name: &str, pointer: &str, policy: Option<String>, doc: &str) -> String {
    let mut args = vec![literal(name), pointer.to_string()];
    args.extend(policy);
    args.push(literal(doc));
    args.join(", ")
}

fn spellings(params: &[crate::asg::Param]) -> Vec<String> {
    params.iter().map(|p| p.ty.without_top_const().spelling()).collect()
}

/// Qualified C++ name of a free function or variable.
fn qualified(asg: &Asg, n: &Node) -> String {
    let scope = n.parent().map(|p| asg.scope_path(p)).unwrap_or_default();
    naming::child_path(&scope, &n.local_name)
}

pub fn export_file(plan: &Plan, unit: &ExportUnit) -> String {
    let mut helpers = String::new();
    let mut body = String::new();
    match unit.kind {
        UnitKind::Namespace => {
            scope_chain(plan, &unit.owner, &mut body);
            if !unit.doc.is_empty() {
                let d = names::digest(unit.owner.as_str());
                let _ = writeln!(body, "    module_{d}.attr(\"__doc__\") = {};", literal(&unit.doc));
            }
        }
        UnitKind::Variable => {
            let n = node(plan.asg, &unit.owner);
            scope_chain(plan, &namespace_of(plan.asg, &unit.owner), &mut body);
            let _ = writeln!(body, "    boost::python::scope().attr({}) = {};", literal(&n.local_name), qualified(plan.asg, n));
        }
        UnitKind::Enumeration => enumeration(plan, unit, &mut body),
        UnitKind::OverloadSet => {
            scope_chain(plan, &unit.owner, &mut body);
            for m in &unit.members {
                let n = node(plan.asg, &m.id);
                let sig = n.signature().expect("functions have signatures");
                let d = names::digest(m.id.as_str());
                let _ = writeln!(
                    body,
                    "    {} (*function_pointer_{d})({}) = {};",
                    sig.returns.spelling(),
                    spellings(&sig.params).join(", "),
                    qualified(plan.asg, n)
                );
                let pointer = format!("function_pointer_{d}");
                let _ = writeln!(body, "    boost::python::def({});", def_args(&m.py_name, &pointer, policy(plan, m, Some(&sig.returns)), &m.doc));
            }
        }
        UnitKind::Class => class(plan, unit, &mut helpers, &mut body),
    }
    let mut out = includes(plan, unit);
    out.push('\n');
    if !helpers.is_empty() {
        let _ = write!(out, "namespace autowig\n{{\n{helpers}}}\n\n");
    }
    let _ = write!(out, "void export_{}()\n{{\n{body}}}\n", unit.digest);
    out
}

fn enumeration(plan: &Plan, unit: &ExportUnit, body: &mut String) {
    let asg = plan.asg;
    let n = node(asg, &unit.owner);
    scope_chain(plan, &namespace_of(asg, &unit.owner), body);
    let d = &unit.digest;
    let spelling = spelling_of(&n.id);
    let _ = writeln!(
        body,
        "    boost::python::enum_< {spelling} > enum_{d}({}, {});",
        literal(&names::registration_name(asg, n)),
        literal(&unit.doc)
    );
    let scoped = matches!(n.data, NodeData::Enumeration { scoped: true });
    let value_scope = if scoped { spelling.to_string() } else { n.parent().map(|p| asg.scope_path(p)).unwrap_or_default() };
    for m in &unit.members {
        let _ = writeln!(body, "    enum_{d}.value({}, {});", literal(&m.py_name), naming::child_path(&value_scope, &m.py_name));
    }
}

fn class(plan: &Plan, unit: &ExportUnit, helpers: &mut String, body: &mut String) {
    let asg = plan.asg;
    let n = node(asg, &unit.owner);
    let info = n.class_info().expect("class-like");
    let d = &unit.digest;
    let spelling = spelling_of(&n.id).to_string();
    scope_chain(plan, &namespace_of(asg, &unit.owner), body);

    let mut params = vec![spelling.clone()];
    if !unit.bases.is_empty() {
        let bases: Vec<&str> = unit.bases.iter().map(spelling_of).collect();
        params.push(format!("boost::python::bases< {} >", bases.join(", ")));
    }
    let noncopyable = !info.is_copyable || info.is_abstract || unit.opaque;
    if noncopyable {
        params.push("boost::noncopyable".into());
    }
    let _ = writeln!(
        body,
        "    boost::python::class_< {} > class_{d}({}, {}, boost::python::no_init);",
        params.join(", "),
        literal(&names::registration_name(asg, n)),
        literal(&unit.doc)
    );
    if unit.opaque {
        return;
    }

    if !info.is_abstract {
        let declared = asg.children(n.id.as_str()).any(|c| c.kind() == NodeKind::Constructor);
        if !declared {
            let _ = writeln!(body, "    class_{d}.def(boost::python::init<  >(\"\"));");
        }
    }
    let mut statics: BTreeSet<&str> = BTreeSet::new();
    for m in &unit.members {
        let member = node(asg, &m.id);
        let md = names::digest(m.id.as_str());
        match &member.data {
            NodeData::Constructor { params, deleted } => {
                let copy = params.len() == 1 && params[0].ty.target == n.id && params[0].ty.is_const_ref();
                if *deleted || info.is_abstract || (noncopyable && copy) {
                    continue;
                }
                let _ = writeln!(body, "    class_{d}.def(boost::python::init< {} >({}));", spellings(params).join(", "), literal(&m.doc));
            }
            NodeData::Field { ty, .. } => {
                let how = if ty.qualifiers.last() == Some(&Qualifier::Const) { "def_readonly" } else { "def_readwrite" };
                let _ = writeln!(
                    body,
                    "    class_{d}.{how}({}, &{}, {});",
                    literal(&m.py_name),
                    naming::child_path(&spelling, &member.local_name),
                    literal(&m.doc)
                );
            }
            NodeData::Method { signature, is_static, is_const, origin, .. } => {
                let ret = signature.returns.spelling();
                let args = spellings(&signature.params);
                match origin {
                    Some(origin) => {
                        let mut all = vec![origin.receiver.ty.without_top_const().spelling()];
                        all.extend(args);
                        let scope = if origin.scope == "::" { "" } else { origin.scope.as_str() };
                        let _ = writeln!(
                            body,
                            "    {ret} (*method_pointer_{md})({}) = {};",
                            all.join(", "),
                            naming::child_path(scope, &member.local_name)
                        );
                    }
                    None if *is_static => {
                        let _ = writeln!(
                            body,
                            "    {ret} (*method_pointer_{md})({}) = {};",
                            args.join(", "),
                            naming::child_path(&spelling, &member.local_name)
                        );
                        statics.insert(&m.py_name);
                    }
                    None => {
                        let suffix = if *is_const { " const" } else { "" };
                        let _ = writeln!(
                            body,
                            "    {ret} ({spelling}::*method_pointer_{md})({}){suffix} = &{};",
                            args.join(", "),
                            naming::child_path(&spelling, &member.local_name)
                        );
                    }
                }
                let pointer = format!("method_pointer_{md}");
                let _ = writeln!(body, "    class_{d}.def({});", def_args(&m.py_name, &pointer, policy(plan, m, Some(&signature.returns)), &m.doc));
                if let Some((decorator, setter)) = &m.decorator {
                    decorator_function(decorator, &spelling, member, *is_const, &signature.params, &signature.returns, helpers);
                    let _ = writeln!(body, "    class_{d}.def({}, autowig::{decorator});", literal(setter));
                }
            }
            _ => {}
        }
    }
    for name in statics {
        let _ = writeln!(body, "    class_{d}.staticmethod({});", literal(name));
    }

    if unit.exception {
        let _ = write!(
            helpers,
            "    PyObject* exception_type_{d} = nullptr;\n\n    void translate_{d}({spelling} const & error)\n    {{\n        boost::python::object instance(error);\n        PyErr_SetObject(exception_type_{d}, instance.ptr());\n    }}\n\n"
        );
        let _ = writeln!(body, "    autowig::exception_type_{d} = class_{d}.ptr();");
        let _ = writeln!(body, "    boost::python::register_exception_translator< {spelling} >(&autowig::translate_{d});");
    }

    if let NodeData::Specialization { template, args, .. } = &n.data {
        if let Some((_, insert)) = CONTAINERS.iter().find(|(t, _)| *t == template.as_str()) {
            if let Some(element) = args.first() {
                let element = element.spelling();
                let _ = write!(
                    helpers,
                    "    struct converter_{d}\n    {{\n        static void* convertible(PyObject* obj)\n        {{\n            return PySequence_Check(obj) ? obj : nullptr;\n        }}\n\n        static void construct(PyObject* obj, boost::python::converter::rvalue_from_python_stage1_data* data)\n        {{\n            void* storage = ((boost::python::converter::rvalue_from_python_storage< {spelling} >*)data)->storage.bytes;\n            {spelling}* container = new (storage) {spelling}();\n            Py_ssize_t size = PySequence_Size(obj);\n            for (Py_ssize_t index = 0; index < size; ++index)\n            {{\n                boost::python::object item(boost::python::handle<  >(PySequence_GetItem(obj, index)));\n                container->{insert}(boost::python::extract< {element} >(item));\n            }}\n            data->convertible = storage;\n        }}\n    }};\n\n"
                );
                let _ = writeln!(
                    body,
                    "    boost::python::converter::registry::push_back(&autowig::converter_{d}::convertible, &autowig::converter_{d}::construct, boost::python::type_id< {spelling} >());"
                );
            }
        }
    }
}

/// Setter counterpart of a method returning a non-const reference: takes the
/// method's arguments plus the value to assign.
fn decorator_function(
    name: &str,
    class: &str,
    method: &Node,
    is_const: bool,
    params: &[crate::asg::Param],
    returns: &crate::asg::QualifiedType,
    out: &mut String,
) {
    let instance = if is_const { format!("{class} const &") } else { format!("{class} &") };
    let mut decl = vec![format!("{instance} instance")];
    let mut call = Vec::new();
    for (i, p) in params.iter().enumerate() {
        decl.push(format!("{} param_in_{i}", p.ty.without_top_const().spelling()));
        call.push(format!("param_in_{i}"));
    }
    decl.push(format!("{} const & param_out", returns.referee().spelling()));
    let _ = write!(
        out,
        "    void {name}({})\n    {{\n        instance.{}({}) = param_out;\n    }}\n\n",
        decl.join(", "),
        method.local_name,
        call.join(", ")
    );
}

pub fn module_file(plan: &Plan) -> String {
    let stem = plan.config.module.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut out = String::from("#include <boost/python.hpp>\n\n");
    for unit in &plan.units {
        let _ = writeln!(out, "void export_{}();", unit.digest);
    }
    let _ = write!(out, "\nBOOST_PYTHON_MODULE(_{stem})\n{{\n");
    for unit in &plan.units {
        let _ = writeln!(out, "    export_{}();", unit.digest);
    }
    out.push_str("}\n");
    out
}

pub fn decorator_file(plan: &Plan) -> String {
    let asg = plan.asg;
    let mut out = format!("import {} as _lib\n", plan.module);
    for dep in &plan.dependencies {
        let _ = writeln!(out, "import {dep}");
    }
    let mut lines = Vec::new();
    // Member classes and enumerations are registered flat; put them back
    // under their parent.
    for unit in plan.units.iter().filter(|u| matches!(u.kind, UnitKind::Class | UnitKind::Enumeration)) {
        let n = node(asg, &unit.owner);
        if asg.parent_of(n.id.as_str()).is_some_and(|p| p.kind().is_class_like()) {
            if let Some(path) = names::python_path(asg, &n.id) {
                let flat = names::join(&names::scope_module(asg, &n.id), &names::registration_name(asg, n));
                lines.push(format!("_lib.{path} = _lib.{flat}"));
            }
        }
    }
    for id in &plan.aliases {
        let alias = node(asg, id);
        let NodeData::Alias { underlying } = &alias.data else { continue };
        let target = resolve_aliases(asg, underlying);
        if !target.is_value() {
            continue;
        }
        let is_type = asg.get(target.target.as_str()).is_some_and(|t| t.kind().is_class_like() || t.kind() == NodeKind::Enumeration);
        if let (true, Some(path), Some(expr)) = (is_type, names::python_path(asg, id), plan.wrapper_expr(&target.target)) {
            lines.push(format!("_lib.{path} = {expr}"));
        }
    }
    let mut groups: BTreeMap<NodeId, Vec<String>> = BTreeMap::new();
    for unit in plan.units.iter().filter(|u| u.kind == UnitKind::Class) {
        if let NodeData::Specialization { template, .. } = &node(asg, &unit.owner).data {
            if let Some(expr) = plan.wrapper_expr(&unit.owner) {
                groups.entry(template.clone()).or_default().push(expr);
            }
        }
    }
    for (template, members) in groups {
        let Some(t) = asg.get(template.as_str()) else { continue };
        if t.access != Access::Public {
            continue;
        }
        let path = names::join(&names::scope_module(asg, &template), &t.local_name);
        lines.push(format!("_lib.{path} = [{}]", members.join(", ")));
    }
    if !lines.is_empty() {
        out.push('\n');
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
    }
    out
}
