//! Boost.Python wrapper generation: node selection, dependency closure,
//! export-unit planning and text emission.

pub mod boost_python;
pub mod names;
mod plan;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use regex::Regex;
use thiserror::Error;

use crate::asg::{Access, Asg, ExportFlag, Node, NodeData, NodeId, NodeKind, QualifiedType, Qualifier};
use crate::lint::Lint;

pub use plan::{ExportUnit, Plan, UnitKind, UnitMember};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("`{from}` refers to `{target}`, which is neither wrapped nor exported by a dependency")]
    UnsatisfiedDependency { from: String, target: String },
    #[error("digest collision between `{first}` and `{second}` ({digest})")]
    HashCollision { first: String, second: String, digest: String },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Text templates for the three kinds of output file.
#[derive(Clone, Copy)]
pub struct Templates {
    pub export: fn(&Plan, &ExportUnit) -> String,
    pub module: fn(&Plan) -> String,
    pub decorator: fn(&Plan) -> String,
}

impl Default for Templates {
    fn default() -> Self {
        Templates { export: boost_python::export_file, module: boost_python::module_file, decorator: boost_python::decorator_file }
    }
}

impl std::fmt::Debug for Templates {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Templates")
    }
}

#[derive(Clone, Debug)]
pub struct GenerateConfig {
    pub nodes: BTreeSet<NodeId>,
    /// Module file, relative to the output directory; export files go next
    /// to it.
    pub module: PathBuf,
    pub decorator: Option<PathBuf>,
    pub closure: bool,
    pub prefix: String,
    pub templates: Templates,
}

impl GenerateConfig {
    pub fn new(nodes: BTreeSet<NodeId>, module: impl Into<PathBuf>) -> Self {
        GenerateConfig {
            nodes,
            module: module.into(),
            decorator: None,
            closure: true,
            prefix: "wrapper_".into(),
            templates: Templates::default(),
        }
    }

    pub fn with_decorator(mut self, path: impl Into<PathBuf>) -> Self {
        self.decorator = Some(path.into());
        self
    }

    /// Dotted Python name of the extension module.
    pub fn module_name(&self) -> String {
        names::module_dotted(&self.module)
    }

    fn validate(&self) -> Result<(), GenerateError> {
        let ext = self.module.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !["cpp", "cc", "cxx", "c++"].contains(&ext) {
            return Err(GenerateError::BadConfig(format!("module `{}` is not a C++ source file", self.module.display())));
        }
        let ident = Regex::new("^[A-Za-z_][A-Za-z0-9_]*$").expect("valid regex");
        if !ident.is_match(&self.prefix) {
            return Err(GenerateError::BadConfig(format!("prefix `{}` is not an identifier", self.prefix)));
        }
        Ok(())
    }
}

/// Generated text by output path, plus the node ids each file covers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WrapperFileSet {
    pub files: BTreeMap<PathBuf, String>,
    pub manifest: BTreeMap<PathBuf, Vec<NodeId>>,
    /// Where the manifest itself is written.
    pub manifest_path: PathBuf,
}

impl WrapperFileSet {
    /// One line per file: `path<TAB>id,id,...`.
    pub fn manifest_text(&self) -> String {
        let mut out = String::new();
        for (path, ids) in &self.manifest {
            let ids: Vec<&str> = ids.iter().map(NodeId::as_str).collect();
            out.push_str(&format!("{}\t{}\n", slash_path(path), ids.join(",")));
        }
        out
    }

    /// Writes every file (and the manifest) under `dir`. Files are first
    /// written to temporaries next to their targets and only renamed into
    /// place once all of them were written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, GenerateError> {
        let io = |path: &Path, e: std::io::Error| GenerateError::Io { path: path.display().to_string(), message: e.to_string() };
        let manifest = self.manifest_text();
        let all = self.files.iter().map(|(p, t)| (p.clone(), t.as_str())).chain(std::iter::once((self.manifest_path.clone(), manifest.as_str())));
        let mut staged = Vec::new();
        for (rel, text) in all {
            let target = dir.join(&rel);
            let parent = target.parent().map(Path::to_path_buf).unwrap_or_else(|| dir.to_path_buf());
            std::fs::create_dir_all(&parent).map_err(|e| io(&parent, e))?;
            let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| io(&parent, e))?;
            tmp.write_all(text.as_bytes()).map_err(|e| io(&target, e))?;
            staged.push((tmp, target));
        }
        let mut written = Vec::new();
        for (tmp, target) in staged {
            tmp.persist(&target).map_err(|e| io(&target, e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}

/// Parses manifest text back into path → ids.
pub fn parse_manifest(text: &str) -> BTreeMap<PathBuf, Vec<NodeId>> {
    let mut out = BTreeMap::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let (path, ids) = line.split_once('\t').unwrap_or((line, ""));
        out.insert(PathBuf::from(path), split_ids(ids));
    }
    out
}

/// Ids are comma separated; commas inside ids are always followed by a
/// space.
fn split_ids(s: &str) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, b) in bytes.iter().enumerate() {
        if *b == b',' && bytes.get(i + 1) != Some(&b' ') {
            out.push(NodeId::new(&s[start..i]));
            start = i + 1;
        }
    }
    if start < s.len() {
        out.push(NodeId::new(&s[start..]));
    }
    out
}

fn slash_path(p: &Path) -> String {
    p.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect::<Vec<_>>().join("/")
}

/// Result of a generation run.
#[derive(Clone, Debug)]
pub struct Generation {
    pub wrappers: WrapperFileSet,
    pub lints: Vec<Lint>,
    /// Every node the output wraps (units and inlined members).
    pub wrapped: BTreeSet<NodeId>,
}

impl Generation {
    /// Records on the graph that the wrapped nodes now live in `module`.
    pub fn mark_exported(&self, asg: &mut Asg, module: &str) {
        for id in &self.wrapped {
            if let Some(n) = asg.get_mut(id.as_str()) {
                n.already_exported = Some(module.to_string());
            }
        }
    }
}

/// Plans and renders the wrappers of `config.nodes`.
pub fn generate(asg: &Asg, config: &GenerateConfig) -> Result<Generation, GenerateError> {
    config.validate()?;
    let plan = Plan::build(asg, config)?;
    let mut files = BTreeMap::new();
    let mut manifest = BTreeMap::new();
    files.insert(config.module.clone(), (config.templates.module)(&plan));
    manifest.insert(config.module.clone(), Vec::new());
    for unit in &plan.units {
        files.insert(unit.path.clone(), (config.templates.export)(&plan, unit));
        manifest.insert(unit.path.clone(), unit.covered());
    }
    if let Some(dec) = &config.decorator {
        files.insert(dec.clone(), (config.templates.decorator)(&plan));
        manifest.insert(dec.clone(), plan.aliases.clone());
    }
    let stem = config.module.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let manifest_path = config.module.with_file_name(format!("{stem}.manifest"));
    let mut wrapped: BTreeSet<NodeId> = plan.units.iter().flat_map(ExportUnit::covered).collect();
    if config.decorator.is_some() {
        wrapped.extend(plan.aliases.iter().cloned());
    }
    Ok(Generation { wrappers: WrapperFileSet { files, manifest, manifest_path }, lints: plan.lints.clone(), wrapped })
}

fn exported_elsewhere(node: &Node, module: &str) -> bool {
    node.already_exported.as_deref().is_some_and(|m| m != module)
}

/// Declarations from internal headers not already wrapped by another
/// module, plus every node explicitly marked for export.
pub fn select_internal(asg: &Asg, module: &str) -> BTreeSet<NodeId> {
    asg.nodes()
        .filter(|n| n.kind().is_declaration() && !n.id.is_root())
        .filter(|n| (asg.is_internal(n) && !exported_elsewhere(n, module)) || n.export == ExportFlag::Yes)
        .map(|n| n.id.clone())
        .collect()
}

/// Declarations whose global name matches `pattern` (unanchored), plus
/// every node explicitly marked for export.
pub fn select_pattern(asg: &Asg, pattern: &str) -> Result<BTreeSet<NodeId>, GenerateError> {
    let re = Regex::new(pattern).map_err(|e| GenerateError::InvalidPattern(e.to_string()))?;
    Ok(asg
        .nodes()
        .filter(|n| n.kind().is_declaration())
        .filter(|n| re.is_match(n.id.as_str()) || n.export == ExportFlag::Yes)
        .map(|n| n.id.clone())
        .collect())
}

pub const STD_EXCEPTION: &str = "class ::std::exception";

/// Least superset of `nodes` closed under dependencies, minus nodes marked
/// `export=no` and nodes another module already wraps.
pub fn compute_closure(asg: &Asg, nodes: &BTreeSet<NodeId>, module: &str) -> BTreeSet<NodeId> {
    closure_with_exclusions(asg, nodes, module).0
}

/// The closure and the nodes it refused because of `export=no`.
pub(crate) fn closure_with_exclusions(asg: &Asg, nodes: &BTreeSet<NodeId>, module: &str) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
    let mut set = BTreeSet::new();
    let mut refused = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = nodes.iter().cloned().collect();
    while let Some(id) = queue.pop_front() {
        if set.contains(&id) || refused.contains(&id) {
            continue;
        }
        let Some(node) = asg.get(id.as_str()) else { continue };
        if !node.kind().is_declaration() && node.kind() != NodeKind::Fundamental {
            continue;
        }
        if node.export == ExportFlag::No || asg.ancestors(id.as_str()).iter().any(|a| a.export == ExportFlag::No) {
            refused.insert(id);
            continue;
        }
        if exported_elsewhere(node, module) {
            continue;
        }
        set.insert(id.clone());
        queue.extend(dependencies(asg, node));
    }
    (set, refused)
}

/// Nodes a wrapper of `node` needs.
fn dependencies(asg: &Asg, node: &Node) -> Vec<NodeId> {
    let mut out = Vec::new();
    if let Some(p) = node.parent().filter(|p| !p.is_root()) {
        out.push(p.clone());
    }
    out.extend(node.qualified_types().into_iter().map(|t| t.target.clone()));
    if let Some(c) = node.class_info() {
        out.extend(c.bases.iter().filter(|b| b.access == Access::Public && b.target.as_str() != STD_EXCEPTION).map(|b| b.target.clone()));
        out.extend(
            asg.children(node.id.as_str())
                .filter(|m| m.access == Access::Public && m.kind() != NodeKind::Destructor)
                .map(|m| m.id.clone()),
        );
    }
    if node.kind() == NodeKind::Enumeration {
        out.extend(asg.children(node.id.as_str()).map(|m| m.id.clone()));
    }
    out
}

/// Expands aliases: the type a use site finally designates.
pub fn resolve_aliases(asg: &Asg, ty: &QualifiedType) -> QualifiedType {
    let mut current = ty.clone();
    for _ in 0..64 {
        match asg.get(current.target.as_str()).map(|n| &n.data) {
            Some(NodeData::Alias { underlying }) => current = underlying.with_qualifiers(&current.qualifiers),
            _ => break,
        }
    }
    current
}

/// Ownership and lifetime marker for a wrapped return value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallPolicy {
    /// By value, or a C string.
    Default,
    /// Raw pointer: Python never deletes the object.
    NonOwning,
    /// Const reference: the value is copied.
    Copy,
    /// Non-const reference: tied to the owning instance; setters need a
    /// method decorator.
    InternalReference,
    /// Smart pointer: the caller takes ownership.
    OwnershipTransfer,
}

const SMART_POINTERS: &[&str] = &["class ::std::unique_ptr", "class ::std::shared_ptr", "class ::std::weak_ptr"];

pub fn infer_call_policy(asg: &Asg, returns: &QualifiedType) -> CallPolicy {
    let ty = resolve_aliases(asg, returns);
    if ty.is_lvalue_ref() {
        return if ty.is_const_ref() { CallPolicy::Copy } else { CallPolicy::InternalReference };
    }
    if ty.is_pointer() {
        let c_string = ty.target.as_str() == "::char" && ty.qualifiers == [Qualifier::Const, Qualifier::Pointer];
        return if c_string { CallPolicy::Default } else { CallPolicy::NonOwning };
    }
    if let Some(NodeData::Specialization { template, .. }) = asg.get(ty.target.as_str()).map(|n| &n.data) {
        if ty.is_value() && SMART_POINTERS.contains(&template.as_str()) {
            return CallPolicy::OwnershipTransfer;
        }
    }
    CallPolicy::Default
}

/// Whether `class` has `std::exception` among its transitive bases.
pub fn is_exception_class(asg: &Asg, class: &NodeId) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([class.clone()]);
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id.clone()) {
            continue;
        }
        let Some(info) = asg.get(id.as_str()).and_then(Node::class_info) else { continue };
        for b in &info.bases {
            if b.target.as_str() == STD_EXCEPTION {
                return true;
            }
            queue.push_back(b.target.clone());
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asg::fundamental_id;

    #[test]
    fn policies() {
        let asg = Asg::new();
        let int = |q: Vec<Qualifier>| QualifiedType::new(fundamental_id("int"), q);
        assert_eq!(infer_call_policy(&asg, &int(vec![Qualifier::Pointer])), CallPolicy::NonOwning);
        assert_eq!(infer_call_policy(&asg, &int(vec![Qualifier::LvalueRef])), CallPolicy::InternalReference);
        assert_eq!(infer_call_policy(&asg, &int(vec![Qualifier::Const, Qualifier::LvalueRef])), CallPolicy::Copy);
        assert_eq!(infer_call_policy(&asg, &int(vec![])), CallPolicy::Default);
        let cstr = QualifiedType::new(fundamental_id("char"), vec![Qualifier::Const, Qualifier::Pointer]);
        assert_eq!(infer_call_policy(&asg, &cstr), CallPolicy::Default);
    }

    #[test]
    fn manifest_round_trip() {
        let mut set = WrapperFileSet::default();
        set.manifest.insert(
            PathBuf::from("a/wrapper_x.cpp"),
            vec![NodeId::new("class ::std::vector< int, ::std::allocator< int > >"), NodeId::new("::f(int, int)")],
        );
        set.manifest.insert(PathBuf::from("a/module.cpp"), vec![]);
        assert_eq!(parse_manifest(&set.manifest_text()), set.manifest);
    }

    #[test]
    fn config_validation() {
        let bad = GenerateConfig::new(BTreeSet::new(), "module.py");
        assert!(matches!(bad.validate(), Err(GenerateError::BadConfig(_))));
        let mut bad = GenerateConfig::new(BTreeSet::new(), "module.cpp");
        bad.prefix = "9x".into();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn closure_of_nothing_is_nothing() {
        assert!(compute_closure(&Asg::new(), &BTreeSet::new(), "_m").is_empty());
    }
}
