#![allow(dead_code)]

use std::path::PathBuf;

use bindforge::parser::{parse, Bootstrap, ParseConfig};
use bindforge::Asg;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn flags() -> Vec<String> {
    let stdlib = fixture("stdlib");
    vec!["-x".into(), "c++".into(), "-std=c++11".into(), "-I".into(), stdlib.display().to_string()]
}

pub fn parse_with(headers: &[&str], extra_flags: &[String], bootstrap: Bootstrap) -> Asg {
    let mut asg = Asg::new();
    let mut f = flags();
    f.extend_from_slice(extra_flags);
    let config = ParseConfig::new(headers.iter().map(|h| fixture(h)), f).with_bootstrap(bootstrap);
    parse(&mut asg, &config).unwrap_or_else(|e| panic!("{e}"));
    asg
}

pub fn parse_fixture(header: &str) -> Asg {
    parse_with(&[header], &[], Bootstrap::Unbounded)
}

/// Declarations other than the global namespace.
pub fn declaration_ids(asg: &Asg) -> Vec<String> {
    asg.nodes()
        .filter(|n| n.kind().is_declaration() && !n.id.is_root())
        .map(|n| n.id.to_string())
        .collect()
}

/// Parse, run the default controller, select internal nodes and generate.
pub fn wrap(header: &str, module: &str) -> (Asg, bindforge::generators::Generation) {
    use bindforge::controllers::{default_controller, Options};
    use bindforge::generators::{generate, select_internal, GenerateConfig};
    let mut asg = parse_fixture(header);
    default_controller(&mut asg, &Options::new()).unwrap();
    let module_name = bindforge::generators::names::module_dotted(std::path::Path::new(module));
    let config = GenerateConfig::new(select_internal(&asg, &module_name), module).with_decorator("decorator.py");
    let generation = generate(&asg, &config).unwrap_or_else(|e| panic!("{e}"));
    (asg, generation)
}

/// Every type named in a wrapped signature is a fundamental, wrapped by the
/// same file set, or already exported by another module. Returns the
/// offending (node, type) pairs.
pub fn closure_violations(asg: &Asg, manifest: &std::collections::BTreeMap<PathBuf, Vec<bindforge::NodeId>>) -> Vec<(String, String)> {
    use bindforge::asg::is_fundamental_id;
    use bindforge::generators::resolve_aliases;
    let covered: std::collections::BTreeSet<&bindforge::NodeId> = manifest.values().flatten().collect();
    let mut out = Vec::new();
    for id in &covered {
        let node = asg.get(id.as_str()).expect("manifest ids exist");
        for ty in node.qualified_types() {
            let target = resolve_aliases(asg, ty).target;
            let ok = is_fundamental_id(&target)
                || covered.contains(&target)
                || asg.get(target.as_str()).is_some_and(|n| n.already_exported.is_some());
            if !ok && node.kind() != bindforge::NodeKind::Alias {
                out.push((id.to_string(), target.to_string()));
            }
        }
    }
    out
}
