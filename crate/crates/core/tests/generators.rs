mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use bindforge::asg::ExportFlag;
use bindforge::controllers::{default_controller, Options};
use bindforge::generators::{
    compute_closure, generate, select_internal, select_pattern, GenerateConfig, GenerateError, Generation,
};
use bindforge::lint::codes;
use bindforge::{Asg, NodeId};
use common::{closure_violations, parse_fixture, wrap};
use proptest::prelude::*;

// Digests computed beforehand with Python's hashlib.md5 over the UTF-8
// global name.
const BINOMIAL: &str = "f5acd38187f9d5d2c2aafbcecc3f59a8";
const PROBABILITY_ERROR: &str = "d809acd5311db30316de0a91d9158f22";
const OVERLOAD: &str = "ccd757424a97ba36eb0d5c04d0a8fe28";
const GEO_DISTANCE: &str = "a5f1f22b3d9afdcde12c2f0fa11c495b";
const GEO_COLOR: &str = "f8935f20e677479c27e8027935f9b18c";
const VECTORS: [(&str, &str); 4] = [
    ("int", "9e92e0f9a10d1f91b45ebe335aa3f527"),
    ("double", "4857a65b1ef224dcb5d1593635b01fc7"),
    ("unsigned long int", "552ed44e944df56cb73e4f2190748f9d"),
    ("::std::string", "fc32dd98f3c69bc39301cc367609ab02"),
];

fn export_files(g: &Generation) -> Vec<&PathBuf> {
    g.wrappers.files.keys().filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("wrapper_")).collect()
}

fn file<'a>(g: &'a Generation, path: &str) -> &'a str {
    g.wrappers.files.get(Path::new(path)).unwrap_or_else(|| panic!("no {path}"))
}

fn ids(v: &[&str]) -> BTreeSet<NodeId> {
    v.iter().map(|s| NodeId::new(*s)).collect()
}

#[test]
fn binomial_file_set() {
    let (_, g) = wrap("basic/binomial.h", "basic/module.cpp");
    let paths: Vec<String> = g.wrappers.files.keys().map(|p| p.display().to_string()).collect();
    assert_eq!(
        paths,
        [
            "basic/module.cpp".to_string(),
            format!("basic/wrapper_{PROBABILITY_ERROR}.cpp"),
            format!("basic/wrapper_{BINOMIAL}.cpp"),
            "decorator.py".to_string(),
        ]
    );
    let error = file(&g, &format!("basic/wrapper_{PROBABILITY_ERROR}.cpp"));
    assert_eq!(error.matches("register_exception_translator").count(), 1);
    assert!(!file(&g, &format!("basic/wrapper_{BINOMIAL}.cpp")).contains("register_exception_translator"));
    let module = file(&g, "basic/module.cpp");
    assert!(module.contains("BOOST_PYTHON_MODULE(_module)"));
    assert!(module.contains(&format!("export_{BINOMIAL}();")) && module.contains(&format!("export_{PROBABILITY_ERROR}();")));
    assert!(file(&g, "decorator.py").starts_with("import basic._module as _lib\n"));
    assert_eq!(g.wrappers.manifest_path, PathBuf::from("basic/module.manifest"));
}

#[test]
fn binomial_members_and_docs() {
    let (_, g) = wrap("basic/binomial.h", "basic/module.cpp");
    let text = file(&g, &format!("basic/wrapper_{BINOMIAL}.cpp"));
    // Protected members and destructors are not wrapped.
    assert!(!text.contains("\"_pi\"") && !text.contains("~"));
    assert!(text.contains("def_readwrite(\"n\", &::BinomialDistribution::n"));
    assert!(text.contains("boost::python::init< unsigned int, double >"));
    assert!(text.contains(":param value: The number of successes.\\n:returns: The probability of observing ``value`` successes."));
    let manifest = &g.wrappers.manifest[&PathBuf::from(format!("basic/wrapper_{BINOMIAL}.cpp"))];
    assert_eq!(manifest[0].as_str(), "class ::BinomialDistribution");
    assert!(!manifest.iter().any(|id| id.as_str().ends_with("::_pi")));
}

#[test]
fn generation_is_repeatable() {
    let first = wrap("basic/binomial.h", "basic/module.cpp").1.wrappers;
    for _ in 0..4 {
        assert_eq!(wrap("basic/binomial.h", "basic/module.cpp").1.wrappers, first);
    }
}

#[test]
fn file_count_law() {
    let (asg, g) = wrap("counts/counts.h", "counts/module.cpp");
    assert_eq!(export_files(&g).len(), 10);
    assert!(g.wrappers.files.contains_key(Path::new(&format!("counts/wrapper_{GEO_DISTANCE}.cpp"))));
    let color = &g.wrappers.manifest[&PathBuf::from(format!("counts/wrapper_{GEO_COLOR}.cpp"))];
    assert_eq!(color.iter().map(NodeId::as_str).collect::<Vec<_>>(), ["enum ::geo::Color", "::geo::Color::RED", "::geo::Color::GREEN"]);
    // Members live in their parent's file only, and no id is covered twice.
    let mut seen = BTreeSet::new();
    for (path, covered) in &g.wrappers.manifest {
        for id in covered {
            assert!(seen.insert(id.clone()), "{id} covered twice");
            let node = asg.get(id.as_str()).unwrap();
            if matches!(node.kind(), bindforge::NodeKind::Enumerator | bindforge::NodeKind::Field | bindforge::NodeKind::Method) {
                assert_eq!(covered[0], *node.parent().unwrap(), "{id} in {}", path.display());
            }
        }
    }
}

#[test]
fn stl_decorators_and_converters() {
    let (_, g) = wrap("stl/stl.h", "stl/module.cpp");
    for (element, digest) in VECTORS {
        let text = file(&g, &format!("stl/wrapper_{digest}.cpp"));
        assert_eq!(text.matches("void method_decorator_").count(), 1, "{element}");
        assert!(text.contains(&format!("void method_decorator_{digest}(")));
        assert!(text.contains(&format!(".def(\"__setitem__\", autowig::method_decorator_{digest});")));
        assert!(text.contains(&format!("container->push_back(boost::python::extract< {element} >(item));")));
        assert_eq!(text.matches("converter::registry::push_back").count(), 1);
    }
    let script = file(&g, "decorator.py");
    assert!(script.contains(&format!("_lib.VectorInt = _lib.std._vector_{}\n", VECTORS[0].1)));
    let group = script.lines().find(|l| l.starts_with("_lib.std.vector = [")).unwrap();
    for (_, digest) in VECTORS {
        assert!(group.contains(&format!("_lib.std._vector_{digest}")));
    }
    assert_eq!(group.matches("_vector_").count(), 4);
}

#[test]
fn overload_lints() {
    let (_, g) = wrap("overload/overload.h", "test/overload/bar.cpp");
    let lints: Vec<(&str, &str)> = g.lints.iter().map(|l| (l.code, l.name.as_str())).collect();
    assert_eq!(lints, [(codes::OVERLOAD_CONST, "::Overload::nonconstness"), (codes::OVERLOAD_STATIC, "::Overload::staticness")]);
    let text = file(&g, &format!("test/overload/wrapper_{OVERLOAD}.cpp"));
    assert!(text.contains(":py:meth:`test.overload._bar.Overload.staticness`"));
    assert!(text.contains(".. note::\\n\\n    The documentation"));
    assert!(text.contains("staticmethod(\"staticness\")"));
}

#[test]
fn selectors() {
    let asg = parse_fixture("stl/stl.h");
    let vectors = select_pattern(&asg, "^class ::std::vector<.*").unwrap();
    assert_eq!(vectors.len(), 4);
    assert!(select_pattern(&asg, "^nothing$").unwrap().is_empty());
    assert!(matches!(select_pattern(&asg, "("), Err(GenerateError::InvalidPattern(_))));
    let all = select_pattern(&asg, ".*").unwrap();
    assert_eq!(all.len(), asg.nodes().filter(|n| n.kind().is_declaration()).count());
}

#[test]
fn closure_examples() {
    let mut asg = parse_fixture("basic/binomial.h");
    let pmf = ids(&["::BinomialDistribution::pmf(unsigned int) const"]);
    let closure = compute_closure(&asg, &pmf, "_module");
    assert!(closure.contains(&NodeId::new("class ::BinomialDistribution")));
    assert!(closure.contains(&NodeId::new("::double")));

    asg.get_mut("class ::ProbabilityError").unwrap().export = ExportFlag::No;
    let selected = select_internal(&asg, "_module");
    assert!(!compute_closure(&asg, &selected, "_module").contains(&NodeId::new("class ::ProbabilityError")));
    let g = generate(&asg, &GenerateConfig::new(selected, "module.cpp")).unwrap();
    assert_eq!(export_files(&g).len(), 1);
    assert!(g.lints.iter().any(|l| l.code == codes::LOST_TRANSLATION && l.name == "class ::ProbabilityError"));
}

#[test]
fn unsatisfied_dependency_without_closure() {
    let asg = parse_fixture("basic/binomial.h");
    let mut config = GenerateConfig::new(ids(&["::BinomialDistribution::pmf(unsigned int) const"]), "module.cpp");
    config.closure = false;
    let err = generate(&asg, &config).unwrap_err();
    assert!(matches!(err, GenerateError::UnsatisfiedDependency { ref target, .. } if target == "class ::BinomialDistribution"));

    let mut asg = parse_fixture("counts/counts.h");
    default_controller(&mut asg, &Options::new()).unwrap();
    let mut config = GenerateConfig::new(ids(&["class ::util::Clock", "::util::Clock::timer() const"]), "module.cpp");
    config.closure = false;
    let err = generate(&asg, &config).unwrap_err();
    assert!(matches!(err, GenerateError::UnsatisfiedDependency { ref target, .. } if target == "class ::util::Timer"));
}

#[test]
fn c_arrays_are_skipped() {
    let (_, g) = wrap("arrays/grid.h", "module.cpp");
    let skipped: Vec<&str> = g.lints.iter().filter(|l| l.code == codes::C_ARRAY).map(|l| l.name.as_str()).collect();
    assert_eq!(skipped, ["::Grid::cells", "::Grid::fill(double const [4])"]);
    let text = g.wrappers.files.iter().find(|(p, _)| p.to_string_lossy().contains("wrapper_")).unwrap().1;
    assert!(text.contains("\"get\"") && !text.contains("cells") && !text.contains("\"fill\"") && !text.contains("\"bind\""));
}

#[test]
fn dependency_merge_emits_nothing_for_the_dependency() {
    let mut a = parse_fixture("deps/liba/a.h");
    default_controller(&mut a, &Options::new()).unwrap();
    let module_a = "liba._module";
    let ga = generate(&a, &GenerateConfig::new(select_internal(&a, module_a), "liba/module.cpp")).unwrap();
    ga.mark_exported(&mut a, module_a);
    let saved = Asg::load(&a.save()).unwrap();

    let mut b = parse_fixture("deps/libb/b.h");
    b.merge(&saved).unwrap();
    default_controller(&mut b, &Options::new()).unwrap();
    let selected = select_internal(&b, "libb._module");
    assert!(selected.iter().all(|id| a.get(id.as_str()).is_none()), "{selected:?}");
    let gb = generate(&b, &GenerateConfig::new(selected, "libb/module.cpp").with_decorator("libb/__init__.py")).unwrap();
    let a_ids: BTreeSet<&NodeId> = ga.wrapped.iter().collect();
    assert!(gb.wrapped.iter().all(|id| !a_ids.contains(id)));
    assert!(closure_violations(&b, &gb.wrappers.manifest).is_empty());
    assert!(b.get("class ::liba::Vector3").unwrap().already_exported.as_deref() == Some(module_a));
    assert!(file(&gb, "libb/__init__.py").contains("import liba._module\n"));
}

/// Copies each permuted variant to the same path so header ids agree.
#[test]
fn permuted_declarations_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("lib.h");
    let mut outputs = Vec::new();
    for variant in ["perm1/lib.h", "perm2/lib.h"] {
        std::fs::copy(common::fixture(variant), &target).unwrap();
        let mut asg = Asg::new();
        let config = bindforge::parser::ParseConfig::new([&target], common::flags());
        bindforge::parser::parse(&mut asg, &config).unwrap();
        default_controller(&mut asg, &Options::new()).unwrap();
        let g = generate(&asg, &GenerateConfig::new(select_internal(&asg, "_module"), "module.cpp").with_decorator("d.py")).unwrap();
        outputs.push(g.wrappers);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn write_is_all_or_nothing() {
    let (_, g) = wrap("basic/binomial.h", "basic/module.cpp");
    let dir = tempfile::tempdir().unwrap();
    let written = g.wrappers.write(dir.path()).unwrap();
    assert_eq!(written.len(), 5);
    let manifest = std::fs::read_to_string(dir.path().join("basic/module.manifest")).unwrap();
    assert_eq!(bindforge::generators::parse_manifest(&manifest), g.wrappers.manifest);

    // A file standing where a directory is needed fails the run before
    // anything is renamed into place.
    let blocked = tempfile::tempdir().unwrap();
    std::fs::write(blocked.path().join("sub"), "").unwrap();
    let mut files = g.wrappers.clone();
    files.files.insert(PathBuf::from("sub/x.py"), String::new());
    assert!(matches!(files.write(blocked.path()), Err(GenerateError::Io { .. })));
    assert!(!blocked.path().join("basic/module.cpp").exists());
}

#[test]
fn configuration_errors() {
    let asg = parse_fixture("basic/binomial.h");
    let mut config = GenerateConfig::new(BTreeSet::new(), "module.cpp");
    config.prefix = "bad-prefix".into();
    assert!(matches!(generate(&asg, &config), Err(GenerateError::BadConfig(_))));
    let empty = generate(&asg, &GenerateConfig::new(BTreeSet::new(), "module.cpp")).unwrap();
    assert_eq!(empty.wrappers.files.len(), 1);
}

fn counts_graph() -> Asg {
    let mut asg = parse_fixture("counts/counts.h");
    default_controller(&mut asg, &Options::new()).unwrap();
    asg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_selection_is_sound(mask in proptest::collection::vec(any::<bool>(), 32)) {
        let asg = counts_graph();
        let internal: Vec<NodeId> = select_internal(&asg, "_module").into_iter().collect();
        let selected: BTreeSet<NodeId> = internal.iter().zip(mask.iter().cycle()).filter(|(_, k)| **k).map(|(id, _)| id.clone()).collect();
        let g = generate(&asg, &GenerateConfig::new(selected.clone(), "module.cpp")).unwrap();
        prop_assert!(closure_violations(&asg, &g.wrappers.manifest).is_empty());
        let covered: Vec<&NodeId> = g.wrappers.manifest.values().flatten().collect();
        let unique: BTreeSet<&NodeId> = covered.iter().copied().collect();
        prop_assert_eq!(covered.len(), unique.len());
        prop_assert_eq!(export_files(&g).len() + 1, g.wrappers.files.len());
        let again = generate(&asg, &GenerateConfig::new(selected, "module.cpp")).unwrap();
        prop_assert_eq!(again.wrappers, g.wrappers);
    }
}
