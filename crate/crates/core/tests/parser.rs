mod common;

use std::collections::BTreeSet;
use std::io::Write;

use bindforge::asg::{Dependency, NodeKind};
use bindforge::parser::{parse, Bootstrap, ParseConfig, ParseError};
use bindforge::{Asg, NodeData};
use common::{fixture, flags, parse_fixture, parse_with};

fn kinds(k: &[NodeKind]) -> BTreeSet<NodeKind> {
    k.iter().copied().collect()
}

fn temp_header(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".h").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn parse_text(text: &str) -> Result<Asg, ParseError> {
    let f = temp_header(text);
    let mut asg = Asg::new();
    parse(&mut asg, &ParseConfig::new([f.path()], flags()))?;
    Ok(asg)
}

fn guarded(body: &str) -> String {
    format!("#ifndef T_H\n#define T_H\n{body}\n#endif\n")
}

#[test]
fn binomial_classes_and_members() {
    let asg = parse_fixture("basic/binomial.h");
    let b = asg.lookup("class ::BinomialDistribution").unwrap();
    assert!(b.is_complete());
    for id in [
        "::BinomialDistribution::n",
        "::BinomialDistribution::_pi",
        "::BinomialDistribution::pmf(unsigned int) const",
        "::BinomialDistribution::BinomialDistribution(unsigned int, double)",
        "::BinomialDistribution::BinomialDistribution(::BinomialDistribution const &)",
        "::BinomialDistribution::~BinomialDistribution()",
    ] {
        assert!(asg.contains(id), "{id}");
    }
    let pe = asg.lookup("class ::ProbabilityError").unwrap();
    let bases: Vec<_> = pe.class_info().unwrap().bases.iter().map(|b| b.target.to_string()).collect();
    assert_eq!(bases, vec!["class ::std::exception"]);
    let sub: Vec<_> = asg.subclasses("class ::std::exception", true).unwrap().iter().map(|n| n.id.to_string()).collect();
    assert!(sub.contains(&"class ::ProbabilityError".to_string()));
}

#[test]
fn headers_are_marked_internal_or_external() {
    let asg = parse_fixture("basic/binomial.h");
    let headers: Vec<_> = asg.iterate(&kinds(&[NodeKind::Header]), None).unwrap();
    assert_eq!(headers.len(), 2);
    for h in headers {
        let info = h.header_info().unwrap();
        if h.local_name == "binomial.h" {
            assert_eq!(info.dependency, Dependency::Internal);
            assert!(info.self_contained);
        } else {
            assert_eq!(h.local_name, "exception");
            assert_eq!(info.dependency, Dependency::External);
            assert!(info.angled);
        }
    }
    assert_eq!(asg.search_paths(), &[fixture("stdlib").display().to_string()]);
}

#[test]
fn every_declaration_is_declared_in_an_existing_header() {
    for f in ["basic/binomial.h", "overload/overload.h", "stl/stl.h", "counts/counts.h"] {
        let asg = parse_fixture(f);
        for node in asg.nodes().filter(|n| n.kind().is_declaration() && !n.id.is_root()) {
            let h = node.header.as_ref().unwrap_or_else(|| panic!("{} has no header", node.id));
            assert_eq!(asg.get(h.as_str()).unwrap().kind(), NodeKind::Header);
        }
    }
}

#[test]
fn doc_comment_is_attached_verbatim() {
    let asg = parse_fixture("basic/binomial.h");
    let pmf = asg.lookup("::BinomialDistribution::pmf(unsigned int) const").unwrap();
    assert_eq!(
        pmf.doc,
        "\\brief Probability mass function.\n\n\\param value The number of successes.\n\\return The probability of observing \\p value successes."
    );
    assert_eq!(asg.lookup("::BinomialDistribution::get_pi() const").unwrap().doc, "");
}

#[test]
fn overload_set_has_one_static_member() {
    let asg = parse_fixture("overload/overload.h");
    let methods = asg.iterate(&kinds(&[NodeKind::Method]), Some("^::Overload::staticness")).unwrap();
    assert_eq!(methods.len(), 2);
    assert_eq!(methods.iter().filter(|m| m.is_static_method()).count(), 1);
    let all: Vec<_> = asg.iterate(&kinds(&[NodeKind::Method]), None).unwrap().iter().map(|m| m.local_name.clone()).collect();
    assert_eq!(all, vec!["constness", "constness", "nonconstness", "nonconstness", "staticness", "staticness"]);
}

#[test]
fn namespaces_collapse() {
    let asg = parse_text(&guarded("namespace a { }\nnamespace a { void f(); }")).unwrap();
    let ns = asg.iterate(&kinds(&[NodeKind::Namespace]), Some("^::a$")).unwrap();
    assert_eq!(ns.len(), 1);
    let children: Vec<_> = asg.children("::a").map(|c| c.id.to_string()).collect();
    assert_eq!(children, vec!["::a::f()"]);
}

#[test]
fn forward_declaration_collapses_with_definition() {
    let asg = parse_text(&guarded("class A;\nclass A { public: int x; };\nclass A;")).unwrap();
    assert_eq!(asg.iterate(&kinds(&[NodeKind::Class]), None).unwrap().len(), 1);
    assert!(asg.lookup("class ::A").unwrap().is_complete());
}

#[test]
fn typedef_aliases_and_specializations() {
    let asg = parse_fixture("stl/stl.h");
    let aliases: Vec<_> = asg
        .iterate(&kinds(&[NodeKind::Alias]), Some("^typedef ::Vector.*"))
        .unwrap()
        .iter()
        .map(|n| n.id.to_string())
        .collect();
    assert_eq!(
        aliases,
        vec!["typedef ::VectorDouble", "typedef ::VectorInt", "typedef ::VectorString", "typedef ::VectorUnsignedLongInt"]
    );
    let spec = asg.lookup("class ::std::vector< int, ::std::allocator< int > >").unwrap();
    assert!(spec.is_complete());
    let specs: Vec<_> = asg
        .iterate(&kinds(&[NodeKind::Specialization]), Some("^class ::std::vector<"))
        .unwrap()
        .iter()
        .map(|n| n.id.to_string())
        .collect();
    assert_eq!(
        specs,
        vec![
            "class ::std::vector< ::std::string, ::std::allocator< ::std::string > >",
            "class ::std::vector< double, ::std::allocator< double > >",
            "class ::std::vector< int, ::std::allocator< int > >",
            "class ::std::vector< unsigned long int, ::std::allocator< unsigned long int > >",
        ]
    );
}

#[test]
fn bootstrap_completes_return_type_specialization() {
    let off = parse_with(&["stl/returns.h"], &[], Bootstrap::Off);
    let id = "class ::std::vector< int, ::std::allocator< int > >";
    assert!(!off.lookup(id).unwrap().is_complete());
    let on = parse_with(&["stl/returns.h"], &[], Bootstrap::Unbounded);
    let spec = on.lookup(id).unwrap();
    assert!(spec.is_complete());
    let members: BTreeSet<_> = on.children(id).map(|c| c.local_name.clone()).collect();
    for m in ["push_back", "operator[]", "size", "size_type", "vector", "~vector"] {
        assert!(members.contains(m), "{m}");
    }
    assert!(on.contains("::std::vector< int, ::std::allocator< int > >::operator[](::std::vector< int, ::std::allocator< int > >::size_type)"));
    assert!(on.incomplete_referenced_specializations().is_empty());
}

#[test]
fn bootstrap_iteration_cap() {
    let count = |b| parse_with(&["bootstrap/nested.h"], &[], b).incomplete_referenced_specializations().len();
    assert_eq!(count(Bootstrap::Off), 1);
    assert_eq!(count(Bootstrap::Max(1)), 1);
    assert_eq!(count(Bootstrap::Max(2)), 0);
    assert_eq!(count(Bootstrap::Unbounded), 0);
    let one = parse_with(&["bootstrap/nested.h"], &[], Bootstrap::Max(1));
    assert_eq!(
        one.incomplete_referenced_specializations().into_iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        vec!["class ::Inner< int >"]
    );
}

#[test]
fn parsing_twice_adds_nothing() {
    let once = parse_fixture("basic/binomial.h");
    let mut twice = once.clone();
    let config = ParseConfig::new([fixture("basic/binomial.h")], flags());
    parse(&mut twice, &config).unwrap();
    assert_eq!(once, twice);
}

#[test]
fn parsing_is_deterministic() {
    assert_eq!(parse_fixture("stl/stl.h"), parse_fixture("stl/stl.h"));
}

#[test]
fn enrichment_properties() {
    let asg = parse_text(&guarded(
        "class I { public: virtual void run() = 0; virtual ~I(); };\n\
         class J : public I { public: void run(); };\n\
         class K : public I { };\n\
         class N { public: N(); N(const N& other) = delete; };\n\
         class M : public N { };\n\
         class P { private: P(const P& other); };",
    ))
    .unwrap();
    let info = |id: &str| asg.lookup(id).unwrap().class_info().unwrap().clone();
    assert!(info("class ::I").is_abstract);
    assert!(!info("class ::J").is_abstract);
    assert!(info("class ::K").is_abstract);
    assert!(!info("class ::N").is_copyable);
    assert!(!info("class ::M").is_copyable);
    assert!(!info("class ::P").is_copyable);
    assert!(info("class ::J").is_copyable);
}

#[test]
fn arrays_enums_and_fundamentals() {
    let asg = parse_text(&guarded(
        "namespace n {\n enum class Color : unsigned char { RED = 1, GREEN = RED + 1 };\n\
         struct S { double values[3]; long unsigned counts; double (*rows)[4]; static const int K = 2; };\n\
         void fill(double data[], int n);\n}",
    ))
    .unwrap();
    let color = asg.lookup("enum ::n::Color").unwrap();
    assert_eq!(color.data, NodeData::Enumeration { scoped: true });
    assert_eq!(asg.lookup("::n::Color::GREEN").unwrap().data, NodeData::Enumerator { value: Some("RED + 1".into()) });
    let ty = |id: &str| asg.lookup(id).unwrap().qualified_types()[0].spelling();
    assert_eq!(ty("::n::S::values"), "double [3]");
    assert_eq!(ty("::n::S::counts"), "unsigned long int");
    assert_eq!(ty("::n::S::rows"), "double [4] *");
    assert!(asg.contains("::n::fill(double [], int)"));
    assert!(asg.lookup("::n::S::K").is_ok());
}

#[test]
fn operators_are_parsed_as_functions() {
    let asg = parse_fixture("operators/ops.h");
    assert!(asg.contains("::operator==(::A const &, ::A const &)"));
    assert!(asg.contains("::operator-(::A const &)"));
    assert!(asg.contains("::operator<<(::std::ostream &, ::A const &)"));
}

fn err(text: &str) -> ParseError {
    parse_text(&guarded(text)).expect_err("should fail")
}

#[test]
fn unsupported_constructs_abort() {
    for (src, construct) in [
        ("template<class T> void f(T t);", "function template"),
        ("template<int N> class A { };", "non-type template parameter"),
        ("template<class... T> class A { };", "variadic template"),
        ("void f(int a, ...);", "variadic function"),
        ("void f(int&& a);", "rvalue reference"),
        ("union U { int a; };", "union"),
        ("class A { friend class B; };", "friend declaration"),
        ("using namespace std;", "using directive"),
        ("#define X 1", "macro definition"),
        ("#ifdef X\n#endif", "conditional compilation"),
        ("class A { operator int() const; };", "conversion operator"),
        ("namespace { int x; }", "anonymous namespace"),
        ("void f(void (*cb)(int));", "function pointer parameter"),
        ("template<class T> class A { class B { }; };", "nested class inside a class template"),
    ] {
        match err(src) {
            ParseError::Unsupported { construct: c, .. } => assert_eq!(c, construct, "{src}"),
            other => panic!("{src}: {other}"),
        }
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let e = err("class A { int x }");
    let text = e.to_string();
    assert!(matches!(e, ParseError::Syntax { .. }), "{text}");
    assert!(text.contains(":3:"), "{text}");
    assert!(text.contains(": error: "), "{text}");
    assert!(matches!(err("Unknown f();"), ParseError::Syntax { .. }));
}

#[test]
fn template_errors() {
    assert!(matches!(err("template<class T> class A { };\nA< int, int > f();"), ParseError::TemplateArityMismatch { .. }));
    assert!(matches!(err("class B { };\nB< int > f();"), ParseError::UnknownTemplate { .. }));
}

#[test]
fn errors_leave_graph_unchanged() {
    let mut asg = parse_fixture("basic/binomial.h");
    let before = asg.clone();
    let bad = temp_header(&guarded("class Z { int x };"));
    assert!(parse(&mut asg, &ParseConfig::new([bad.path()], flags())).is_err());
    assert_eq!(asg, before);
}

#[test]
fn missing_header_and_guard() {
    let mut asg = Asg::new();
    let e = parse(&mut asg, &ParseConfig::new([fixture("nope.h")], flags())).unwrap_err();
    assert!(matches!(e, ParseError::MissingHeader(_)));
    assert!(e.to_string().ends_with("error: header not found"));
    let f = temp_header("int x;\n");
    let e = parse(&mut asg, &ParseConfig::new([f.path()], flags())).unwrap_err();
    assert!(matches!(e, ParseError::MissingGuard(_)));
    assert!(e.to_string().contains("should have header guards"));
    assert_eq!(asg, Asg::new());
}

#[test]
fn pragma_once_is_a_guard() {
    let asg = parse_text("#pragma once\nclass A { };\n").unwrap();
    assert!(asg.contains("class ::A"));
}

#[test]
fn header_order_does_not_change_the_graph() {
    let ab = parse_with(&["perm1/lib.h", "counts/counts.h"], &[], Bootstrap::Unbounded);
    let ba = parse_with(&["counts/counts.h", "perm1/lib.h"], &[], Bootstrap::Unbounded);
    assert_eq!(ab, ba);
}
