mod common;

use bindforge::asg::diff;
use bindforge::controllers::{default_controller, Options};
use bindforge::generators::{generate, select_internal, GenerateConfig};
use bindforge::parser::Bootstrap;
use bindforge::Asg;
use common::{fixture, parse_fixture, parse_with};

const FIXTURES: &[&str] = &[
    "basic/binomial.h",
    "overload/overload.h",
    "stl/stl.h",
    "stl/returns.h",
    "counts/counts.h",
    "operators/ops.h",
    "diamond/diamond.h",
    "bootstrap/box.h",
    "bootstrap/nested.h",
    "deps/liba/a.h",
    "deps/libb/b.h",
    "perm1/lib.h",
    "perm2/lib.h",
    "arrays/grid.h",
];

#[test]
fn every_fixture_round_trips() {
    let mut graphs: Vec<Asg> = FIXTURES.iter().map(|h| parse_fixture(h)).collect();
    let ext = format!("-I{}", fixture("clean/ext").display());
    graphs.push(parse_with(&["clean/lib.h"], &[ext], Bootstrap::Unbounded));
    for (i, asg) in graphs.iter().enumerate() {
        let text = asg.save();
        let back = Asg::load(&text).unwrap();
        assert_eq!(&back, asg, "fixture {i}");
        assert!(diff(asg, &back).is_empty());
        assert_eq!(back.save(), text);
    }
}

#[test]
fn controlled_and_marked_graphs_round_trip() {
    let mut asg = parse_fixture("stl/stl.h");
    default_controller(&mut asg, &Options::new()).unwrap();
    let g = generate(&asg, &GenerateConfig::new(select_internal(&asg, "_m"), "m.cpp")).unwrap();
    g.mark_exported(&mut asg, "_m");
    let back = Asg::load(&asg.save()).unwrap();
    assert_eq!(back, asg);
    assert!(back.nodes().any(|n| n.already_exported.as_deref() == Some("_m")));
}

#[test]
fn diff_reports_changes() {
    let a = parse_fixture("counts/counts.h");
    let mut b = a.clone();
    b.get_mut("class ::geo::Point").unwrap().doc = "changed".into();
    let d = diff(&a, &b);
    assert!(!d.is_empty());
    assert!(d.render().contains("class ::geo::Point"));
}
