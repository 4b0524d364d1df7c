//! Named, replaceable passes: controllers, node selectors and generator
//! template sets, each with a currently selected entry.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::asg::{Asg, NodeId};
use crate::controllers::{default_controller, subset_controller, Controller};
use crate::generators::{boost_python, select_internal, select_pattern, GenerateError, Templates};

/// Selector: graph, module name and optional pattern to a node set.
pub type Selector = fn(&Asg, &str, Option<&str>) -> Result<BTreeSet<NodeId>, GenerateError>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("no {kind} named `{name}`")]
    Unknown { kind: &'static str, name: String },
}

/// One family of interchangeable implementations.
#[derive(Clone, Debug)]
pub struct Slot<T> {
    kind: &'static str,
    entries: BTreeMap<String, T>,
    selected: String,
}

impl<T: Clone> Slot<T> {
    fn new(kind: &'static str, name: &str, entry: T) -> Self {
        Slot { kind, entries: BTreeMap::from([(name.to_string(), entry)]), selected: name.to_string() }
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, name: &str, entry: T) {
        self.entries.insert(name.to_string(), entry);
    }

    pub fn select(&mut self, name: &str) -> Result<(), RegistryError> {
        if !self.entries.contains_key(name) {
            return Err(RegistryError::Unknown { kind: self.kind, name: name.into() });
        }
        self.selected = name.to_string();
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<T, RegistryError> {
        self.entries.get(name).cloned().ok_or_else(|| RegistryError::Unknown { kind: self.kind, name: name.into() })
    }

    pub fn selected(&self) -> (&str, T) {
        (&self.selected, self.entries[&self.selected].clone())
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

fn internal(asg: &Asg, module: &str, _pattern: Option<&str>) -> Result<BTreeSet<NodeId>, GenerateError> {
    Ok(select_internal(asg, module))
}

fn pattern(asg: &Asg, _module: &str, pattern: Option<&str>) -> Result<BTreeSet<NodeId>, GenerateError> {
    select_pattern(asg, pattern.unwrap_or(".*"))
}

#[derive(Clone, Debug)]
pub struct PassRegistry {
    pub controllers: Slot<Controller>,
    pub selectors: Slot<Selector>,
    pub templates: Slot<Templates>,
}

impl Default for PassRegistry {
    fn default() -> Self {
        let mut controllers = Slot::new("controller", "default", default_controller as Controller);
        controllers.register("subset", subset_controller);
        let mut selectors = Slot::new("selector", "boost_python_internal", internal as Selector);
        selectors.register("boost_python_pattern", pattern);
        let templates = Slot::new(
            "template set",
            "boost_python",
            Templates { export: boost_python::export_file, module: boost_python::module_file, decorator: boost_python::decorator_file },
        );
        PassRegistry { controllers, selectors, templates }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::Options;
    use crate::lint::Lint;

    fn noop(_: &mut Asg, _: &Options) -> Result<Vec<Lint>, crate::controllers::ControlError> {
        Ok(vec![Lint::new("noop", "::", "ran")])
    }

    #[test]
    fn defaults_are_selected() {
        let r = PassRegistry::default();
        assert_eq!(r.controllers.selected().0, "default");
        assert_eq!(r.selectors.names(), ["boost_python_internal", "boost_python_pattern"]);
        assert_eq!(r.templates.selected().0, "boost_python");
    }

    #[test]
    fn register_replaces_and_select_checks() {
        let mut r = PassRegistry::default();
        r.controllers.register("default", noop);
        let lints = (r.controllers.get("default").unwrap())(&mut Asg::new(), &Options::new()).unwrap();
        assert_eq!(lints[0].code, "noop");
        assert_eq!(r.controllers.select("nope"), Err(RegistryError::Unknown { kind: "controller", name: "nope".into() }));
        assert_eq!(r.controllers.selected().0, "default");
    }
}
