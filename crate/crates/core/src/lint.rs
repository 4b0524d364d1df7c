//! Non-fatal diagnostics about guideline violations.

use std::fmt;

/// A lint, printed as `LINT <code>: <global-name>: <message>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lint {
    pub code: &'static str,
    pub name: String,
    pub message: String,
}

impl Lint {
    pub fn new(code: &'static str, name: impl Into<String>, message: impl Into<String>) -> Self {
        Lint { code, name: name.into(), message: message.into() }
    }
}

impl fmt::Display for Lint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LINT {}: {}: {}", self.code, self.name, self.message)
    }
}

pub mod codes {
    /// Overload set mixing static and non-static methods.
    pub const OVERLOAD_STATIC: &str = "overload-static";
    /// A const overload hidden by a later non-const one.
    pub const OVERLOAD_CONST: &str = "overload-const";
    /// Declaration using a C array, not wrapped.
    pub const C_ARRAY: &str = "c-array";
    /// Unary free operator left at namespace scope.
    pub const UNARY_OPERATOR: &str = "unary-operator";
    /// Exception class excluded from export: its translation is lost.
    pub const LOST_TRANSLATION: &str = "lost-translation";
    /// Member skipped because its signature uses a non-exportable node.
    pub const EXCLUDED_DEPENDENCY: &str = "excluded-dependency";
    /// Class wrapped without a definition.
    pub const INCOMPLETE_CLASS: &str = "incomplete-class";
    /// Documentation reference that names no known entity.
    pub const UNRESOLVED_REF: &str = "unresolved-ref";
    /// Documentation command outside the supported inventory.
    pub const UNKNOWN_DOC_TAG: &str = "unknown-doc-tag";
}
