//! Header parser: pre-processing (header registration, flags), processing
//! (declarations into graph nodes) and post-processing (bootstrap of
//! referenced template specializations).

mod decl;
mod instantiate;
mod lexer;

use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::asg::{Asg, Dependency, HeaderInfo, Language, Node, NodeData, NodeId};

pub use instantiate::{bootstrap_specializations, BootstrapReport};

/// How many rounds of specialization instantiation follow parsing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Bootstrap {
    #[default]
    Unbounded,
    Off,
    Max(u32),
}

impl Bootstrap {
    pub fn limit(self) -> Option<u32> {
        match self {
            Bootstrap::Unbounded => None,
            Bootstrap::Off => Some(0),
            Bootstrap::Max(n) => Some(n),
        }
    }
}

impl FromStr for Bootstrap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "unbounded" | "true" => Ok(Bootstrap::Unbounded),
            "off" | "false" => Ok(Bootstrap::Off),
            n => match n.parse::<u32>() {
                Ok(0) => Ok(Bootstrap::Off),
                Ok(n) => Ok(Bootstrap::Max(n)),
                Err(_) => Err(format!("invalid bootstrap value `{s}` (expected inf, off or a count)")),
            },
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseConfig {
    pub headers: Vec<PathBuf>,
    pub flags: Vec<String>,
    pub bootstrap: Bootstrap,
}

impl ParseConfig {
    pub fn new(headers: impl IntoIterator<Item = impl Into<PathBuf>>, flags: impl IntoIterator<Item = impl Into<String>>) -> Self {
        ParseConfig {
            headers: headers.into_iter().map(Into::into).collect(),
            flags: flags.into_iter().map(Into::into).collect(),
            bootstrap: Bootstrap::Unbounded,
        }
    }

    pub fn with_bootstrap(mut self, bootstrap: Bootstrap) -> Self {
        self.bootstrap = bootstrap;
        self
    }
}

/// Position of a diagnostic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceLoc {
    pub path: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.path, self.line, self.column)
    }
}

impl SourceLoc {
    fn file(path: &Path) -> Self {
        SourceLoc { path: path.display().to_string(), line: 1, column: 1 }
    }
}

/// Parse failures, rendered as `path:line:col: error: message`.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{0}: error: header not found")]
    MissingHeader(SourceLoc),
    #[error("{0}: error: header should have header guards")]
    MissingGuard(SourceLoc),
    #[error("error: unsupported flag `{0}`")]
    BadFlag(String),
    #[error("{loc}: error: {message}")]
    Syntax { loc: SourceLoc, message: String },
    #[error("{loc}: error: unsupported construct: {construct}")]
    Unsupported { loc: SourceLoc, construct: String },
    #[error("{}error: template `{template}` expects {expected} argument(s), got {found}", prefix(.loc))]
    TemplateArityMismatch { loc: Option<SourceLoc>, template: String, expected: usize, found: usize },
    #[error("{}error: unknown template `{name}`", prefix(.loc))]
    UnknownTemplate { loc: Option<SourceLoc>, name: String },
    #[error("{path}: error: {message}")]
    Io { path: String, message: String },
}

fn prefix(loc: &Option<SourceLoc>) -> String {
    loc.as_ref().map(|l| format!("{l}: ")).unwrap_or_default()
}

impl ParseError {
    /// Attaches a location to errors raised away from the token stream.
    pub(crate) fn at(self, here: &SourceLoc) -> Self {
        match self {
            ParseError::TemplateArityMismatch { loc: None, template, expected, found } => {
                ParseError::TemplateArityMismatch { loc: Some(here.clone()), template, expected, found }
            }
            ParseError::UnknownTemplate { loc: None, name } => ParseError::UnknownTemplate { loc: Some(here.clone()), name },
            other => other,
        }
    }
}

/// Compiler-style flags understood by the parser.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub include_dirs: Vec<PathBuf>,
    pub language: Option<String>,
    pub standard: Option<String>,
}

impl Flags {
    pub fn parse(flags: &[String]) -> Result<Flags, ParseError> {
        let mut out = Flags::default();
        let mut it = flags.iter();
        while let Some(flag) = it.next() {
            if flag == "-I" {
                let dir = it.next().ok_or_else(|| ParseError::BadFlag("-I (missing directory)".into()))?;
                out.include_dirs.push(include_dir(dir)?);
            } else if let Some(dir) = flag.strip_prefix("-I") {
                out.include_dirs.push(include_dir(dir)?);
            } else if flag == "-x" {
                let lang = it.next().ok_or_else(|| ParseError::BadFlag("-x (missing language)".into()))?;
                if lang != "c++" {
                    return Err(ParseError::BadFlag(format!("-x {lang}")));
                }
                out.language = Some(lang.clone());
            } else if let Some(std) = flag.strip_prefix("-std=") {
                if std != "c++11" {
                    return Err(ParseError::BadFlag(flag.clone()));
                }
                out.standard = Some(std.to_string());
            } else {
                return Err(ParseError::BadFlag(flag.clone()));
            }
        }
        Ok(out)
    }
}

fn include_dir(dir: &str) -> Result<PathBuf, ParseError> {
    let path = PathBuf::from(dir);
    if !path.is_dir() {
        return Err(ParseError::BadFlag(format!("-I {dir} (not a directory)")));
    }
    Ok(path)
}

/// Lexically normalized path: `./a/../b.h` becomes `b.h`.
pub(crate) fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

pub(crate) fn header_id(path: &Path) -> Result<NodeId, ParseError> {
    let canonical = path.canonicalize().map_err(|_| ParseError::MissingHeader(SourceLoc::file(path)))?;
    Ok(NodeId::new(canonical.display().to_string()))
}

/// The synthetic header including every listed header, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateHeader {
    pub headers: Vec<(NodeId, PathBuf)>,
    pub text: String,
}

/// Registers the listed headers as internal, self-contained header nodes and
/// records `-I` search paths. Fails without touching the graph if a header is
/// missing, lacks include guards, or a flag is not understood.
pub fn preprocess(asg: &mut Asg, config: &ParseConfig) -> Result<AggregateHeader, ParseError> {
    let flags = Flags::parse(&config.flags)?;
    let mut headers = Vec::new();
    for path in &config.headers {
        if !path.is_file() {
            return Err(ParseError::MissingHeader(SourceLoc::file(path)));
        }
        let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let tokens = lexer::tokenize(&text).map_err(|e| ParseError::Syntax {
            loc: SourceLoc { path: path.display().to_string(), line: e.line, column: e.column },
            message: e.message,
        })?;
        if decl::guard_tokens(&tokens).is_none() {
            return Err(ParseError::MissingGuard(SourceLoc::file(path)));
        }
        headers.push((header_id(path)?, normalize(path)));
    }
    let mut text = String::new();
    for (id, spelling) in &headers {
        let mut node = Node::new(
            id.clone(),
            spelling.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            None,
            NodeData::Header(HeaderInfo {
                spelling: spelling.display().to_string(),
                angled: false,
                self_contained: true,
                dependency: Dependency::Internal,
                language: Language::Cxx,
            }),
        );
        if let Some(existing) = asg.get(id.as_str()) {
            node.doc = existing.doc.clone();
        }
        asg.insert(node);
        text.push_str(&format!("#include \"{}\"\n", spelling.display()));
    }
    for dir in &flags.include_dirs {
        asg.add_search_path(dir.display().to_string());
    }
    Ok(AggregateHeader { headers, text })
}

/// Parses the listed headers into the graph, then bootstraps template
/// specializations per `config.bootstrap`. On error the graph is unchanged.
pub fn parse(asg: &mut Asg, config: &ParseConfig) -> Result<(), ParseError> {
    let mut work = asg.clone();
    let aggregate = preprocess(&mut work, config)?;
    let flags = Flags::parse(&config.flags)?;
    let mut session = decl::Session::new(&mut work, flags.include_dirs);
    for (id, path) in &aggregate.headers {
        session.parse_header(id, path)?;
    }
    bootstrap_specializations(&mut work, config.bootstrap)?;
    work.validate().map_err(|e| ParseError::Io { path: "<graph>".into(), message: e.to_string() })?;
    *asg = work;
    Ok(())
}
