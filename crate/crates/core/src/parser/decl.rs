//! Recursive-descent parser over the supported declaration subset.

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::{Path, PathBuf};

use super::instantiate::{self, Env};
use super::lexer::{self, Tok, Token};
use super::{header_id, normalize, ParseError, SourceLoc};
use crate::asg::naming;
use crate::asg::{
    fundamental_id, Access, Asg, Base, BasePattern, ClassInfo, Dependency, HeaderInfo, Language, Location, MemberPattern,
    MemberPatternKind, Node, NodeData, NodeId, NodeKind, ParamPattern, Qualifier, TemplateBody, TemplateInfo, TemplateParam,
    TypeBase, TypeExpr,
};

/// Body range of a guarded header: everything between the guard directives.
pub(crate) fn guard_tokens(tokens: &[Token]) -> Option<Range<usize>> {
    let eof = tokens.len() - 1;
    let directive = |i: usize| match tokens.get(i).map(|t| &t.tok) {
        Some(Tok::Directive(d)) => Some(d.split_whitespace().collect::<Vec<_>>()),
        _ => None,
    };
    let first = directive(0)?;
    if first == ["pragma", "once"] {
        return Some(1..eof);
    }
    let second = directive(1)?;
    if first.len() == 2 && first[0] == "ifndef" && second.len() == 2 && second[0] == "define" && second[1] == first[1] {
        if eof >= 3 && directive(eof - 1)?.first() == Some(&"endif") {
            return Some(2..eof - 1);
        }
    }
    None
}

pub(crate) struct Session<'a> {
    pub(crate) asg: &'a mut Asg,
    include_dirs: Vec<PathBuf>,
    visited: BTreeSet<NodeId>,
}

impl<'a> Session<'a> {
    pub(crate) fn new(asg: &'a mut Asg, include_dirs: Vec<PathBuf>) -> Self {
        Session { asg, include_dirs, visited: BTreeSet::new() }
    }

    /// Parses one header (once per session), following its includes.
    pub(crate) fn parse_header(&mut self, id: &NodeId, path: &Path) -> Result<(), ParseError> {
        if !self.visited.insert(id.clone()) {
            return Ok(());
        }
        log::debug!("parsing {}", path.display());
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io { path: display.clone(), message: e.to_string() })?;
        let tokens = lexer::tokenize(&text).map_err(|e| ParseError::Syntax {
            loc: SourceLoc { path: display.clone(), line: e.line, column: e.column },
            message: e.message,
        })?;
        let internal = self.asg.get(id.as_str()).and_then(Node::header_info).is_some_and(|h| h.dependency == Dependency::Internal);
        let range = match guard_tokens(&tokens) {
            Some(r) => r,
            None if internal => return Err(ParseError::MissingGuard(SourceLoc::file(path))),
            None => 0..tokens.len() - 1,
        };
        let mut parser = Parser { sess: self, tokens: &tokens, pos: range.start, end: range.end, header: id.clone(), path: display, tmpl: None };
        parser.namespace_body(&NodeId::root(), false)
    }
}

struct TemplateCtx {
    id: NodeId,
    name: String,
    params: Vec<String>,
    aliases: Vec<String>,
    members: Vec<MemberPattern>,
}

#[derive(Default)]
struct Specs {
    is_static: bool,
    is_virtual: bool,
    is_extern: bool,
}

struct NamePart {
    name: String,
    args: Option<Vec<TypeExpr>>,
    tok: Token,
}

/// A parsed declarator: a variable/field or a function.
enum Declarator {
    Object { name: String, ty: TypeExpr, tok: Token },
    Function { name: String, returns: TypeExpr, params: Vec<ParamPattern>, trailer: Trailer, tok: Token },
}

#[derive(Default)]
struct Trailer {
    is_const: bool,
    is_pure: bool,
    deleted: bool,
}

const FUNDAMENTAL_WORDS: &[&str] =
    &["void", "bool", "char", "wchar_t", "char16_t", "char32_t", "short", "int", "long", "signed", "unsigned", "float", "double"];

struct Parser<'p, 'a> {
    sess: &'p mut Session<'a>,
    tokens: &'p [Token],
    pos: usize,
    end: usize,
    header: NodeId,
    path: String,
    tmpl: Option<TemplateCtx>,
}

impl Parser<'_, '_> {
    // ---- token plumbing -------------------------------------------------

    fn peek(&self, k: usize) -> &Token {
        let i = self.pos + k;
        if i < self.end {
            &self.tokens[i]
        } else {
            self.tokens.last().expect("eof token")
        }
    }

    fn next(&mut self) -> Token {
        let t = self.peek(0).clone();
        if self.pos < self.end {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.end
    }

    fn loc(&self, t: &Token) -> SourceLoc {
        SourceLoc { path: self.path.clone(), line: t.line, column: t.column }
    }

    fn syntax(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { loc: self.loc(t), message: message.into() }
    }

    fn unsupported(&self, t: &Token, construct: impl Into<String>) -> ParseError {
        ParseError::Unsupported { loc: self.loc(t), construct: construct.into() }
    }

    fn expect_punct(&mut self, c: char) -> Result<Token, ParseError> {
        let t = self.peek(0).clone();
        if t.is_punct(c) {
            self.pos += 1;
            Ok(t)
        } else {
            Err(self.syntax(&t, format!("expected `{c}`, found {}", t.describe())))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek(0).is_punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if self.peek(0).is_ident(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.peek(0).clone();
        match &t.tok {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok((s.clone(), t))
            }
            _ => Err(self.syntax(&t, format!("expected identifier, found {}", t.describe()))),
        }
    }

    /// Skips a balanced group starting at the current opening token.
    fn skip_balanced(&mut self) -> Result<(), ParseError> {
        let open = self.next();
        let mut depth = 0usize;
        let mut t = open.clone();
        loop {
            match t.tok {
                Tok::Punct('(' | '[' | '{') => depth += 1,
                Tok::Punct(')' | ']' | '}') => depth -= 1,
                Tok::Eof => return Err(self.syntax(&open, "unbalanced brackets")),
                Tok::Directive(_) => return Err(self.unsupported(&t, "preprocessor directive inside a declaration")),
                _ => {}
            }
            if depth == 0 {
                return Ok(());
            }
            t = self.next();
        }
    }

    /// Skips an expression up to (not including) `,`, `;`, `)` or `}` at depth 0.
    fn skip_expression(&mut self) -> Result<(), ParseError> {
        loop {
            let t = self.peek(0);
            match t.tok {
                Tok::Punct(',' | ';' | ')' | '}') => return Ok(()),
                Tok::Punct('(' | '[' | '{') => self.skip_balanced()?,
                Tok::Eof => return Err(self.syntax(&t.clone(), "unexpected end of file")),
                _ => self.pos += 1,
            }
        }
    }

    fn doc(&self) -> String {
        self.peek(0).doc.clone().unwrap_or_default()
    }

    fn location(t: &Token) -> Location {
        Location { line: t.line, column: t.column }
    }

    fn asg(&mut self) -> &mut Asg {
        self.sess.asg
    }

    // ---- scopes -----------------------------------------------------------

    fn namespace_body(&mut self, scope: &NodeId, braced: bool) -> Result<(), ParseError> {
        loop {
            if braced && self.peek(0).is_punct('}') {
                return Ok(());
            }
            if self.at_end() {
                if braced {
                    return Err(self.syntax(&self.peek(0).clone(), "expected `}`"));
                }
                return Ok(());
            }
            self.declaration(scope)?;
        }
    }

    fn declaration(&mut self, scope: &NodeId) -> Result<(), ParseError> {
        let t = self.peek(0).clone();
        match &t.tok {
            Tok::Directive(d) => return self.directive(scope, d, &t),
            Tok::Punct(';') => {
                self.pos += 1;
                return Ok(());
            }
            Tok::Ident(w) => match w.as_str() {
                "namespace" => return self.namespace(scope),
                "inline" if self.peek(1).is_ident("namespace") => return Err(self.unsupported(&t, "inline namespace")),
                "enum" => return self.enumeration(scope, Access::Public),
                "class" | "struct" => return self.class(scope, Access::Public),
                "union" => return Err(self.unsupported(&t, "union")),
                "template" => return self.template(scope),
                "typedef" => return self.typedef(scope, Access::Public),
                "using" => return self.using(scope, Access::Public),
                "extern" if matches!(self.peek(1).tok, Tok::Str(_)) => return Err(self.unsupported(&t, "linkage specification")),
                _ => {}
            },
            _ => {}
        }
        self.simple_declaration(scope, scope, Access::Public)
    }

    fn directive(&mut self, scope: &NodeId, d: &str, t: &Token) -> Result<(), ParseError> {
        self.pos += 1;
        let word = d.split_whitespace().next().unwrap_or("");
        match word {
            "include" => {
                if !scope.is_root() {
                    return Err(self.unsupported(t, "#include inside a scope"));
                }
                self.include(d["include".len()..].trim(), t)
            }
            "pragma" if d.split_whitespace().nth(1) == Some("once") => Ok(()),
            "define" | "undef" => Err(self.unsupported(t, "macro definition")),
            "if" | "ifdef" | "ifndef" | "elif" | "else" | "endif" => Err(self.unsupported(t, "conditional compilation")),
            _ => Err(self.unsupported(t, format!("#{word} directive"))),
        }
    }

    fn include(&mut self, spec: &str, t: &Token) -> Result<(), ParseError> {
        let (name, angled) = if let Some(n) = spec.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
            (n, false)
        } else if let Some(n) = spec.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
            (n, true)
        } else {
            return Err(self.syntax(t, format!("malformed include `{spec}`")));
        };
        let mut candidates: Vec<(PathBuf, String)> = Vec::new();
        if !angled {
            let dir = Path::new(&self.path).parent().map(Path::to_path_buf).unwrap_or_default();
            let joined = normalize(&dir.join(name));
            candidates.push((joined.clone(), joined.display().to_string()));
        }
        for dir in &self.sess.include_dirs {
            candidates.push((dir.join(name), name.to_string()));
        }
        let Some((path, spelling)) = candidates.into_iter().find(|(p, _)| p.is_file()) else {
            return Err(ParseError::MissingHeader(SourceLoc { path: name.to_string(), ..self.loc(t) }));
        };
        let id = header_id(&path)?;
        if !self.asg().contains(id.as_str()) {
            let guarded = std::fs::read_to_string(&path)
                .ok()
                .and_then(|s| lexer::tokenize(&s).ok())
                .is_some_and(|toks| guard_tokens(&toks).is_some());
            let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            self.asg().insert(Node::new(
                id.clone(),
                file,
                None,
                NodeData::Header(HeaderInfo {
                    spelling,
                    angled,
                    self_contained: guarded,
                    dependency: Dependency::External,
                    language: Language::Cxx,
                }),
            ));
        }
        self.sess.parse_header(&id, &path)
    }

    fn namespace(&mut self, scope: &NodeId) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        if self.peek(0).is_punct('{') {
            return Err(self.unsupported(&kw, "anonymous namespace"));
        }
        let (name, tok) = self.ident()?;
        if self.peek(0).is_punct('=') {
            return Err(self.unsupported(&kw, "namespace alias"));
        }
        if self.peek(0).tok == Tok::Scope {
            return Err(self.unsupported(&kw, "nested namespace definition"));
        }
        let id = NodeId::new(naming::child_path(&self.sess.asg.scope_path(scope), &name));
        if let Some(existing) = self.sess.asg.get(id.as_str()) {
            if existing.kind() != NodeKind::Namespace {
                return Err(self.syntax(&tok, format!("`{name}` redeclared as a namespace")));
            }
        }
        let node = self.new_node(id.clone(), &name, scope, &kw, doc, Access::Public, NodeData::Namespace);
        self.upsert(node, &tok)?;
        self.expect_punct('{')?;
        self.namespace_body(&id, true)?;
        self.expect_punct('}')?;
        Ok(())
    }

    fn new_node(&self, id: NodeId, name: &str, scope: &NodeId, at: &Token, doc: String, access: Access, data: NodeData) -> Node {
        let mut node = Node::new(id, name, Some(scope.clone()), data);
        node.header = Some(self.header.clone());
        node.location = Some(Self::location(at));
        node.doc = doc;
        node.access = access;
        node
    }

    /// Sort key deciding which of several declarations of one entity
    /// provides its header and location: internal headers first, then
    /// header id, then position. Independent of parse order.
    fn decl_key(&self, node: &Node) -> (bool, Option<NodeId>, Option<Location>) {
        let internal = node
            .header
            .as_ref()
            .and_then(|h| self.sess.asg.get(h.as_str()))
            .and_then(Node::header_info)
            .is_some_and(|h| h.dependency == Dependency::Internal);
        (!internal, node.header.clone(), node.location)
    }

    /// Inserts a declaration, collapsing it with an existing one of the same id.
    fn upsert(&mut self, mut node: Node, at: &Token) -> Result<(), ParseError> {
        let Some(old) = self.sess.asg.get(node.id.as_str()).cloned() else {
            self.asg().insert(node);
            return Ok(());
        };
        if old.kind() != node.kind() {
            return Err(self.syntax(at, format!("`{}` redeclared as a different kind of entity", node.local_name)));
        }
        if old.parent() != node.parent() {
            return Err(self.syntax(at, format!("`{}` redeclared in a different scope", node.local_name)));
        }
        if let (NodeData::Alias { underlying: a }, NodeData::Alias { underlying: b }) = (&old.data, &node.data) {
            if a != b {
                return Err(self.syntax(at, format!("conflicting declaration of `{}`", node.local_name)));
            }
        }
        let mut kept = if self.decl_key(&node) < self.decl_key(&old) {
            if node.doc.is_empty() {
                node.doc = old.doc.clone();
            }
            node
        } else {
            let mut o = old.clone();
            if o.doc.is_empty() {
                o.doc = node.doc;
            }
            o
        };
        kept.export = old.export;
        kept.already_exported = old.already_exported;
        self.asg().insert(kept);
        Ok(())
    }

    // ---- types ------------------------------------------------------------

    fn type_expr(&mut self, scope: &NodeId) -> Result<TypeExpr, ParseError> {
        let start = self.peek(0).clone();
        let mut is_const = false;
        while self.eat_ident("const") {
            is_const = true;
        }
        let t = self.peek(0).clone();
        let mut base = match &t.tok {
            Tok::Ident(w) if FUNDAMENTAL_WORDS.contains(&w.as_str()) => {
                let mut words = Vec::new();
                loop {
                    let t = self.peek(0).clone();
                    match &t.tok {
                        Tok::Ident(w) if FUNDAMENTAL_WORDS.contains(&w.as_str()) => {
                            words.push(w.clone());
                            self.pos += 1;
                        }
                        Tok::Ident(w) if w == "const" => {
                            is_const = true;
                            self.pos += 1;
                        }
                        _ => break,
                    }
                }
                let canonical = fundamental_spelling(&words).ok_or_else(|| self.syntax(&t, format!("invalid type `{}`", words.join(" "))))?;
                TypeExpr::node(fundamental_id(canonical), Vec::new())
            }
            Tok::Ident(w) if matches!(w.as_str(), "class" | "struct" | "enum" | "union") => {
                return Err(self.unsupported(&t, "elaborated type specifier"));
            }
            Tok::Ident(w) if w == "typename" => return Err(self.unsupported(&t, "dependent type name")),
            Tok::Ident(w) if matches!(w.as_str(), "auto" | "decltype") => return Err(self.unsupported(&t, format!("`{w}` type"))),
            Tok::Ident(w) if w == "volatile" => return Err(self.unsupported(&t, "volatile qualifier")),
            Tok::Ident(_) | Tok::Scope => self.named_type(scope)?,
            _ => return Err(self.syntax(&start, format!("expected a type, found {}", t.describe()))),
        };
        while self.eat_ident("const") {
            is_const = true;
        }
        if is_const {
            base.qualifiers.push(Qualifier::Const);
        }
        self.ptr_operators(&mut base.qualifiers)?;
        Ok(base)
    }

    fn ptr_operators(&mut self, qualifiers: &mut Vec<Qualifier>) -> Result<(), ParseError> {
        loop {
            let t = self.peek(0).clone();
            if t.is_punct('*') {
                if qualifiers.last() == Some(&Qualifier::LvalueRef) {
                    return Err(self.syntax(&t, "pointer to reference"));
                }
                self.pos += 1;
                qualifiers.push(Qualifier::Pointer);
            } else if t.is_punct('&') {
                let n = self.peek(1);
                if n.is_punct('&') && n.line == t.line && n.column == t.column + 1 {
                    return Err(self.unsupported(&t, "rvalue reference"));
                }
                if qualifiers.last() == Some(&Qualifier::LvalueRef) {
                    return Err(self.syntax(&t, "reference to reference"));
                }
                self.pos += 1;
                qualifiers.push(Qualifier::LvalueRef);
            } else if t.is_ident("const") {
                self.pos += 1;
                if qualifiers.last() != Some(&Qualifier::LvalueRef) {
                    qualifiers.push(Qualifier::Const);
                }
            } else if t.is_ident("volatile") {
                return Err(self.unsupported(&t, "volatile qualifier"));
            } else {
                return Ok(());
            }
        }
    }

    fn template_args(&mut self, scope: &NodeId) -> Result<Vec<TypeExpr>, ParseError> {
        self.expect_punct('<')?;
        let mut args = Vec::new();
        if self.eat_punct('>') {
            return Ok(args);
        }
        loop {
            let t = self.peek(0).clone();
            if matches!(t.tok, Tok::Number(_) | Tok::Char(_) | Tok::Str(_)) || t.is_ident("true") || t.is_ident("false") {
                return Err(self.unsupported(&t, "non-type template argument"));
            }
            args.push(self.type_expr(scope)?);
            let t = self.next();
            if t.is_punct('>') {
                return Ok(args);
            }
            if t.tok == Tok::Ellipsis {
                return Err(self.unsupported(&t, "pack expansion"));
            }
            if !t.is_punct(',') {
                return Err(self.syntax(&t, format!("expected `,` or `>` in template argument list, found {}", t.describe())));
            }
        }
    }

    fn named_type(&mut self, scope: &NodeId) -> Result<TypeExpr, ParseError> {
        let global = self.peek(0).tok == Tok::Scope;
        if global {
            self.pos += 1;
        }
        let mut parts = Vec::new();
        loop {
            let (name, tok) = self.ident()?;
            let args = if self.peek(0).is_punct('<') { Some(self.template_args(scope)?) } else { None };
            parts.push(NamePart { name, args, tok });
            if self.peek(0).tok == Tok::Scope && matches!(self.peek(1).tok, Tok::Ident(_)) {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.resolve(scope, global, parts)
    }

    /// Looks a type name up: template parameters and member aliases of the
    /// enclosing template first, then the scope chain outwards.
    fn resolve(&mut self, scope: &NodeId, global: bool, parts: Vec<NamePart>) -> Result<TypeExpr, ParseError> {
        let mut iter = parts.into_iter().peekable();
        let first = iter.next().expect("at least one name part");
        let more = iter.peek().is_some();
        if !global {
            if let Some(ctx) = &self.tmpl {
                let local = if let Some(i) = ctx.params.iter().position(|p| *p == first.name) {
                    Some(TypeBase::Param(i))
                } else if ctx.aliases.contains(&first.name) {
                    Some(TypeBase::MemberAlias(first.name.clone()))
                } else if ctx.name == first.name {
                    Some(match &first.args {
                        None => TypeBase::SelfType,
                        Some(args) => TypeBase::Specialize { template: ctx.id.clone(), args: args.clone() },
                    })
                } else {
                    None
                };
                if let Some(base) = local {
                    if more {
                        return Err(self.unsupported(&first.tok, "dependent name"));
                    }
                    if matches!(base, TypeBase::Param(_) | TypeBase::MemberAlias(_)) && first.args.is_some() {
                        return Err(self.unsupported(&first.tok, "template template parameter"));
                    }
                    if let TypeBase::Specialize { template, args } = &base {
                        self.check_arity(template, args.len(), &first.tok)?;
                    }
                    return Ok(TypeExpr { base, qualifiers: Vec::new() });
                }
            }
        }
        let found = if global {
            self.find_child(&NodeId::root(), &first.name)
        } else {
            let mut chain = vec![scope.clone()];
            chain.extend(self.sess.asg.ancestors(scope.as_str()).into_iter().map(|n| n.id.clone()));
            chain.iter().find_map(|s| self.find_child(s, &first.name))
        };
        let Some(mut current) = found else {
            return Err(self.syntax(&first.tok, format!("unknown type name `{}`", first.name)));
        };
        let mut last_tok = first.tok.clone();
        let mut expr = self.apply_args(&current, first)?;
        for part in iter {
            last_tok = part.tok.clone();
            let container = match &expr.base {
                TypeBase::Node(id) => self.member_scope(id, &part.tok)?,
                TypeBase::Specialize { .. } if expr.is_dependent() => return Err(self.unsupported(&part.tok, "dependent name")),
                TypeBase::Specialize { .. } => {
                    let qt = instantiate::eval(self.sess.asg, &expr, &Env::default()).map_err(|e| e.at(&self.loc(&part.tok)))?;
                    self.member_scope(&qt.target, &part.tok)?
                }
                _ => return Err(self.unsupported(&part.tok, "dependent name")),
            };
            current = self
                .find_child(&container, &part.name)
                .ok_or_else(|| self.syntax(&part.tok, format!("no type named `{}` in `{}`", part.name, container)))?;
            expr = self.apply_args(&current, part)?;
        }
        if let TypeBase::Node(id) = &expr.base {
            if self.sess.asg.get(id.as_str()).map(Node::kind) == Some(NodeKind::Namespace) {
                return Err(self.syntax(&last_tok, format!("namespace `{id}` used as a type")));
            }
        }
        Ok(expr)
    }

    fn apply_args(&mut self, id: &NodeId, part: NamePart) -> Result<TypeExpr, ParseError> {
        let kind = self.sess.asg.get(id.as_str()).map(Node::kind);
        match (kind, part.args) {
            (Some(NodeKind::ClassTemplate), Some(args)) => {
                self.check_arity(id, args.len(), &part.tok)?;
                Ok(TypeExpr { base: TypeBase::Specialize { template: id.clone(), args }, qualifiers: Vec::new() })
            }
            (Some(NodeKind::ClassTemplate), None) => {
                Err(self.syntax(&part.tok, format!("use of class template `{}` requires template arguments", part.name)))
            }
            (_, Some(_)) => Err(ParseError::UnknownTemplate { loc: Some(self.loc(&part.tok)), name: part.name }),
            (_, None) => Ok(TypeExpr::node(id.clone(), Vec::new())),
        }
    }

    fn check_arity(&self, template: &NodeId, given: usize, at: &Token) -> Result<(), ParseError> {
        let Some(NodeData::ClassTemplate(info)) = self.sess.asg.get(template.as_str()).map(|n| &n.data) else {
            return Err(ParseError::UnknownTemplate { loc: Some(self.loc(at)), name: template.to_string() });
        };
        let required = info.params.iter().take_while(|p| p.default.is_none()).count();
        if given > info.params.len() || given < required {
            return Err(ParseError::TemplateArityMismatch {
                loc: Some(self.loc(at)),
                template: template.to_string(),
                expected: info.params.len(),
                found: given,
            });
        }
        Ok(())
    }

    /// Scope in which `A::x` looks `x` up: namespaces and classes directly,
    /// aliases through their underlying type, specializations after
    /// instantiating them.
    fn member_scope(&mut self, id: &NodeId, at: &Token) -> Result<NodeId, ParseError> {
        let mut current = id.clone();
        for _ in 0..64 {
            let node = self.sess.asg.get(current.as_str()).ok_or_else(|| self.syntax(at, format!("unknown scope `{current}`")))?;
            match &node.data {
                NodeData::Namespace | NodeData::Class(_) | NodeData::Enumeration { .. } => return Ok(current),
                NodeData::Alias { underlying } => current = underlying.target.clone(),
                NodeData::Specialization { class, .. } => {
                    if !class.is_complete {
                        instantiate::instantiate(self.sess.asg, &current).map_err(|e| e.at(&self.loc(at)))?;
                    }
                    return Ok(current);
                }
                _ => return Err(self.syntax(at, format!("`{current}` is not a scope"))),
            }
        }
        Err(self.syntax(at, "alias cycle"))
    }

    fn find_child(&self, scope: &NodeId, name: &str) -> Option<NodeId> {
        self.sess
            .asg
            .children(scope.as_str())
            .filter(|c| c.local_name == name)
            .find(|c| {
                matches!(
                    c.kind(),
                    NodeKind::Namespace | NodeKind::Class | NodeKind::Enumeration | NodeKind::Alias | NodeKind::ClassTemplate
                )
            })
            .map(|c| c.id.clone())
    }

    /// Concrete type outside templates.
    fn concrete(&mut self, expr: &TypeExpr, at: &Token) -> Result<crate::asg::QualifiedType, ParseError> {
        instantiate::eval(self.sess.asg, expr, &Env::default()).map_err(|e| e.at(&self.loc(at)))
    }

    // ---- declarations -------------------------------------------------------

    fn enumeration(&mut self, scope: &NodeId, access: Access) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        if self.tmpl.is_some() {
            return Err(self.unsupported(&kw, "enumeration inside a class template"));
        }
        let scoped = self.eat_ident("class") || self.eat_ident("struct");
        if self.peek(0).is_punct('{') || self.peek(0).is_punct(':') {
            return Err(self.unsupported(&kw, "anonymous enumeration"));
        }
        let (name, tok) = self.ident()?;
        if self.eat_punct(':') {
            self.type_expr(scope)?;
        }
        let id = naming::enum_id(&self.sess.asg.scope_path(scope), &name);
        let node = self.new_node(id.clone(), &name, scope, &kw, doc, access, NodeData::Enumeration { scoped });
        self.upsert(node, &tok)?;
        if self.eat_punct(';') {
            return Ok(());
        }
        if !self.peek(0).is_punct('{') {
            let t = self.peek(0).clone();
            return Err(self.unsupported(&t, "elaborated type specifier"));
        }
        self.pos += 1;
        let enum_scope = self.sess.asg.scope_path(&id);
        while !self.peek(0).is_punct('}') {
            let doc = self.doc();
            let (ename, etok) = self.ident()?;
            let value = if self.eat_punct('=') {
                let start = self.pos;
                self.skip_expression()?;
                Some(self.tokens[start..self.pos].iter().map(token_text).collect::<Vec<_>>().join(" "))
            } else {
                None
            };
            let eid = NodeId::new(naming::child_path(&enum_scope, &ename));
            let node = self.new_node(eid, &ename, &id, &etok, doc, Access::Public, NodeData::Enumerator { value });
            self.upsert(node, &etok)?;
            if !self.eat_punct(',') {
                break;
            }
        }
        self.expect_punct('}')?;
        self.expect_punct(';')?;
        Ok(())
    }

    fn bases(&mut self, scope: &NodeId, is_struct: bool) -> Result<Vec<(TypeExpr, Access, bool, Token)>, ParseError> {
        let mut out = Vec::new();
        if !self.eat_punct(':') {
            return Ok(out);
        }
        loop {
            let mut access = if is_struct { Access::Public } else { Access::Private };
            let mut is_virtual = false;
            loop {
                if self.eat_ident("virtual") {
                    is_virtual = true;
                } else if self.eat_ident("public") {
                    access = Access::Public;
                } else if self.eat_ident("protected") {
                    access = Access::Protected;
                } else if self.eat_ident("private") {
                    access = Access::Private;
                } else {
                    break;
                }
            }
            let tok = self.peek(0).clone();
            let ty = self.type_expr(scope)?;
            if !ty.qualifiers.is_empty() {
                return Err(self.syntax(&tok, "base class must be a class type"));
            }
            out.push((ty, access, is_virtual, tok));
            if !self.eat_punct(',') {
                return Ok(out);
            }
        }
    }

    fn class(&mut self, scope: &NodeId, access: Access) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        let is_struct = kw.is_ident("struct");
        if self.tmpl.is_some() {
            return Err(self.unsupported(&kw, "nested class inside a class template"));
        }
        if self.peek(0).is_punct('{') {
            return Err(self.unsupported(&kw, "anonymous class"));
        }
        let (name, tok) = self.ident()?;
        if self.peek(0).is_punct('<') {
            return Err(self.unsupported(&kw, "explicit or partial template specialization"));
        }
        let id = naming::class_id(&self.sess.asg.scope_path(scope), &name);
        let existing = self.sess.asg.get(id.as_str()).cloned();
        if let Some(e) = &existing {
            if e.kind() != NodeKind::Class {
                return Err(self.syntax(&tok, format!("`{name}` redeclared as a different kind of entity")));
            }
        }
        if self.eat_punct(';') {
            let node = self.new_node(id, &name, scope, &kw, doc, access, NodeData::Class(ClassInfo::declared(is_struct)));
            if existing.as_ref().is_some_and(Node::is_complete) {
                let mut e = existing.expect("checked");
                if e.doc.is_empty() {
                    e.doc = node.doc;
                }
                self.asg().insert(e);
                return Ok(());
            }
            return self.upsert(node, &tok);
        }
        self.eat_ident("final");
        if !self.peek(0).is_punct(':') && !self.peek(0).is_punct('{') {
            return Err(self.unsupported(&kw, "elaborated type specifier"));
        }
        if let Some(e) = existing.as_ref().filter(|e| e.is_complete()) {
            if self.same_declaration(e, &kw) {
                return self.skip_definition(&kw);
            }
            return Err(self.syntax(&tok, format!("redefinition of `{name}`")));
        }
        let mut info = ClassInfo::declared(is_struct);
        for (ty, base_access, is_virtual, btok) in self.bases(scope, is_struct)? {
            let qt = self.concrete(&ty, &btok)?;
            let target = self.class_target(&qt.target, &btok)?;
            info.bases.push(Base { target, access: base_access, is_virtual });
        }
        let mut node = self.new_node(id.clone(), &name, scope, &kw, doc, access, NodeData::Class(info));
        if let Some(e) = &existing {
            if node.doc.is_empty() {
                node.doc = e.doc.clone();
            }
            node.export = e.export;
            node.already_exported = e.already_exported.clone();
        }
        self.asg().insert(node);
        self.class_body(&id, &id, &name, is_struct)?;
        if let Some(info) = self.asg().get_mut(id.as_str()).and_then(Node::class_info_mut) {
            info.is_complete = true;
        }
        self.end_of_class(&kw)
    }

    /// Whether `node` was created from this very declaration by an earlier
    /// parse of the same header.
    fn same_declaration(&self, node: &Node, at: &Token) -> bool {
        node.header.as_ref() == Some(&self.header) && node.location == Some(Self::location(at))
    }

    /// Skips a definition already present in the graph.
    fn skip_definition(&mut self, kw: &Token) -> Result<(), ParseError> {
        while !self.peek(0).is_punct('{') {
            if self.at_end() {
                return Err(self.syntax(kw, "expected class body"));
            }
            self.pos += 1;
        }
        self.skip_balanced()?;
        self.end_of_class(kw)
    }

    fn end_of_class(&mut self, kw: &Token) -> Result<(), ParseError> {
        if !self.peek(0).is_punct(';') {
            let t = self.peek(0).clone();
            if matches!(t.tok, Tok::Ident(_)) || t.is_punct('*') || t.is_punct('&') {
                return Err(self.unsupported(kw, "declarator after class definition"));
            }
        }
        self.expect_punct(';')?;
        Ok(())
    }

    /// Follows aliases to the class-like node a base specifier names.
    fn class_target(&self, id: &NodeId, at: &Token) -> Result<NodeId, ParseError> {
        let mut current = id.clone();
        for _ in 0..64 {
            match self.sess.asg.get(current.as_str()).map(|n| &n.data) {
                Some(NodeData::Alias { underlying }) if underlying.qualifiers.is_empty() => current = underlying.target.clone(),
                Some(NodeData::Class(_) | NodeData::Specialization { .. }) => return Ok(current),
                _ => return Err(self.syntax(at, format!("`{id}` is not a class"))),
            }
        }
        Err(self.syntax(at, "alias cycle"))
    }

    /// Parses `{ members }`. `owner` is the class node (or the template
    /// node while recording patterns), `lookup` the scope for type names.
    fn class_body(&mut self, owner: &NodeId, lookup: &NodeId, class_name: &str, is_struct: bool) -> Result<(), ParseError> {
        self.expect_punct('{')?;
        let mut access = if is_struct { Access::Public } else { Access::Private };
        let mut env = Env { self_id: Some(owner.clone()), ..Env::default() };
        loop {
            let t = self.peek(0).clone();
            if t.is_punct('}') {
                self.pos += 1;
                return Ok(());
            }
            if t.tok == Tok::Eof {
                return Err(self.syntax(&t, "expected `}` at end of class"));
            }
            let spec = ["public", "protected", "private"].iter().position(|a| t.is_ident(a));
            if let Some(i) = spec {
                if self.peek(1).is_punct(':') {
                    access = [Access::Public, Access::Protected, Access::Private][i];
                    self.pos += 2;
                    continue;
                }
            }
            let members = self.member_declaration(owner, lookup, class_name, access)?;
            for m in members {
                if let Some(ctx) = &mut self.tmpl {
                    if let MemberPatternKind::Alias { .. } = m.kind {
                        ctx.aliases.push(m.name.clone());
                    }
                    ctx.members.push(m);
                } else {
                    instantiate::materialize_member(self.sess.asg, owner, &self.header, &m, &mut env)?;
                }
            }
        }
    }

    fn member_declaration(&mut self, owner: &NodeId, lookup: &NodeId, class_name: &str, access: Access) -> Result<Vec<MemberPattern>, ParseError> {
        let t = self.peek(0).clone();
        match &t.tok {
            Tok::Directive(_) => return Err(self.unsupported(&t, "preprocessor directive inside a class")),
            Tok::Punct(';') => {
                self.pos += 1;
                return Ok(Vec::new());
            }
            Tok::Ident(w) => match w.as_str() {
                "enum" => {
                    self.enumeration(owner, access)?;
                    return Ok(Vec::new());
                }
                "class" | "struct" => {
                    self.class(owner, access)?;
                    return Ok(Vec::new());
                }
                "union" => return Err(self.unsupported(&t, "union")),
                "template" => return Err(self.unsupported(&t, "member template")),
                "friend" => return Err(self.unsupported(&t, "friend declaration")),
                "static_assert" => return Err(self.unsupported(&t, "static_assert")),
                "typedef" | "using" if self.tmpl.is_some() => return self.alias_pattern(lookup, access).map(|m| vec![m]),
                "typedef" => {
                    self.typedef(owner, access)?;
                    return Ok(Vec::new());
                }
                "using" => {
                    self.using(owner, access)?;
                    return Ok(Vec::new());
                }
                _ => {}
            },
            _ => {}
        }
        let doc = self.doc();
        // constructors and destructors
        let mut is_virtual = false;
        let mut k = 0;
        loop {
            let t = self.peek(k);
            if t.is_ident("virtual") {
                is_virtual = true;
            } else if !(t.is_ident("explicit") || t.is_ident("inline") || t.is_ident("constexpr")) {
                break;
            }
            k += 1;
        }
        if self.peek(k).is_punct('~') {
            self.pos += k + 1;
            let (name, tok) = self.ident()?;
            if name != class_name {
                return Err(self.syntax(&tok, format!("destructor name `~{name}` does not match class `{class_name}`")));
            }
            self.expect_punct('(')?;
            self.eat_ident("void");
            self.expect_punct(')')?;
            self.function_trailer(true, false)?;
            return Ok(vec![MemberPattern {
                name: format!("~{name}"),
                access,
                doc,
                location: Self::location(&t),
                kind: MemberPatternKind::Destructor { is_virtual },
            }]);
        }
        if self.peek(k).is_ident(class_name) && self.peek(k + 1).is_punct('(') {
            self.pos += k + 1;
            let params = self.parameters(lookup)?;
            let trailer = self.function_trailer(true, true)?;
            return Ok(vec![MemberPattern {
                name: class_name.to_string(),
                access,
                doc,
                location: Self::location(&t),
                kind: MemberPatternKind::Constructor { params, deleted: trailer.deleted },
            }]);
        }
        if self.peek(k).is_ident("operator") {
            return Err(self.unsupported(&t, "conversion operator"));
        }
        let (specs, declarators) = self.declarators(lookup, true)?;
        let mut out = Vec::new();
        for d in declarators {
            match d {
                Declarator::Object { name, ty, .. } => out.push(MemberPattern {
                    name,
                    access,
                    doc: doc.clone(),
                    location: Self::location(&t),
                    kind: MemberPatternKind::Field { ty, is_static: specs.is_static },
                }),
                Declarator::Function { name, returns, params, trailer, .. } => {
                    if trailer.deleted {
                        continue;
                    }
                    out.push(MemberPattern {
                        name,
                        access,
                        doc: doc.clone(),
                        location: Self::location(&t),
                        kind: MemberPatternKind::Method {
                            returns,
                            params,
                            is_static: specs.is_static,
                            is_const: trailer.is_const,
                            is_virtual: specs.is_virtual || trailer.is_pure,
                            is_pure: trailer.is_pure,
                        },
                    })
                }
            }
        }
        Ok(out)
    }

    /// Qualifiers, exception specifications, pure/default/delete markers and
    /// an optional body after a parameter list.
    fn function_trailer(&mut self, member: bool, ctor: bool) -> Result<Trailer, ParseError> {
        let mut trailer = Trailer::default();
        loop {
            let t = self.peek(0).clone();
            if t.is_ident("const") {
                if !member {
                    return Err(self.syntax(&t, "const qualifier on a non-member function"));
                }
                trailer.is_const = true;
                self.pos += 1;
            } else if t.is_ident("volatile") {
                return Err(self.unsupported(&t, "volatile qualifier"));
            } else if t.is_punct('&') {
                return Err(self.unsupported(&t, "ref-qualified member function"));
            } else if t.is_ident("noexcept") || t.is_ident("throw") {
                self.pos += 1;
                if self.peek(0).is_punct('(') {
                    self.skip_balanced()?;
                }
            } else if t.is_ident("override") || t.is_ident("final") {
                self.pos += 1;
            } else if t.is_punct('-') && self.peek(1).is_punct('>') {
                return Err(self.unsupported(&t, "trailing return type"));
            } else {
                break;
            }
        }
        let t = self.peek(0).clone();
        if t.is_punct('=') {
            self.pos += 1;
            let v = self.next();
            match &v.tok {
                Tok::Number(n) if n == "0" && member => trailer.is_pure = true,
                Tok::Ident(w) if w == "default" => {}
                Tok::Ident(w) if w == "delete" => trailer.deleted = true,
                _ => return Err(self.syntax(&v, format!("unexpected {} after `=`", v.describe()))),
            }
            self.expect_punct(';')?;
            return Ok(trailer);
        }
        if ctor && t.is_punct(':') {
            self.pos += 1;
            loop {
                while !(self.peek(0).is_punct('(') || self.peek(0).is_punct('{')) {
                    if self.peek(0).tok == Tok::Eof {
                        return Err(self.syntax(&t, "unterminated member initializer list"));
                    }
                    self.pos += 1;
                }
                self.skip_balanced()?;
                if !self.eat_punct(',') {
                    break;
                }
            }
        }
        if self.peek(0).is_punct('{') {
            self.skip_balanced()?;
            self.eat_punct(';');
            return Ok(trailer);
        }
        self.expect_punct(';')?;
        Ok(trailer)
    }

    fn parameters(&mut self, scope: &NodeId) -> Result<Vec<ParamPattern>, ParseError> {
        self.expect_punct('(')?;
        let mut params = Vec::new();
        if self.peek(0).is_ident("void") && self.peek(1).is_punct(')') {
            self.pos += 2;
            return Ok(params);
        }
        if self.eat_punct(')') {
            return Ok(params);
        }
        loop {
            let t = self.peek(0).clone();
            if t.tok == Tok::Ellipsis {
                return Err(self.unsupported(&t, "variadic function"));
            }
            let mut ty = self.type_expr(scope)?;
            let mut name = String::new();
            if self.peek(0).is_punct('(') {
                return Err(self.unsupported(&t, "function pointer parameter"));
            }
            if let Tok::Ident(n) = &self.peek(0).tok {
                name = n.clone();
                self.pos += 1;
            }
            self.array_suffix(&mut ty.qualifiers)?;
            let has_default = self.eat_punct('=');
            if has_default {
                self.skip_expression()?;
            }
            params.push(ParamPattern { name, ty, has_default });
            let t = self.next();
            if t.is_punct(')') {
                return Ok(params);
            }
            if !t.is_punct(',') {
                return Err(self.syntax(&t, format!("expected `,` or `)` in parameter list, found {}", t.describe())));
            }
        }
    }

    fn array_suffix(&mut self, qualifiers: &mut Vec<Qualifier>) -> Result<(), ParseError> {
        let mut dims = Vec::new();
        while self.peek(0).is_punct('[') {
            self.pos += 1;
            let mut extent = None;
            let mut tokens = 0;
            while !self.peek(0).is_punct(']') {
                let t = self.next();
                if t.tok == Tok::Eof {
                    return Err(self.syntax(&t, "unterminated array declarator"));
                }
                if let Tok::Number(n) = &t.tok {
                    extent = n.trim_end_matches(|c: char| c.is_ascii_alphabetic()).parse::<u64>().ok();
                }
                tokens += 1;
            }
            self.pos += 1;
            dims.push(if tokens == 1 { extent } else { None });
        }
        // `int a[2][3]` is an array of 2 arrays of 3: innermost extent first
        for d in dims.into_iter().rev() {
            qualifiers.push(Qualifier::Array(d));
        }
        Ok(())
    }

    fn specifiers(&mut self) -> Result<Specs, ParseError> {
        let mut specs = Specs::default();
        loop {
            let t = self.peek(0).clone();
            match &t.tok {
                Tok::Ident(w) => match w.as_str() {
                    "static" => specs.is_static = true,
                    "virtual" => specs.is_virtual = true,
                    "extern" => specs.is_extern = true,
                    "inline" | "constexpr" | "explicit" | "mutable" | "register" => {}
                    "friend" => return Err(self.unsupported(&t, "friend declaration")),
                    "thread_local" => return Err(self.unsupported(&t, "thread_local storage")),
                    _ => return Ok(specs),
                },
                Tok::Punct('[') if self.peek(1).is_punct('[') => return Err(self.unsupported(&t, "attribute")),
                _ => return Ok(specs),
            }
            self.pos += 1;
        }
    }

    fn declarator_name(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.peek(0).clone();
        if t.is_ident("operator") {
            self.pos += 1;
            return Ok((self.operator_name(&t)?, t));
        }
        let (name, tok) = self.ident()?;
        if self.peek(0).tok == Tok::Scope {
            return Err(self.unsupported(&tok, "qualified declarator"));
        }
        if self.peek(0).is_punct('<') {
            return Err(self.unsupported(&tok, "explicit template specialization"));
        }
        Ok((name, tok))
    }

    fn operator_name(&mut self, kw: &Token) -> Result<String, ParseError> {
        let t = self.peek(0).clone();
        if t.is_punct('(') && self.peek(1).is_punct(')') {
            self.pos += 2;
            return Ok("operator()".into());
        }
        if t.is_punct('[') && self.peek(1).is_punct(']') {
            self.pos += 2;
            return Ok("operator[]".into());
        }
        match &t.tok {
            Tok::Ident(w) if w == "new" || w == "delete" => return Err(self.unsupported(kw, format!("operator {w}"))),
            Tok::Ident(_) => return Err(self.unsupported(kw, "conversion operator")),
            Tok::Str(_) => return Err(self.unsupported(kw, "user-defined literal")),
            _ => {}
        }
        let mut symbol = String::new();
        let (line, mut column) = (t.line, t.column);
        loop {
            let t = self.peek(0);
            match t.tok {
                Tok::Punct(c) if c != '(' && t.line == line && t.column == column => {
                    symbol.push(c);
                    column += 1;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        if symbol.is_empty() {
            return Err(self.syntax(&t, "expected an operator symbol"));
        }
        Ok(format!("operator{symbol}"))
    }

    /// `specifiers type declarator [, declarator]... ;` for variables, fields
    /// and functions.
    fn declarators(&mut self, scope: &NodeId, member: bool) -> Result<(Specs, Vec<Declarator>), ParseError> {
        let specs = self.specifiers()?;
        let base = self.type_expr(scope)?;
        let mut out = Vec::new();
        loop {
            let mut ty = base.clone();
            if !out.is_empty() {
                // `int a, *b;` applies pointer operators per declarator
                self.ptr_operators(&mut ty.qualifiers)?;
            }
            let t = self.peek(0).clone();
            if t.is_punct('(') && self.peek(1).is_punct('*') {
                // `T (*p)[N]`; function pointers are outside the subset
                self.pos += 2;
                let (name, tok) = self.ident()?;
                self.expect_punct(')')?;
                if !self.peek(0).is_punct('[') {
                    return Err(self.unsupported(&t, "function pointer"));
                }
                let mut inner = Vec::new();
                self.array_suffix(&mut inner)?;
                ty.qualifiers.extend(inner);
                ty.qualifiers.push(Qualifier::Pointer);
                self.skip_initializer()?;
                out.push(Declarator::Object { name, ty, tok });
            } else {
                let (name, tok) = self.declarator_name()?;
                if self.peek(0).is_punct('(') {
                    let params = self.parameters(scope)?;
                    let trailer = self.function_trailer(member, false)?;
                    out.push(Declarator::Function { name, returns: ty, params, trailer, tok });
                    return Ok((specs, out));
                }
                if name.starts_with("operator") {
                    return Err(self.syntax(&tok, "expected `(` after operator name"));
                }
                self.array_suffix(&mut ty.qualifiers)?;
                self.skip_initializer()?;
                out.push(Declarator::Object { name, ty, tok });
            }
            let t = self.next();
            if t.is_punct(';') {
                return Ok((specs, out));
            }
            if !t.is_punct(',') {
                return Err(self.syntax(&t, format!("expected `;` or `,`, found {}", t.describe())));
            }
        }
    }

    fn skip_initializer(&mut self) -> Result<(), ParseError> {
        if self.eat_punct('=') {
            return self.skip_expression();
        }
        if self.peek(0).is_punct('{') {
            return self.skip_balanced();
        }
        Ok(())
    }

    fn simple_declaration(&mut self, scope: &NodeId, lookup: &NodeId, access: Access) -> Result<(), ParseError> {
        let doc = self.doc();
        let start = self.peek(0).clone();
        let (specs, declarators) = self.declarators(lookup, false)?;
        if specs.is_virtual {
            return Err(self.syntax(&start, "`virtual` outside a class"));
        }
        let path = self.sess.asg.scope_path(scope);
        for d in declarators {
            match d {
                Declarator::Object { name, ty, tok } => {
                    let ty = self.concrete(&ty, &tok)?;
                    let id = NodeId::new(naming::child_path(&path, &name));
                    let node = self.new_node(id, &name, scope, &start, doc.clone(), access, NodeData::Variable { ty });
                    self.upsert(node, &tok)?;
                }
                Declarator::Function { name, returns, params, trailer, tok } => {
                    if trailer.deleted {
                        continue;
                    }
                    let returns = self.concrete(&returns, &tok)?;
                    let mut concrete = Vec::new();
                    for p in params {
                        concrete.push(crate::asg::Param { name: p.name, ty: self.concrete(&p.ty, &tok)?, has_default: p.has_default });
                    }
                    let id = naming::function_id(&path, &name, &concrete, false);
                    let sig = crate::asg::Signature { returns, params: concrete };
                    let node = self.new_node(id, &name, scope, &start, doc.clone(), access, NodeData::Function(sig));
                    self.upsert(node, &tok)?;
                }
            }
        }
        let _ = specs.is_extern;
        Ok(())
    }

    fn typedef(&mut self, scope: &NodeId, access: Access) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        let t = self.peek(0).clone();
        if t.is_ident("struct") || t.is_ident("class") || t.is_ident("enum") || t.is_ident("union") {
            return Err(self.unsupported(&t, "typedef of a type definition"));
        }
        let base = self.type_expr(scope)?;
        loop {
            let mut ty = base.clone();
            self.ptr_operators(&mut ty.qualifiers)?;
            if self.peek(0).is_punct('(') {
                let t = self.peek(0).clone();
                return Err(self.unsupported(&t, "function type alias"));
            }
            let (name, tok) = self.ident()?;
            self.array_suffix(&mut ty.qualifiers)?;
            if self.peek(0).is_punct('(') {
                return Err(self.unsupported(&tok, "function type alias"));
            }
            self.add_alias(scope, &name, &ty, &kw, &tok, doc.clone(), access)?;
            let t = self.next();
            if t.is_punct(';') {
                return Ok(());
            }
            if !t.is_punct(',') {
                return Err(self.syntax(&t, format!("expected `;` after typedef, found {}", t.describe())));
            }
        }
    }

    fn using(&mut self, scope: &NodeId, access: Access) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        if self.peek(0).is_ident("namespace") {
            return Err(self.unsupported(&kw, "using directive"));
        }
        if !(matches!(self.peek(0).tok, Tok::Ident(_)) && self.peek(1).is_punct('=')) {
            return Err(self.unsupported(&kw, "using declaration"));
        }
        let (name, tok) = self.ident()?;
        self.pos += 1;
        let ty = self.type_expr(scope)?;
        self.expect_punct(';')?;
        self.add_alias(scope, &name, &ty, &kw, &tok, doc, access)
    }

    #[allow(clippy::too_many_arguments)]
    fn add_alias(&mut self, scope: &NodeId, name: &str, ty: &TypeExpr, kw: &Token, tok: &Token, doc: String, access: Access) -> Result<(), ParseError> {
        let underlying = self.concrete(ty, tok)?;
        let id = naming::alias_id(&self.sess.asg.scope_path(scope), name);
        let node = self.new_node(id, name, scope, kw, doc, access, NodeData::Alias { underlying });
        self.upsert(node, tok)
    }

    /// `typedef`/`using` inside a class template body, kept as a pattern.
    fn alias_pattern(&mut self, scope: &NodeId, access: Access) -> Result<MemberPattern, ParseError> {
        let doc = self.doc();
        let kw = self.next();
        let (name, underlying) = if kw.is_ident("typedef") {
            let ty = self.type_expr(scope)?;
            let (name, tok) = self.ident()?;
            if self.peek(0).is_punct('(') || self.peek(0).is_punct('[') {
                return Err(self.unsupported(&tok, "function or array type alias in a class template"));
            }
            (name, ty)
        } else {
            if !(matches!(self.peek(0).tok, Tok::Ident(_)) && self.peek(1).is_punct('=')) {
                return Err(self.unsupported(&kw, "using declaration"));
            }
            let (name, _) = self.ident()?;
            self.pos += 1;
            (name, self.type_expr(scope)?)
        };
        self.expect_punct(';')?;
        Ok(MemberPattern { name, access, doc, location: Self::location(&kw), kind: MemberPatternKind::Alias { underlying } })
    }

    fn template(&mut self, scope: &NodeId) -> Result<(), ParseError> {
        let doc = self.doc();
        let kw = self.next();
        self.expect_punct('<')?;
        if self.peek(0).is_punct('>') {
            return Err(self.unsupported(&kw, "explicit template specialization"));
        }
        // collect parameter names first so defaults may refer to earlier ones
        let mut names: Vec<(String, Token)> = Vec::new();
        let mut defaults: Vec<Option<TypeExpr>> = Vec::new();
        self.tmpl = Some(TemplateCtx { id: NodeId::root(), name: String::new(), params: Vec::new(), aliases: Vec::new(), members: Vec::new() });
        let result = (|| -> Result<(), ParseError> {
            loop {
                let t = self.peek(0).clone();
                if t.is_ident("template") {
                    return Err(self.unsupported(&t, "template template parameter"));
                }
                if !(t.is_ident("typename") || t.is_ident("class")) {
                    return Err(self.unsupported(&t, "non-type template parameter"));
                }
                self.pos += 1;
                if self.peek(0).tok == Tok::Ellipsis {
                    let e = self.peek(0).clone();
                    return Err(self.unsupported(&e, "variadic template"));
                }
                let (name, tok) = self.ident()?;
                let default = if self.eat_punct('=') { Some(self.type_expr(scope)?) } else { None };
                self.tmpl.as_mut().expect("template context").params.push(name.clone());
                names.push((name, tok));
                defaults.push(default);
                let t = self.next();
                if t.is_punct('>') {
                    return Ok(());
                }
                if !t.is_punct(',') {
                    return Err(self.syntax(&t, format!("expected `,` or `>` in template parameter list, found {}", t.describe())));
                }
            }
        })();
        if let Err(e) = result {
            self.tmpl = None;
            return Err(e);
        }
        let result = self.class_template(scope, doc, &kw, names, defaults);
        self.tmpl = None;
        result
    }

    fn class_template(
        &mut self,
        scope: &NodeId,
        doc: String,
        kw: &Token,
        names: Vec<(String, Token)>,
        defaults: Vec<Option<TypeExpr>>,
    ) -> Result<(), ParseError> {
        let t = self.peek(0).clone();
        if t.is_ident("using") {
            return Err(self.unsupported(kw, "alias template"));
        }
        if !(t.is_ident("class") || t.is_ident("struct")) {
            return Err(self.unsupported(kw, "function template"));
        }
        self.pos += 1;
        let is_struct = t.is_ident("struct");
        let (name, tok) = self.ident()?;
        if self.peek(0).is_punct('<') {
            return Err(self.unsupported(kw, "partial template specialization"));
        }
        let id = naming::class_id(&self.sess.asg.scope_path(scope), &name);
        let mut params: Vec<TemplateParam> =
            names.iter().zip(defaults).map(|((n, _), d)| TemplateParam { name: n.clone(), default: d }).collect();
        let mut definition = None;
        let mut node_doc = doc;
        let mut existing_meta = None;
        if let Some(existing) = self.sess.asg.get(id.as_str()).cloned() {
            let NodeData::ClassTemplate(info) = &existing.data else {
                return Err(self.syntax(&tok, format!("`{name}` redeclared as a different kind of entity")));
            };
            if info.params.len() != params.len() {
                return Err(self.syntax(&tok, format!("`{name}` redeclared with a different number of template parameters")));
            }
            for (p, old) in params.iter_mut().zip(&info.params) {
                if p.default.is_none() {
                    p.default = old.default.clone();
                }
            }
            definition = info.definition.clone();
            if node_doc.is_empty() {
                node_doc = existing.doc.clone();
            }
            existing_meta = Some(existing);
        }
        let template_data = |params: &Vec<TemplateParam>, definition: Option<TemplateBody>| {
            NodeData::ClassTemplate(TemplateInfo { params: params.clone(), definition })
        };
        if self.eat_punct(';') {
            let mut node = self.new_node(id.clone(), &name, scope, kw, node_doc, Access::Public, template_data(&params, definition.clone()));
            if let Some(e) = existing_meta {
                if definition.is_some() || self.decl_key(&e) <= self.decl_key(&node) {
                    node.header = e.header.clone();
                    node.location = e.location;
                }
                node.access = e.access;
                node.export = e.export;
                node.already_exported = e.already_exported;
            }
            self.asg().insert(node);
            return Ok(());
        }
        if definition.is_some() {
            if existing_meta.as_ref().is_some_and(|e| self.same_declaration(e, kw)) {
                return self.skip_definition(kw);
            }
            return Err(self.syntax(&tok, format!("redefinition of `{name}`")));
        }
        self.eat_ident("final");
        let mut node = self.new_node(id.clone(), &name, scope, kw, node_doc, Access::Public, template_data(&params, None));
        if let Some(e) = &existing_meta {
            node.access = e.access;
            node.export = e.export;
            node.already_exported = e.already_exported.clone();
        }
        self.asg().insert(node);
        if let Some(ctx) = &mut self.tmpl {
            ctx.id = id.clone();
            ctx.name = name.clone();
        }
        let mut bases = Vec::new();
        for (ty, access, is_virtual, _) in self.bases(scope, is_struct)? {
            bases.push(BasePattern { ty, access, is_virtual });
        }
        self.class_body(&id, scope, &name, is_struct)?;
        let members = self.tmpl.as_mut().map(|c| std::mem::take(&mut c.members)).unwrap_or_default();
        if let Some(node) = self.asg().get_mut(id.as_str()) {
            node.data = template_data(&params, Some(TemplateBody { is_struct, bases, members }));
        }
        self.end_of_class(kw)
    }
}

fn token_text(t: &Token) -> String {
    match &t.tok {
        Tok::Ident(s) | Tok::Number(s) => s.clone(),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Char(s) => format!("'{s}'"),
        Tok::Punct(c) => c.to_string(),
        Tok::Scope => "::".into(),
        Tok::Ellipsis => "...".into(),
        Tok::Directive(d) => format!("#{d}"),
        Tok::Eof => String::new(),
    }
}

/// Canonical spelling of a fundamental type given its keywords in any order.
fn fundamental_spelling(words: &[String]) -> Option<&'static str> {
    let count = |w: &str| words.iter().filter(|x| *x == w).count();
    let (signed, unsigned) = (count("signed"), count("unsigned"));
    let (short, long, int, char) = (count("short"), count("long"), count("int"), count("char"));
    if signed + unsigned > 1 || int > 1 || char > 1 || short > 1 || long > 2 || (short > 0 && long > 0) {
        return None;
    }
    let others: Vec<&str> = words
        .iter()
        .map(String::as_str)
        .filter(|w| !matches!(*w, "signed" | "unsigned" | "short" | "long" | "int" | "char"))
        .collect();
    if !others.is_empty() {
        if others.len() > 1 || signed + unsigned + short + int + char > 0 {
            return None;
        }
        return match (others[0], long) {
            ("double", 1) => Some("long double"),
            (_, 1..) => None,
            ("void", _) => Some("void"),
            ("bool", _) => Some("bool"),
            ("float", _) => Some("float"),
            ("double", _) => Some("double"),
            ("wchar_t", _) => Some("wchar_t"),
            ("char16_t", _) => Some("char16_t"),
            ("char32_t", _) => Some("char32_t"),
            _ => None,
        };
    }
    if char == 1 {
        if short + long + int > 0 {
            return None;
        }
        return Some(match (signed, unsigned) {
            (1, _) => "signed char",
            (_, 1) => "unsigned char",
            _ => "char",
        });
    }
    Some(match (unsigned, short, long) {
        (0, 1, _) => "short int",
        (1, 1, _) => "unsigned short int",
        (0, 0, 1) => "long int",
        (1, 0, 1) => "unsigned long int",
        (0, 0, 2) => "long long int",
        (1, 0, 2) => "unsigned long long int",
        (1, 0, 0) => "unsigned int",
        _ => "int",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn fundamental_spellings() {
        assert_eq!(fundamental_spelling(&w("unsigned long")), Some("unsigned long int"));
        assert_eq!(fundamental_spelling(&w("long unsigned int")), Some("unsigned long int"));
        assert_eq!(fundamental_spelling(&w("signed")), Some("int"));
        assert_eq!(fundamental_spelling(&w("long long")), Some("long long int"));
        assert_eq!(fundamental_spelling(&w("unsigned char")), Some("unsigned char"));
        assert_eq!(fundamental_spelling(&w("long double")), Some("long double"));
        assert_eq!(fundamental_spelling(&w("short unsigned")), Some("unsigned short int"));
        assert_eq!(fundamental_spelling(&w("unsigned double")), None);
        assert_eq!(fundamental_spelling(&w("long short")), None);
    }

    #[test]
    fn guards() {
        let t = lexer::tokenize("#ifndef A\n#define A\nint x;\n#endif\n").unwrap();
        assert_eq!(guard_tokens(&t), Some(2..5));
        let t = lexer::tokenize("#pragma once\nint x;\n").unwrap();
        assert_eq!(guard_tokens(&t), Some(1..4));
        let t = lexer::tokenize("int x;\n").unwrap();
        assert_eq!(guard_tokens(&t), None);
        let t = lexer::tokenize("#ifndef A\n#define B\n#endif\n").unwrap();
        assert_eq!(guard_tokens(&t), None);
    }
}
