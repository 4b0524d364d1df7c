//! Tokenizer for the supported header subset. Punctuation is emitted one
//! character at a time (except `::` and `...`) so `>>` never needs splitting
//! inside template argument lists.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Char(String),
    Punct(char),
    Scope,
    Ellipsis,
    /// A preprocessor line without the leading `#`, comments stripped.
    Directive(String),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
    /// Doxygen comment ending on the line right above this token.
    pub doc: Option<String>,
}

impl Token {
    pub fn is_punct(&self, c: char) -> bool {
        self.tok == Tok::Punct(c)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(&self.tok, Tok::Ident(i) if i == s)
    }

    pub fn describe(&self) -> String {
        match &self.tok {
            Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Char(s) => format!("character '{s}'"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Scope => "`::`".into(),
            Tok::Ellipsis => "`...`".into(),
            Tok::Directive(d) => format!("`#{d}`"),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug)]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

struct PendingDoc {
    text: Vec<String>,
    end_line: u32,
    line_style: bool,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut lexer = Lexer { chars: &chars, pos: 0, line: 1, col: 1, tokens: Vec::new(), pending: None, line_start: true };
    lexer.run()?;
    let (line, column) = (lexer.line, lexer.col);
    lexer.tokens.push(Token { tok: Tok::Eof, line, column, doc: None });
    Ok(lexer.tokens)
}

struct Lexer<'a> {
    chars: &'a [char],
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
    pending: Option<PendingDoc>,
    line_start: bool,
}

impl Lexer<'_> {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.line_start = true;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, message: impl Into<String>) -> LexError {
        LexError { line: self.line, column: self.col, message: message.into() }
    }

    fn push(&mut self, tok: Tok, line: u32, column: u32) {
        let doc = match self.pending.take() {
            Some(p) if line <= p.end_line + 1 && !matches!(tok, Tok::Directive(_)) => Some(p.text.join("\n")),
            _ => None,
        };
        self.tokens.push(Token { tok, line, column, doc });
        self.line_start = false;
    }

    fn run(&mut self) -> Result<(), LexError> {
        while let Some(c) = self.peek(0) {
            let (line, column) = (self.line, self.col);
            match c {
                '\n' => {
                    self.bump();
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' if self.line_start => {
                    let text = self.directive();
                    self.push(Tok::Directive(text), line, column);
                }
                '/' if self.peek(1) == Some('/') => self.line_comment(),
                '/' if self.peek(1) == Some('*') => self.block_comment()?,
                '"' => {
                    let s = self.quoted('"')?;
                    self.push(Tok::Str(s), line, column);
                }
                '\'' => {
                    let s = self.quoted('\'')?;
                    self.push(Tok::Char(s), line, column);
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek(0).filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                        s.push(c);
                        self.bump();
                    }
                    self.push(Tok::Ident(s), line, column);
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let mut s = String::new();
                    while let Some(c) = self.peek(0).filter(|c| c.is_ascii_alphanumeric() || *c == '.' || *c == '\'') {
                        s.push(c);
                        self.bump();
                    }
                    self.push(Tok::Number(s), line, column);
                }
                ':' if self.peek(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    self.push(Tok::Scope, line, column);
                }
                '.' if self.peek(1) == Some('.') && self.peek(2) == Some('.') => {
                    self.bump();
                    self.bump();
                    self.bump();
                    self.push(Tok::Ellipsis, line, column);
                }
                c if c.is_ascii_punctuation() => {
                    self.bump();
                    self.push(Tok::Punct(c), line, column);
                }
                other => return Err(self.err(format!("unexpected character `{other}`"))),
            }
        }
        Ok(())
    }

    fn directive(&mut self) -> String {
        self.bump();
        let mut text = String::new();
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                break;
            }
            if c == '\\' && self.peek(1) == Some('\n') {
                self.bump();
                self.bump();
                text.push(' ');
                continue;
            }
            if c == '/' && self.peek(1) == Some('/') {
                while self.peek(0).is_some_and(|c| c != '\n') {
                    self.bump();
                }
                break;
            }
            if c == '/' && self.peek(1) == Some('*') {
                while self.peek(0).is_some() && !(self.peek(0) == Some('*') && self.peek(1) == Some('/')) {
                    self.bump();
                }
                self.bump();
                self.bump();
                continue;
            }
            text.push(c);
            self.bump();
        }
        text.trim().to_string()
    }

    fn line_comment(&mut self) {
        let line = self.line;
        self.bump();
        self.bump();
        let doc = match (self.peek(0), self.peek(1)) {
            (Some('/'), Some('/')) => false,
            (Some('/'), Some('<')) | (Some('!'), Some('<')) => false,
            (Some('/'), _) | (Some('!'), _) => true,
            _ => false,
        };
        if doc {
            self.bump();
        }
        let mut text = String::new();
        while let Some(c) = self.peek(0).filter(|c| *c != '\n') {
            text.push(c);
            self.bump();
        }
        if !doc {
            return;
        }
        let text = text.strip_prefix(' ').unwrap_or(&text).trim_end().to_string();
        match &mut self.pending {
            Some(p) if p.line_style && p.end_line + 1 == line => {
                p.text.push(text);
                p.end_line = line;
            }
            _ => self.pending = Some(PendingDoc { text: vec![text], end_line: line, line_style: true }),
        }
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        self.bump();
        self.bump();
        let doc = matches!(self.peek(0), Some('*') | Some('!'))
            && self.peek(1) != Some('/')
            && !(self.peek(0) == Some('*') && self.peek(1) == Some('*'))
            && self.peek(1) != Some('<');
        if doc {
            self.bump();
        }
        let mut body = String::new();
        loop {
            match self.peek(0) {
                None => return Err(self.err("unterminated comment")),
                Some('*') if self.peek(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    break;
                }
                Some(c) => {
                    body.push(c);
                    self.bump();
                }
            }
        }
        if doc {
            let lines: Vec<String> = body
                .lines()
                .map(|l| {
                    let t = l.trim_start();
                    let t = t.strip_prefix('*').unwrap_or(t);
                    t.strip_prefix(' ').unwrap_or(t).trim_end().to_string()
                })
                .collect();
            let first = lines.iter().position(|l| !l.is_empty()).unwrap_or(lines.len());
            let last = lines.iter().rposition(|l| !l.is_empty()).map_or(first, |i| i + 1);
            self.pending = Some(PendingDoc { text: lines[first..last].to_vec(), end_line: self.line, line_style: false });
        }
        Ok(())
    }

    fn quoted(&mut self, quote: char) -> Result<String, LexError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err("unterminated literal")),
                Some('\\') => {
                    s.push('\\');
                    if let Some(c) = self.bump() {
                        s.push(c);
                    }
                }
                Some(c) if c == quote => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn scope_and_single_char_punctuation() {
        assert_eq!(
            toks("std::vector<std::vector<int>> x;"),
            vec![
                Tok::Ident("std".into()),
                Tok::Scope,
                Tok::Ident("vector".into()),
                Tok::Punct('<'),
                Tok::Ident("std".into()),
                Tok::Scope,
                Tok::Ident("vector".into()),
                Tok::Punct('<'),
                Tok::Ident("int".into()),
                Tok::Punct('>'),
                Tok::Punct('>'),
                Tok::Ident("x".into()),
                Tok::Punct(';'),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn directives_are_whole_lines() {
        let t = toks("#ifndef A_H // guard\n#define A_H\n#include <vector>\n#endif\n");
        assert_eq!(t[0], Tok::Directive("ifndef A_H".into()));
        assert_eq!(t[2], Tok::Directive("include <vector>".into()));
        assert_eq!(t[3], Tok::Directive("endif".into()));
    }

    #[test]
    fn doc_comment_attaches_to_next_token_without_blank_line() {
        let tokens = tokenize("/// first\n/// second\nclass A;\n\n/// lost\n\nclass B;").unwrap();
        assert_eq!(tokens[0].doc.as_deref(), Some("first\nsecond"));
        let b = tokens.iter().filter(|t| t.is_ident("class")).nth(1).unwrap();
        assert_eq!(b.doc, None);
    }

    #[test]
    fn block_doc_strips_markers() {
        let tokens = tokenize("/**\n * Brief.\n *\n * \\note Body\n */\nvoid f();").unwrap();
        assert_eq!(tokens[0].doc.as_deref(), Some("Brief.\n\n\\note Body"));
    }

    #[test]
    fn plain_comments_are_not_docs() {
        let tokens = tokenize("// plain\n/* plain */\nint x;").unwrap();
        assert_eq!(tokens[0].doc, None);
    }
}
