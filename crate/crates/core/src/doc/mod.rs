//! Doxygen comment blocks to Sphinx docstrings.

mod resolve;

pub use resolve::{AsgResolver, MapResolver, NoResolver, RefResolver, Role};

use crate::lint::{codes, Lint};

/// Converts a Doxygen comment (markers already stripped) to Sphinx markup.
/// Never fails; references the resolver does not know are left as their raw
/// name.
pub fn convert(raw: &str, resolver: &dyn RefResolver) -> String {
    convert_with_lints(raw, resolver, "").0
}

/// Like [`convert`], also returning lints (unknown tags, unresolved
/// references) labelled with `subject`.
pub fn convert_with_lints(raw: &str, resolver: &dyn RefResolver, subject: &str) -> (String, Vec<Lint>) {
    let mut cx = Context { resolver, subject, lints: Vec::new() };
    let mut blocks: Vec<String> = Vec::new();
    for paragraph in paragraphs(raw) {
        for segment in segments(&paragraph) {
            let block = cx.block(&segment);
            // Consecutive field-list entries stay in one block.
            match blocks.last_mut() {
                Some(last) if is_field(last) && is_field(&block) && segment.tag.is_some() => {
                    last.push('\n');
                    last.push_str(&block);
                }
                _ => blocks.push(block),
            }
        }
    }
    (blocks.join("\n\n"), cx.lints)
}

fn is_field(block: &str) -> bool {
    block.starts_with(":param ") || block.starts_with(":returns:")
}

/// Blank-line separated paragraphs, trailing whitespace trimmed per line.
fn paragraphs(raw: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for line in raw.lines() {
        let line = line.trim_end();
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line.to_string());
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

struct Segment {
    tag: Option<String>,
    lines: Vec<String>,
    /// The tagged line as written.
    raw: String,
}

/// Splits a paragraph at lines starting with a block tag.
fn segments(paragraph: &[String]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for line in paragraph {
        let trimmed = line.trim_start();
        match leading_tag(trimmed) {
            Some((tag, rest)) if !is_inline(tag) => {
                out.push(Segment { tag: Some(tag.to_string()), lines: vec![rest.trim_start().to_string()], raw: trimmed.to_string() })
            }
            _ => match out.last_mut() {
                Some(seg) => seg.lines.push(line.clone()),
                None => out.push(Segment { tag: None, lines: vec![line.clone()], raw: line.clone() }),
            },
        }
    }
    out
}

fn leading_tag(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('\\').or_else(|| line.strip_prefix('@'))?;
    let end = body.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(body.len());
    (end > 0).then(|| (&body[..end], &body[end..]))
}

const INLINE: &[&str] = &["ref", "p", "c", "a", "e", "b"];

fn is_inline(tag: &str) -> bool {
    INLINE.contains(&tag)
}

struct Context<'a> {
    resolver: &'a dyn RefResolver,
    subject: &'a str,
    lints: Vec<Lint>,
}

impl Context<'_> {
    fn block(&mut self, seg: &Segment) -> String {
        let lines: Vec<String> = seg.lines.iter().map(|l| self.inline(l)).collect();
        let Some(tag) = seg.tag.as_deref() else {
            return lines.join("\n");
        };
        match tag {
            "brief" | "short" => lines.join("\n").trim_start().to_string(),
            "note" => directive("note", &lines),
            "todo" => directive("todo", &lines),
            "see" | "sa" => directive("seealso", &lines),
            "param" => {
                let text = lines.join("\n");
                let text = text.trim_start();
                let text = ["[in]", "[out]", "[in,out]"].iter().fold(text, |t, d| t.strip_prefix(d).map_or(t, str::trim_start));
                let (name, desc) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
                format!(":param {name}: {}", desc.trim_start())
            }
            "return" | "returns" | "result" => format!(":returns: {}", lines.join("\n").trim_start()),
            other => {
                self.lints.push(Lint::new(codes::UNKNOWN_DOC_TAG, self.subject, format!("unsupported Doxygen tag `{other}` kept as text")));
                let mut raw = seg.lines.clone();
                raw[0] = seg.raw.clone();
                raw.iter().map(|l| self.inline(l)).collect::<Vec<_>>().join("\n")
            }
        }
    }

    /// Rewrites inline commands: references and word markup.
    fn inline(&mut self, line: &str) -> String {
        let mut out = String::new();
        let mut rest = line;
        while let Some(pos) = rest.find(['\\', '@']) {
            out.push_str(&rest[..pos]);
            let after = &rest[pos..];
            let Some((tag, tail)) = leading_tag(after).filter(|(t, _)| is_inline(t)) else {
                out.push_str(&after[..1]);
                rest = &after[1..];
                continue;
            };
            let tail_trimmed = tail.trim_start();
            let word_len = word_length(tail_trimmed);
            if word_len == 0 || tail_trimmed.len() == tail.len() {
                out.push_str(&after[..1 + tag.len()]);
                rest = tail;
                continue;
            }
            let word = &tail_trimmed[..word_len];
            out.push_str(&self.inline_command(tag, word));
            rest = &tail_trimmed[word_len..];
        }
        out.push_str(rest);
        out
    }

    fn inline_command(&mut self, tag: &str, word: &str) -> String {
        match tag {
            "ref" => match self.resolver.resolve(word) {
                Some((role, path)) => format!(":py:{}:`{path}`", role.name()),
                None => {
                    self.lints.push(Lint::new(codes::UNRESOLVED_REF, self.subject, format!("cannot resolve reference `{word}`")));
                    word.to_string()
                }
            },
            "p" | "c" => format!("``{word}``"),
            "a" | "e" => format!("*{word}*"),
            _ => format!("**{word}**"),
        }
    }
}

/// Length of a C++ name (with `::` separators and a leading `~`).
fn word_length(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphanumeric() || c == b'_' || (c == b'~' && i == 0) {
            i += 1;
        } else if c == b':' && bytes.get(i + 1) == Some(&b':') && bytes.get(i + 2).is_some_and(|n| n.is_ascii_alphabetic() || *n == b'_' || *n == b'~') {
            i += 2;
        } else {
            break;
        }
    }
    i
}

fn directive(name: &str, lines: &[String]) -> String {
    let body: Vec<String> = lines
        .iter()
        .enumerate()
        .map(|(i, l)| if i == 0 { l.trim_start() } else { l.trim() })
        .filter(|l| !l.is_empty())
        .map(|l| format!("    {l}"))
        .collect();
    if body.is_empty() {
        format!(".. {name}::")
    } else {
        format!(".. {name}::\n\n{}", body.join("\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_empty() {
        assert_eq!(convert("", &NoResolver), "");
        assert_eq!(convert("\n  \n", &NoResolver), "");
    }

    #[test]
    fn fields_group() {
        let out = convert("\\param x First.\n\\param y Second.\n\\return Sum.", &NoResolver);
        assert_eq!(out, ":param x: First.\n:param y: Second.\n:returns: Sum.");
    }

    #[test]
    fn at_spelling_and_inline_markup() {
        assert_eq!(convert("@note See @p value.", &NoResolver), ".. note::\n\n    See ``value``.");
    }

    #[test]
    fn stray_backslashes_survive() {
        assert_eq!(convert("a \\ b and \\p", &NoResolver), "a \\ b and \\p");
        assert_eq!(convert("mail me@example", &NoResolver), "mail me@example");
    }

    #[test]
    fn unknown_tag_is_kept_and_linted() {
        let (out, lints) = convert_with_lints("\\deprecated Use g.", &NoResolver, "::f()");
        assert_eq!(out, "\\deprecated Use g.");
        assert_eq!(lints.len(), 1);
        assert_eq!(lints[0].code, codes::UNKNOWN_DOC_TAG);
    }

    #[test]
    fn unresolved_reference_keeps_name() {
        let (out, lints) = convert_with_lints("see \\ref nowhere::x.", &NoResolver, "");
        assert_eq!(out, "see nowhere::x.");
        assert_eq!(lints[0].code, codes::UNRESOLVED_REF);
    }
}
