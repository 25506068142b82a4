//! Statement extraction from source text.
//!
//! [`JavaScanner`] is a brace/semicolon scanner for Java-like syntax. It is not
//! a parser: it tracks class and method nesting through braces, cuts method
//! bodies into statements at `;` (outside parentheses), and reports control
//! flow headers (`if (..)`, `for (..)`, `while (..)`, `switch (..)`, ...) as
//! statements of their own. Lambda bodies, anonymous classes and array
//! initializers nested in an expression are scanned recursively and the
//! enclosing statement resumes after them.
//!
//! [`LineExtractor`] treats every non-blank line as a statement and is the
//! fallback when the scanner rejects a file.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

/// One statement together with the context the corpus builder turns into
/// retrieval fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawStatement {
    /// Binary class name, e.g. `org.example.Outer$Inner`.
    pub class_name: String,
    /// Simple names of the enclosing classes, outermost first.
    pub class_simple_names: Vec<String>,
    pub method_name: String,
    /// `name(Type1,Type2)`
    pub method_signature: String,
    /// Line where the statement text starts (1-based).
    pub line: usize,
    pub text: String,
    pub comments: Vec<String>,
}

impl RawStatement {
    pub fn statement_id(&self) -> String {
        format!(
            "{}#{}#{}",
            self.class_name, self.method_signature, self.line
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("line {0}: unterminated comment")]
    UnterminatedComment(usize),
    #[error("line {0}: unterminated string or character literal")]
    UnterminatedLiteral(usize),
    #[error("line {0}: unmatched closing brace")]
    UnmatchedClose(usize),
    #[error("{0} unclosed brace(s) at end of file")]
    UnclosedBraces(usize),
}

/// Pluggable statement segmentation.
pub trait StatementExtractor: Send + Sync {
    /// `file_stem` is the file name without extension, used when the source
    /// itself does not name a class.
    fn extract(&self, source: &str, file_stem: &str) -> Result<Vec<RawStatement>, ExtractError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct JavaScanner;

#[derive(Debug, Clone, Copy, Default)]
pub struct LineExtractor;

#[derive(Debug, Clone)]
struct Comment {
    start_line: usize,
    end_line: usize,
    /// Nothing but whitespace precedes the comment on its first line.
    own_line: bool,
    text: String,
}

/// Source split into two views of equal length: `code` has comments blanked
/// and `shape` additionally blanks the contents of string and char literals.
/// Newlines survive in both so offsets map to the same lines.
struct Masked {
    code: Vec<char>,
    shape: Vec<char>,
    comments: Vec<Comment>,
}

fn mask(source: &str) -> Result<Masked, ExtractError> {
    let chars: Vec<char> = source.chars().collect();
    let mut code = Vec::with_capacity(chars.len());
    let mut shape = Vec::with_capacity(chars.len());
    let mut comments = Vec::new();
    let mut line = 1;
    let mut line_has_code = false;
    let mut i = 0;

    let blank = |c: char| if c == '\n' { '\n' } else { ' ' };

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c == '/' && next == Some('/') {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            let text: String = chars[start + 2..i].iter().collect();
            comments.push(Comment {
                start_line: line,
                end_line: line,
                own_line: !line_has_code,
                text,
            });
            for _ in start..i {
                code.push(' ');
                shape.push(' ');
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let start = i;
            let start_line = line;
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err(ExtractError::UnterminatedComment(start_line));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            let text: String = chars[start + 2..i - 2].iter().collect();
            comments.push(Comment {
                start_line,
                end_line: line,
                own_line: !line_has_code,
                text,
            });
            for &ch in &chars[start..i] {
                code.push(blank(ch));
                shape.push(blank(ch));
            }
            if line != start_line {
                line_has_code = false;
            }
            continue;
        }
        if c == '"' || c == '\'' {
            let text_block = c == '"' && next == Some('"') && chars.get(i + 2) == Some(&'"');
            let start_line = line;
            let open_len = if text_block { 3 } else { 1 };
            for &ch in &chars[i..i + open_len] {
                code.push(ch);
                shape.push(ch);
            }
            i += open_len;
            loop {
                let Some(&ch) = chars.get(i) else {
                    return Err(ExtractError::UnterminatedLiteral(start_line));
                };
                if ch == '\\' {
                    code.push(ch);
                    shape.push(' ');
                    if let Some(&esc) = chars.get(i + 1) {
                        if esc == '\n' {
                            line += 1;
                        }
                        code.push(esc);
                        shape.push(blank(esc));
                    }
                    i += 2;
                    continue;
                }
                if ch == '\n' {
                    if !text_block {
                        return Err(ExtractError::UnterminatedLiteral(start_line));
                    }
                    line += 1;
                }
                let closes = if text_block {
                    ch == '"' && chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"')
                } else {
                    ch == c
                };
                if closes {
                    for &q in &chars[i..i + open_len] {
                        code.push(q);
                        shape.push(q);
                    }
                    i += open_len;
                    break;
                }
                code.push(ch);
                shape.push(blank(ch));
                i += 1;
            }
            line_has_code = true;
            continue;
        }
        if c == '\n' {
            line += 1;
            line_has_code = false;
        } else if !c.is_whitespace() {
            line_has_code = true;
        }
        code.push(c);
        shape.push(c);
        i += 1;
    }
    Ok(Masked {
        code,
        shape,
        comments,
    })
}

#[derive(Debug, Clone)]
enum FrameKind {
    Class { name: String, simple: String },
    Method { name: String, signature: String },
    Block,
}

#[derive(Debug, Clone, Copy)]
struct PendingChar {
    code: char,
    shape: char,
    line: usize,
}

#[derive(Debug, Clone, Default)]
struct Pending {
    chars: Vec<PendingChar>,
    paren_depth: i32,
}

impl Pending {
    fn shape(&self) -> String {
        self.chars.iter().map(|c| c.shape).collect()
    }

    fn clear(&mut self) {
        self.chars.clear();
        self.paren_depth = 0;
    }
}

#[derive(Debug)]
struct Frame {
    kind: FrameKind,
    /// Statement text interrupted by an embedded body; restored on close.
    resume: Option<Pending>,
}

struct Patterns {
    package: Regex,
    class_decl: Regex,
    annotation: Regex,
    method_head: Regex,
    anonymous: Regex,
    label: Regex,
}

fn patterns() -> &'static Patterns {
    static PATTERNS: OnceLock<Patterns> = OnceLock::new();
    PATTERNS.get_or_init(|| Patterns {
        package: Regex::new(r"(?m)^\s*package\s+([\w.]+)\s*;").unwrap(),
        class_decl: Regex::new(r"\b(?:class|interface|enum|record)\s+([A-Za-z_$][\w$]*)").unwrap(),
        annotation: Regex::new(r"@\s*[\w.]+(?:\s*\((?:[^()]|\([^()]*\))*\))?").unwrap(),
        method_head: Regex::new(r"^[^=(]*?\b([A-Za-z_$][\w$]*)\s*\(").unwrap(),
        anonymous: Regex::new(
            r"\bnew\s+[\w.$<>?,\s\[\]]+\s*\((?:[^()]|\((?:[^()]|\([^()]*\))*\))*\)\s*$",
        )
        .unwrap(),
        label: Regex::new(r"^\s*(?:case\b[^:]*|default)\s*:").unwrap(),
    })
}

const NOT_METHOD_NAMES: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "throw",
    "try",
    "else",
    "do",
    "assert",
];

const BARE_BLOCK_HEADERS: &[&str] = &["else", "try", "do", "finally", "static", "default", ""];

struct Scan<'a> {
    masked: &'a Masked,
    package: Option<String>,
    stack: Vec<Frame>,
    pending: Pending,
    anon_counters: HashMap<String, usize>,
    out: Vec<(RawStatement, usize)>,
}

impl<'a> Scan<'a> {
    fn enclosing_class(&self) -> Option<(&str, Vec<String>)> {
        let mut simple = Vec::new();
        let mut binary = None;
        for f in &self.stack {
            if let FrameKind::Class { name, simple: s } = &f.kind {
                binary = Some(name.as_str());
                simple.push(s.clone());
            }
        }
        binary.map(|b| (b, simple))
    }

    /// Innermost method, provided no class frame sits between it and the top.
    fn current_method(&self) -> Option<(&str, &str)> {
        for f in self.stack.iter().rev() {
            match &f.kind {
                FrameKind::Method { name, signature } => return Some((name, signature)),
                FrameKind::Class { .. } => return None,
                FrameKind::Block => {}
            }
        }
        None
    }

    fn top_is_class_or_empty(&self) -> bool {
        matches!(
            self.stack.last().map(|f| &f.kind),
            None | Some(FrameKind::Class { .. })
        )
    }

    fn nested_class_name(&mut self, simple: &str) -> String {
        match self.enclosing_class() {
            Some((outer, _)) => format!("{outer}${simple}"),
            None => match &self.package {
                Some(p) => format!("{p}.{simple}"),
                None => simple.to_string(),
            },
        }
    }

    fn anonymous_class_name(&mut self, file_stem: &str) -> (String, String) {
        let outer = self
            .enclosing_class()
            .map(|(o, _)| o.to_string())
            .unwrap_or_else(|| file_stem.to_string());
        let n = self.anon_counters.entry(outer.clone()).or_insert(0);
        *n += 1;
        (format!("{outer}${n}"), n.to_string())
    }

    fn emit(&mut self, end_line: usize) {
        let Some((method_name, signature)) = self.current_method() else {
            self.pending.clear();
            return;
        };
        let (method_name, signature) = (method_name.to_string(), signature.to_string());
        let Some((class_name, simple)) = self.enclosing_class() else {
            self.pending.clear();
            return;
        };
        let (class_name, simple) = (class_name.to_string(), simple);

        let shape = self.pending.shape();
        let mut skip_chars = 0;
        let mut rest = shape.as_str();
        while let Some(m) = patterns().label.find(rest) {
            skip_chars += rest[..m.end()].chars().count();
            rest = &rest[m.end()..];
        }
        let body = &self.pending.chars[skip_chars..];
        let Some(first) = body.iter().position(|c| !c.code.is_whitespace()) else {
            self.pending.clear();
            return;
        };
        let body = &body[first..];
        let text: String = body
            .iter()
            .map(|c| c.code)
            .collect::<String>()
            .trim()
            .to_string();
        let line = body[0].line;
        self.out.push((
            RawStatement {
                class_name,
                class_simple_names: simple,
                method_name,
                method_signature: signature,
                line,
                text,
                comments: Vec::new(),
            },
            end_line,
        ));
        self.pending.clear();
    }

    fn open_brace(&mut self, line: usize, file_stem: &str) {
        let header_shape = self.pending.shape();
        let header = header_shape.trim();
        let in_method = self.current_method().is_some();
        let p = patterns();

        let embedded = self.pending.paren_depth > 0
            || header.ends_with("->")
            || header.ends_with('=')
            || header.ends_with(']')
            || header.ends_with(',')
            || (in_method && p.anonymous.is_match(header));

        if embedded {
            let kind = if p.anonymous.is_match(header) {
                let (name, simple) = self.anonymous_class_name(file_stem);
                FrameKind::Class { name, simple }
            } else {
                FrameKind::Block
            };
            let resume = std::mem::take(&mut self.pending);
            self.stack.push(Frame {
                kind,
                resume: Some(resume),
            });
            return;
        }

        if let Some(caps) = p.class_decl.captures(header) {
            let simple = caps[1].to_string();
            let name = self.nested_class_name(&simple);
            self.pending.clear();
            self.stack.push(Frame {
                kind: FrameKind::Class { name, simple },
                resume: None,
            });
            return;
        }

        if self.top_is_class_or_empty() {
            let kind = match method_signature(header) {
                Some((name, signature)) => FrameKind::Method { name, signature },
                None if header == "static" => FrameKind::Method {
                    name: "<clinit>".into(),
                    signature: "<clinit>()".into(),
                },
                None if header.is_empty() => FrameKind::Method {
                    name: "<init>".into(),
                    signature: "<init>()".into(),
                },
                // enum constant bodies and the like
                None => match self.enclosing_class() {
                    Some((name, simple)) => FrameKind::Class {
                        name: name.to_string(),
                        simple: simple.last().cloned().unwrap_or_default(),
                    },
                    None => FrameKind::Block,
                },
            };
            self.pending.clear();
            self.stack.push(Frame { kind, resume: None });
            return;
        }

        if in_method && !BARE_BLOCK_HEADERS.contains(&header) {
            self.emit(line);
        } else {
            self.pending.clear();
        }
        self.stack.push(Frame {
            kind: FrameKind::Block,
            resume: None,
        });
    }

    fn close_brace(&mut self, line: usize) -> Result<(), ExtractError> {
        if self.current_method().is_some() && !self.pending.shape().trim().is_empty() {
            self.emit(line);
        }
        let frame = self.stack.pop().ok_or(ExtractError::UnmatchedClose(line))?;
        match frame.resume {
            Some(resume) => self.pending = resume,
            None => self.pending.clear(),
        }
        Ok(())
    }
}

/// Parses a method or constructor header into `(name, "name(T1,T2)")`.
fn method_signature(header: &str) -> Option<(String, String)> {
    let p = patterns();
    let header = p.annotation.replace_all(header, " ");
    let caps = p.method_head.captures(&header)?;
    let name = caps.get(1)?;
    if NOT_METHOD_NAMES.contains(&name.as_str()) {
        return None;
    }
    let open = caps.get(0)?.end();
    let mut depth = 1;
    let mut close = None;
    for (i, c) in header[open..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    close = Some(open + i);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close?;
    let tail = header[close + 1..].trim();
    if !(tail.is_empty() || tail.starts_with("throws")) {
        return None;
    }
    let types: Vec<String> = split_top_level(&header[open..close])
        .into_iter()
        .filter_map(parameter_type)
        .collect();
    Some((
        name.as_str().to_string(),
        format!("{}({})", name.as_str(), types.join(",")),
    ))
}

fn split_top_level(params: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in params.char_indices() {
        match c {
            '<' | '(' | '[' => depth += 1,
            '>' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&params[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&params[start..]);
    out.into_iter().filter(|p| !p.trim().is_empty()).collect()
}

fn parameter_type(param: &str) -> Option<String> {
    let param = param.trim();
    let param = param.strip_prefix("final ").unwrap_or(param).trim();
    let name_start = param
        .rfind(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$'))
        .map(|i| i + 1)
        .unwrap_or(0);
    let ty: String = param[..name_start]
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if ty.is_empty() {
        None
    } else {
        Some(ty)
    }
}

/// Attaches comments on the statement's own lines, plus the run of
/// whole-line comments directly above it.
fn attach_comments(statements: &mut [(RawStatement, usize)], comments: &[Comment]) {
    let mut by_end: HashMap<usize, Vec<&Comment>> = HashMap::new();
    for c in comments {
        by_end.entry(c.end_line).or_default().push(c);
    }
    for (stmt, end_line) in statements.iter_mut() {
        let mut attached: Vec<&Comment> = comments
            .iter()
            .filter(|c| c.start_line >= stmt.line && c.start_line <= *end_line)
            .collect();
        let mut line = stmt.line;
        while line > 1 {
            let Some(above) = by_end.get(&(line - 1)) else {
                break;
            };
            let own: Vec<&Comment> = above.iter().copied().filter(|c| c.own_line).collect();
            if own.is_empty() {
                break;
            }
            line = own.iter().map(|c| c.start_line).min().unwrap_or(line - 1);
            attached.extend(own);
        }
        attached.sort_by_key(|c| (c.start_line, c.end_line));
        attached.dedup_by(|a, b| a.start_line == b.start_line && a.text == b.text);
        stmt.comments = attached
            .into_iter()
            .map(|c| c.text.trim().to_string())
            .collect();
    }
}

impl StatementExtractor for JavaScanner {
    fn extract(&self, source: &str, file_stem: &str) -> Result<Vec<RawStatement>, ExtractError> {
        let masked = mask(source)?;
        let shape_text: String = masked.shape.iter().collect();
        let package = patterns()
            .package
            .captures(&shape_text)
            .map(|c| c[1].to_string());
        let mut scan = Scan {
            masked: &masked,
            package,
            stack: Vec::new(),
            pending: Pending::default(),
            anon_counters: HashMap::new(),
            out: Vec::new(),
        };
        let mut line = 1;
        for i in 0..scan.masked.shape.len() {
            let shape = scan.masked.shape[i];
            let code = scan.masked.code[i];
            match shape {
                '{' => scan.open_brace(line, file_stem),
                '}' => scan.close_brace(line)?,
                ';' if scan.pending.paren_depth <= 0 => {
                    scan.emit(line);
                }
                _ => {
                    if shape == '(' {
                        scan.pending.paren_depth += 1;
                    } else if shape == ')' {
                        scan.pending.paren_depth -= 1;
                    }
                    if !(scan.pending.chars.is_empty() && code.is_whitespace()) {
                        scan.pending.chars.push(PendingChar { code, shape, line });
                    }
                }
            }
            if shape == '\n' {
                line += 1;
            }
        }
        if !scan.stack.is_empty() {
            return Err(ExtractError::UnclosedBraces(scan.stack.len()));
        }
        let mut out = scan.out;
        attach_comments(&mut out, &masked.comments);
        Ok(out.into_iter().map(|(s, _)| s).collect())
    }
}

impl StatementExtractor for LineExtractor {
    fn extract(&self, source: &str, file_stem: &str) -> Result<Vec<RawStatement>, ExtractError> {
        let text = match mask(source) {
            Ok(m) => m.code.iter().collect::<String>(),
            Err(_) => source.to_string(),
        };
        let package = patterns()
            .package
            .captures(&text)
            .map(|c| format!("{}.", &c[1]))
            .unwrap_or_default();
        let class_name = format!("{package}{file_stem}");
        Ok(text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| RawStatement {
                class_name: class_name.clone(),
                class_simple_names: vec![file_stem.to_string()],
                method_name: String::new(),
                method_signature: "<unparsed>".to_string(),
                line: i + 1,
                text: l.trim().to_string(),
                comments: Vec::new(),
            })
            .collect())
    }
}
