//! A small XML reader covering what label sidecars and experiment configs
//! need: elements, attributes, text, comments, CDATA, the `<?xml?>`
//! declaration and the five predefined entities plus numeric references.
//! DTDs and namespaces-as-semantics are not supported.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct XmlError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Source position (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Element>,
    /// Concatenated character data directly inside this element.
    pub text: String,
    pub pos: Pos,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn text_trimmed(&self) -> &str {
        self.text.trim()
    }
}

pub fn parse(input: &str) -> Result<Element, XmlError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        at: 0,
        line: 1,
        column: 1,
    };
    p.skip_misc()?;
    if p.eof() {
        return Err(p.error("document has no root element"));
    }
    let root = p.element()?;
    p.skip_misc()?;
    if !p.eof() {
        return Err(p.error("content after the root element"));
    }
    Ok(root)
}

/// Escapes text for use in attribute values and character data.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Parser {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
}

impl Parser {
    fn eof(&self) -> bool {
        self.at >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.chars.get(self.at + i) == Some(&c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, message: impl Into<String>) -> XmlError {
        XmlError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn skip_until(&mut self, end: &str, what: &str) -> Result<String, XmlError> {
        let mut out = String::new();
        while !self.starts_with(end) {
            match self.bump() {
                Some(c) => out.push(c),
                None => return Err(self.error(format!("unterminated {what}"))),
            }
        }
        self.advance(end.chars().count());
        Ok(out)
    }

    /// Whitespace, comments and processing instructions outside the root.
    fn skip_misc(&mut self) -> Result<(), XmlError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.advance(4);
                self.skip_until("-->", "comment")?;
            } else if self.starts_with("<?") {
                self.advance(2);
                self.skip_until("?>", "processing instruction")?;
            } else if self.starts_with("<!DOCTYPE") {
                return Err(self.error("DOCTYPE declarations are not supported"));
            } else {
                return Ok(());
            }
        }
    }

    fn name(&mut self) -> Result<String, XmlError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':') {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.is_empty() {
            return Err(self.error("expected a name"));
        }
        Ok(out)
    }

    fn entity(&mut self) -> Result<char, XmlError> {
        let start = self.pos();
        self.bump(); // '&'
        let mut body = String::new();
        loop {
            match self.bump() {
                Some(';') => break,
                Some(c) if body.len() < 10 => body.push(c),
                _ => {
                    return Err(XmlError {
                        line: start.line,
                        column: start.column,
                        message: "malformed entity reference".into(),
                    })
                }
            }
        }
        let decoded = match body.as_str() {
            "lt" => Some('<'),
            "gt" => Some('>'),
            "amp" => Some('&'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            b if b.starts_with("#x") => u32::from_str_radix(&b[2..], 16).ok().and_then(char::from_u32),
            b if b.starts_with('#') => b[1..].parse::<u32>().ok().and_then(char::from_u32),
            _ => None,
        };
        decoded.ok_or(XmlError {
            line: start.line,
            column: start.column,
            message: format!("unknown entity '&{body};'"),
        })
    }

    fn attribute_value(&mut self) -> Result<String, XmlError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected a quoted attribute value")),
        };
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(out);
                }
                Some('<') => return Err(self.error("'<' in attribute value")),
                Some('&') => out.push(self.entity()?),
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn element(&mut self) -> Result<Element, XmlError> {
        let pos = self.pos();
        if self.peek() != Some('<') {
            return Err(self.error("expected '<'"));
        }
        self.bump();
        let name = self.name()?;
        let mut attributes: Vec<(String, String)> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('/') => {
                    self.bump();
                    if self.peek() != Some('>') {
                        return Err(self.error("expected '>' after '/'"));
                    }
                    self.bump();
                    return Ok(Element {
                        name,
                        attributes,
                        children: Vec::new(),
                        text: String::new(),
                        pos,
                    });
                }
                Some('>') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    let apos = self.pos();
                    let key = self.name()?;
                    self.skip_ws();
                    if self.peek() != Some('=') {
                        return Err(self.error(format!("expected '=' after attribute '{key}'")));
                    }
                    self.bump();
                    self.skip_ws();
                    let value = self.attribute_value()?;
                    if attributes.iter().any(|(k, _)| *k == key) {
                        return Err(XmlError {
                            line: apos.line,
                            column: apos.column,
                            message: format!("duplicate attribute '{key}'"),
                        });
                    }
                    attributes.push((key, value));
                }
                None => return Err(self.error(format!("unterminated start tag <{name}>"))),
            }
        }

        let mut children = Vec::new();
        let mut text = String::new();
        loop {
            if self.eof() {
                return Err(self.error(format!("element <{name}> is never closed")));
            }
            if self.starts_with("</") {
                self.advance(2);
                let close = self.name()?;
                if close != name {
                    return Err(self.error(format!("expected </{name}>, found </{close}>")));
                }
                self.skip_ws();
                if self.peek() != Some('>') {
                    return Err(self.error("expected '>'"));
                }
                self.bump();
                return Ok(Element {
                    name,
                    attributes,
                    children,
                    text,
                    pos,
                });
            } else if self.starts_with("<!--") {
                self.advance(4);
                self.skip_until("-->", "comment")?;
            } else if self.starts_with("<![CDATA[") {
                self.advance(9);
                text.push_str(&self.skip_until("]]>", "CDATA section")?);
            } else if self.starts_with("<?") {
                self.advance(2);
                self.skip_until("?>", "processing instruction")?;
            } else if self.peek() == Some('<') {
                children.push(self.element()?);
            } else if self.peek() == Some('&') {
                text.push(self.entity()?);
            } else if let Some(c) = self.bump() {
                text.push(c);
            }
        }
    }
}
