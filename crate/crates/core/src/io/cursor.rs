//! Character cursor and term lexing shared by the TriG/Turtle and N-Quads
//! readers.

use std::collections::HashMap;

use super::{iri::resolve, ParseDiagnostic};
use crate::model::{has_scheme, BlankNode, Iri, Literal};
use crate::vocab::xsd;

pub(crate) struct Cursor {
    chars: Vec<char>,
    pub pos: usize,
    pub base: Option<String>,
    blank_nodes: HashMap<String, BlankNode>,
    next_blank: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, base: None, blank_nodes: HashMap::new(), next_blank: 0 }
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseDiagnostic {
        let mut line = 1;
        let mut column = 1;
        for c in &self.chars[..pos.min(self.chars.len())] {
            if *c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        ParseDiagnostic::error(line, column, message)
    }

    pub fn error(&self, message: impl Into<String>) -> ParseDiagnostic {
        self.error_at(self.pos, message)
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub fn expect(&mut self, expected: char) -> Result<(), ParseDiagnostic> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{expected}', found '{c}'"))),
            None => Err(self.error(format!("expected '{expected}', found end of input"))),
        }
    }

    /// Consumes `word` case-insensitively if it is followed by a non-name
    /// character.
    pub fn eat_keyword(&mut self, word: &str) -> bool {
        let n = word.chars().count();
        let matches = word.chars().enumerate().all(|(i, w)| self.peek_at(i).is_some_and(|c| c.eq_ignore_ascii_case(&w)));
        if matches && !self.peek_at(n).is_some_and(|c| is_name_char(c) || c == ':') {
            self.pos += n;
            true
        } else {
            false
        }
    }

    pub fn blank_node(&mut self, label: &str) -> BlankNode {
        if let Some(b) = self.blank_nodes.get(label) {
            return b.clone();
        }
        let b = self.fresh_blank();
        self.blank_nodes.insert(label.to_owned(), b.clone());
        b
    }

    /// Blank-node labels come from a per-document counter, so the same input
    /// always yields the same labels.
    pub fn fresh_blank(&mut self) -> BlankNode {
        let b = BlankNode::new(format!("b{}", self.next_blank));
        self.next_blank += 1;
        b
    }

    fn hex_escape(&mut self, len: usize) -> Result<char, ParseDiagnostic> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..len {
            let c = self.bump().ok_or_else(|| self.error("truncated unicode escape"))?;
            let d = c.to_digit(16).ok_or_else(|| self.error_at(start, "invalid hex digit in unicode escape"))?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error_at(start, "unicode escape is not a scalar value"))
    }

    /// Reads `<...>` and resolves it against the base. Relative IRIs without a
    /// base are rejected.
    pub fn iri_ref(&mut self) -> Result<Iri, ParseDiagnostic> {
        let start = self.pos;
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => value.push(self.hex_escape(4)?),
                    Some('U') => value.push(self.hex_escape(8)?),
                    _ => return Err(self.error("invalid escape in IRI")),
                },
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(format!("invalid character {c:?} in IRI")));
                }
                Some(c) => value.push(c),
            }
        }
        self.absolute(start, &value)
    }

    pub fn absolute(&self, start: usize, value: &str) -> Result<Iri, ParseDiagnostic> {
        let resolved = if has_scheme(value) {
            value.to_owned()
        } else {
            match &self.base {
                Some(base) => resolve(base, value),
                None => return Err(self.error_at(start, format!("relative IRI <{value}> with no base IRI"))),
            }
        };
        Iri::new(&resolved).map_err(|e| self.error_at(start, e.to_string()))
    }

    /// `_:label`
    pub fn blank_node_label(&mut self) -> Result<BlankNode, ParseDiagnostic> {
        let start = self.pos;
        if !(self.bump() == Some('_') && self.bump() == Some(':')) {
            return Err(self.error_at(start, "expected blank node label"));
        }
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || (c == '.' && self.peek_at(1).is_some_and(is_name_char)) {
                label.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if label.is_empty() {
            return Err(self.error_at(start, "empty blank node label"));
        }
        Ok(self.blank_node(&label))
    }

    /// Any of the four Turtle string forms, positioned at the opening quote.
    pub fn string(&mut self, allow_long: bool) -> Result<String, ParseDiagnostic> {
        let start = self.pos;
        let quote = self.bump().ok_or_else(|| self.error("expected string"))?;
        let long = allow_long && self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.pos += 2;
        }
        let mut value = String::new();
        loop {
            let c = self.bump().ok_or_else(|| self.error_at(start, "unterminated string"))?;
            if c == quote {
                if !long {
                    break;
                }
                if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                    self.pos += 2;
                    // A long string may end with up to two extra quotes.
                    while self.peek() == Some(quote) {
                        value.push(quote);
                        self.pos += 1;
                    }
                    break;
                }
                value.push(c);
            } else if c == '\\' {
                let e = self.bump().ok_or_else(|| self.error("truncated escape"))?;
                value.push(match e {
                    't' => '\t',
                    'b' => '\u{8}',
                    'n' => '\n',
                    'r' => '\r',
                    'f' => '\u{c}',
                    '"' => '"',
                    '\'' => '\'',
                    '\\' => '\\',
                    'u' => self.hex_escape(4)?,
                    'U' => self.hex_escape(8)?,
                    other => return Err(self.error(format!("invalid escape \\{other}"))),
                });
            } else if !long && (c == '\n' || c == '\r') {
                return Err(self.error("line break in single-line string"));
            } else {
                value.push(c);
            }
        }
        Ok(value)
    }

    /// Reads a language tag after `@`.
    pub fn language_tag(&mut self) -> Result<String, ParseDiagnostic> {
        let mut tag = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || (c == '-' && !tag.is_empty()) {
                tag.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if tag.is_empty() || !tag.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.error("invalid language tag"));
        }
        Ok(tag)
    }

    /// Lexes `prefix:local` into its two parts, unescaping the local name.
    pub fn prefixed_name_parts(&mut self) -> Result<(String, String), ParseDiagnostic> {
        let start = self.pos;
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_name_char(c) || (c == '.' && self.peek_at(1).is_some_and(|n| is_name_char(n) || n == ':')) {
                prefix.push(c);
                self.bump();
            } else {
                return Err(self.error_at(start, format!("expected a prefixed name, found '{prefix}{c}'")));
            }
        }
        if self.bump() != Some(':') {
            return Err(self.error_at(start, "expected a prefixed name"));
        }
        let mut local = String::new();
        while let Some(c) = self.peek() {
            let inner_dot = c == '.' && self.peek_at(1).is_some_and(|n| is_name_char(n) || matches!(n, ':' | '%' | '\\'));
            if is_name_char(c) || c == ':' || inner_dot {
                local.push(c);
                self.bump();
            } else if c == '%' {
                let h1 = self.peek_at(1).filter(char::is_ascii_hexdigit);
                let h2 = self.peek_at(2).filter(char::is_ascii_hexdigit);
                match (h1, h2) {
                    (Some(a), Some(b)) => {
                        local.push('%');
                        local.push(a);
                        local.push(b);
                        self.pos += 3;
                    }
                    _ => return Err(self.error("invalid percent escape in local name")),
                }
            } else if c == '\\' {
                match self.peek_at(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        local.push(e);
                        self.pos += 2;
                    }
                    _ => return Err(self.error("invalid escape in local name")),
                }
            } else {
                break;
            }
        }
        Ok((prefix, local))
    }

    /// Numeric literal sugar: integer, decimal or double.
    pub fn number(&mut self) -> Result<Literal, ParseDiagnostic> {
        let start = self.pos;
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.pos += 1;
        }
        let digits = |cur: &mut Cursor, text: &mut String| {
            let mut n = 0;
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                cur.pos += 1;
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut text);
        let mut datatype = xsd::INTEGER;
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.pos += 1;
            frac_digits = digits(self, &mut text);
            datatype = xsd::DECIMAL;
        }
        if int_digits + frac_digits == 0 {
            return Err(self.error_at(start, "invalid number"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.pos += 1;
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.pos += 1;
            }
            if digits(self, &mut text) == 0 {
                return Err(self.error_at(start, "invalid exponent"));
            }
            datatype = xsd::DOUBLE;
        }
        Ok(Literal::typed(text, Iri::new_unchecked(datatype)))
    }
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || (c as u32 >= 0xC0 && !c.is_whitespace() && !c.is_control())
}

pub(crate) fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '-' || c == '\u{B7}'
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let c = Cursor::new("ab\ncd");
        let d = c.error_at(4, "x");
        assert_eq!((d.line, d.column), (2, 2));
    }

    #[test]
    fn strings() {
        let mut c = Cursor::new(r#""a\"bA""#);
        assert_eq!(c.string(true).unwrap(), "a\"bA");
        let mut c = Cursor::new("'''x''y'''");
        assert_eq!(c.string(true).unwrap(), "x''y");
        let mut c = Cursor::new("\"\"\"ends with quote\"\"\"\"");
        assert_eq!(c.string(true).unwrap(), "ends with quote\"");
        let mut c = Cursor::new("\"open");
        assert!(c.string(true).is_err());
    }

    #[test]
    fn numbers() {
        for (text, dt, lex) in [
            ("42 ", xsd::INTEGER, "42"),
            ("-4.5 ", xsd::DECIMAL, "-4.5"),
            ("1e3 ", xsd::DOUBLE, "1e3"),
            ("1. ", xsd::INTEGER, "1"),
            (".5 ", xsd::DECIMAL, ".5"),
        ] {
            let mut c = Cursor::new(text);
            let lit = c.number().unwrap();
            assert_eq!(lit.datatype().as_str(), dt);
            assert_eq!(lit.lexical(), lex);
        }
    }

    #[test]
    fn relative_iri_without_base_fails() {
        let mut c = Cursor::new("<foo>");
        assert!(c.iri_ref().unwrap_err().message.contains("no base"));
        let mut c = Cursor::new("<foo>");
        c.base = Some("http://e/x/".into());
        assert_eq!(c.iri_ref().unwrap().as_str(), "http://e/x/foo");
    }
}
