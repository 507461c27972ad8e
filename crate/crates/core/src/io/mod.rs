//! Reading TriG, Turtle and N-Quads documents and writing graphs back out.

pub(crate) mod cursor;
mod iri;
mod nquads;
mod trig;
mod writer;

use std::fmt;
use std::str::FromStr;

use crate::model::{Dataset, Graph};

pub use iri::resolve as resolve_iri;
pub use writer::{serialize_dataset, serialize_graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    TriG,
    Turtle,
    NQuads,
}

impl RdfFormat {
    /// Guesses the format from a file extension.
    pub fn from_extension(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "trig" => Some(RdfFormat::TriG),
            "ttl" | "turtle" => Some(RdfFormat::Turtle),
            "nq" | "nquads" => Some(RdfFormat::NQuads),
            _ => None,
        }
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trig" => Ok(RdfFormat::TriG),
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            "nquads" | "n-quads" | "nq" => Ok(RdfFormat::NQuads),
            other => Err(format!("unknown RDF format '{other}'")),
        }
    }
}

impl fmt::Display for RdfFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfFormat::TriG => "trig",
            RdfFormat::Turtle => "turtle",
            RdfFormat::NQuads => "nquads",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned parser message. Lines and columns start at 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic { line, column, message: message.into(), severity: Severity::Error }
    }
}

/// Parses a complete document into a dataset. Turtle input only populates
/// the default graph.
pub fn parse_dataset(input: &[u8], format: RdfFormat) -> Result<Dataset, ParseDiagnostic> {
    parse_dataset_with_base(input, format, None)
}

pub fn parse_dataset_with_base(input: &[u8], format: RdfFormat, base: Option<&str>) -> Result<Dataset, ParseDiagnostic> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let valid = &input[..e.valid_up_to()];
        let line = valid.iter().filter(|b| **b == b'\n').count() + 1;
        let line_start = valid.iter().rposition(|b| *b == b'\n').map(|i| i + 1).unwrap_or(0);
        let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
        ParseDiagnostic::error(line, column, "input is not valid UTF-8")
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    match format {
        RdfFormat::TriG => trig::TrigParser::new(text, true).with_base(base.map(str::to_owned)).parse(),
        RdfFormat::Turtle => trig::TrigParser::new(text, false).with_base(base.map(str::to_owned)).parse(),
        RdfFormat::NQuads => nquads::parse(text),
    }
}

/// Parses a Turtle (or TriG/N-Quads) document and returns its default graph.
pub fn parse_graph(input: &[u8], format: RdfFormat) -> Result<Graph, ParseDiagnostic> {
    let d = parse_dataset(input, format)?;
    Ok(d.default_graph().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_utf8_is_positioned() {
        let err = parse_dataset(b"# ok\n\xff", RdfFormat::TriG).unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
    }

    #[test]
    fn turtle_populates_default_only() {
        let d = parse_dataset(b"<http://e/a> <http://e/p> <http://e/b> .", RdfFormat::Turtle).unwrap();
        assert_eq!(d.default_graph().len(), 1);
        assert_eq!(d.named_count(), 0);
    }

    #[test]
    fn format_names() {
        assert_eq!("TriG".parse::<RdfFormat>().unwrap(), RdfFormat::TriG);
        assert_eq!("nquads".parse::<RdfFormat>().unwrap(), RdfFormat::NQuads);
        assert!("xml".parse::<RdfFormat>().is_err());
    }
}
