use std::fmt;
use std::sync::Arc;

use super::ModelError;
use crate::vocab::{rdf, xsd};

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, ModelError> {
        let value = value.as_ref();
        if !has_scheme(value) {
            return Err(ModelError::RelativeIri(value.to_owned()));
        }
        if value.chars().any(|c| matches!(c, ' ' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') || c.is_control()) {
            return Err(ModelError::InvalidIri(value.to_owned()));
        }
        Ok(Iri(Arc::from(value)))
    }

    /// Builds an IRI from a string already known to be absolute.
    pub(crate) fn new_unchecked(value: impl AsRef<str>) -> Self {
        debug_assert!(has_scheme(value.as_ref()), "not absolute: {}", value.as_ref());
        Iri(Arc::from(value.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// `scheme ":"` where scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )
pub(crate) fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// A blank node. Labels are scoped to the dataset they were parsed into.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(Arc<str>);

impl BlankNode {
    pub fn new(label: impl AsRef<str>) -> Self {
        BlankNode(Arc::from(label.as_ref()))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

impl fmt::Debug for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

/// A literal compared by lexical form, datatype and language tag.
///
/// Language tags are lower-cased on construction; no other normalization
/// is applied.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    language: Option<Arc<str>>,
}

impl Literal {
    /// An `xsd:string` literal.
    pub fn simple(lexical: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: Iri::new_unchecked(xsd::STRING),
            language: None,
        }
    }

    /// A typed literal. Passing `rdf:langString` without a tag is allowed
    /// here but never produced by the parsers.
    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        Literal { lexical: Arc::from(lexical.as_ref()), datatype, language: None }
    }

    pub fn lang(lexical: impl AsRef<str>, tag: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: Iri::new_unchecked(rdf::LANG_STRING),
            language: Some(Arc::from(tag.as_ref().to_ascii_lowercase())),
        }
    }

    pub fn boolean(value: bool) -> Self {
        Literal::typed(if value { "true" } else { "false" }, Iri::new_unchecked(xsd::BOOLEAN))
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(xsd::INTEGER))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c if c.is_control() => write!(f, "\\u{:04X}", c as u32)?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if self.datatype.as_str() != xsd::STRING {
            write!(f, "^^{}", self.datatype)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank_node(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn as_blank_node(&self) -> Option<&BlankNode> {
        match self {
            Term::BlankNode(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => fmt::Display::fmt(i, f),
            Term::BlankNode(b) => fmt::Display::fmt(b, f),
            Term::Literal(l) => fmt::Display::fmt(l, f),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

/// An RDF triple. The predicate is always an IRI and the subject is never a
/// literal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    /// Panics if `subject` is a literal.
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Self {
        let subject = subject.into();
        assert!(!subject.is_literal(), "literal in subject position: {subject}");
        Triple { subject, predicate, object: object.into() }
    }

    pub fn try_new(subject: Term, predicate: Iri, object: Term) -> Result<Self, ModelError> {
        if subject.is_literal() {
            return Err(ModelError::LiteralSubject(subject.to_string()));
        }
        Ok(Triple { subject, predicate, object })
    }

    pub fn has_blank_node(&self) -> bool {
        self.subject.is_blank_node() || self.object.is_blank_node()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://example.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(matches!(Iri::new("a/b"), Err(ModelError::RelativeIri(_))));
        assert!(matches!(Iri::new(":x"), Err(ModelError::RelativeIri(_))));
        assert!(Iri::new("http://example.org/a b").is_err());
    }

    #[test]
    fn literal_language_implies_lang_string() {
        let l = Literal::lang("hi", "EN");
        assert_eq!(l.language(), Some("en"));
        assert_eq!(l.datatype().as_str(), rdf::LANG_STRING);
        assert_eq!(Literal::simple("x").language(), None);
    }

    #[test]
    fn structural_equality() {
        let a = Term::from(Literal::typed("1", Iri::new_unchecked(xsd::INTEGER)));
        let b = Term::from(Literal::typed("01", Iri::new_unchecked(xsd::INTEGER)));
        assert_ne!(a, b);
        assert_eq!(Term::from(BlankNode::new("x")), Term::from(BlankNode::new("x")));
        assert_ne!(Term::from(Iri::new_unchecked("http://e/x")), Term::from(Literal::simple("http://e/x")));
    }

    #[test]
    fn literal_display_escapes() {
        assert_eq!(Literal::simple("a\"b\n").to_string(), r#""a\"b\n""#);
        assert_eq!(Literal::lang("x", "fr").to_string(), "\"x\"@fr");
        assert_eq!(
            Literal::integer(3).to_string(),
            "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>"
        );
    }

    #[test]
    #[should_panic]
    fn literal_subject_panics() {
        Triple::new(Literal::simple("x"), Iri::new_unchecked("http://e/p"), Literal::simple("y"));
    }
}
