//! The SHACL-core subset applied to one focus graph at a time.
//!
//! Supported components: `sh:class`, `sh:datatype`, `sh:nodeKind`,
//! `sh:minCount`, `sh:maxCount`, `sh:in`, `sh:hasValue`, `sh:pattern`,
//! `sh:minInclusive`, `sh:maxInclusive`, `sh:node`, `sh:and`, `sh:or`,
//! `sh:not` and `sh:sparql`, plus nested `sh:property` shapes. Any other
//! constraint parameter is rejected when shapes are collected.

mod collect;
mod validate;
pub mod values;

use std::collections::BTreeMap;
use std::fmt;

use regex::Regex;

pub use collect::collect_shapes;
pub use validate::{select_focus_nodes, validate_shape, value_nodes, MAX_SHAPE_DEPTH};

use crate::model::{BlankNode, Graph, Iri, Literal, Term, Triple};
use crate::sparql::ast::PathExpr;
use crate::sparql::{SparqlConstraint, SparqlError};
use crate::vocab::{self, rdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Node,
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Class(Iri),
    Node(Term),
    SubjectsOf(Iri),
    ObjectsOf(Iri),
}

/// A SHACL property path: predicate, inverse or sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    Predicate(Iri),
    Inverse(Box<Path>),
    Sequence(Vec<Path>),
}

impl Path {
    pub fn to_sparql(&self) -> PathExpr {
        match self {
            Path::Predicate(p) => PathExpr::Iri(p.clone()),
            Path::Inverse(p) => PathExpr::Inverse(Box::new(p.to_sparql())),
            Path::Sequence(ps) => PathExpr::Sequence(ps.iter().map(Path::to_sparql).collect()),
        }
    }

    /// Writes the SHACL RDF encoding of the path into `g`.
    pub fn write_rdf(&self, g: &mut Graph, fresh: &mut dyn FnMut() -> BlankNode) -> Term {
        match self {
            Path::Predicate(p) => Term::Iri(p.clone()),
            Path::Inverse(p) => {
                let node = Term::BlankNode(fresh());
                let inner = p.write_rdf(g, fresh);
                g.insert(Triple::new(node.clone(), vocab::sh("inversePath"), inner));
                node
            }
            Path::Sequence(ps) => {
                let items: Vec<Term> = ps.iter().map(|p| p.write_rdf(g, fresh)).collect();
                write_list(g, &items, fresh)
            }
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Predicate(p) => write!(f, "{p}"),
            Path::Inverse(p) => write!(f, "^{p}"),
            Path::Sequence(ps) => {
                let parts: Vec<String> = ps.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join("/"))
            }
        }
    }
}

pub(crate) fn write_list(g: &mut Graph, items: &[Term], fresh: &mut dyn FnMut() -> BlankNode) -> Term {
    let cells: Vec<Term> = items.iter().map(|_| Term::BlankNode(fresh())).collect();
    let mut head = Term::Iri(vocab::iri(rdf::NIL));
    for (cell, item) in cells.iter().zip(items).rev() {
        g.insert(Triple::new(cell.clone(), vocab::iri(rdf::FIRST), item.clone()));
        g.insert(Triple::new(cell.clone(), vocab::iri(rdf::REST), head));
        head = cell.clone();
    }
    head
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Iri,
    BlankNode,
    Literal,
    BlankNodeOrIri,
    BlankNodeOrLiteral,
    IriOrLiteral,
}

impl NodeKind {
    pub fn from_iri(iri: &Iri) -> Option<Self> {
        Some(match iri.as_str().strip_prefix(vocab::sh::NS)? {
            "IRI" => NodeKind::Iri,
            "BlankNode" => NodeKind::BlankNode,
            "Literal" => NodeKind::Literal,
            "BlankNodeOrIRI" => NodeKind::BlankNodeOrIri,
            "BlankNodeOrLiteral" => NodeKind::BlankNodeOrLiteral,
            "IRIOrLiteral" => NodeKind::IriOrLiteral,
            _ => return None,
        })
    }

    pub fn matches(self, t: &Term) -> bool {
        match self {
            NodeKind::Iri => t.is_iri(),
            NodeKind::BlankNode => t.is_blank_node(),
            NodeKind::Literal => t.is_literal(),
            NodeKind::BlankNodeOrIri => !t.is_literal(),
            NodeKind::BlankNodeOrLiteral => !t.is_iri(),
            NodeKind::IriOrLiteral => !t.is_blank_node(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledPattern {
    pub source: String,
    pub flags: Option<String>,
    pub regex: Regex,
}

#[derive(Debug, Clone)]
pub enum Constraint {
    Class(Iri),
    Datatype(Iri),
    NodeKind(NodeKind),
    MinCount(u64),
    MaxCount(u64),
    In(Vec<Term>),
    HasValue(Term),
    Pattern(CompiledPattern),
    MinInclusive(Literal),
    MaxInclusive(Literal),
    Node(Term),
    And(Vec<Term>),
    Or(Vec<Term>),
    Not(Term),
    /// A nested property shape.
    Property(Term),
    Sparql(Box<SparqlConstraint>),
}

impl Constraint {
    /// The constraint component IRI reported in results.
    pub fn component(&self) -> Iri {
        vocab::sh(match self {
            Constraint::Class(_) => "ClassConstraintComponent",
            Constraint::Datatype(_) => "DatatypeConstraintComponent",
            Constraint::NodeKind(_) => "NodeKindConstraintComponent",
            Constraint::MinCount(_) => "MinCountConstraintComponent",
            Constraint::MaxCount(_) => "MaxCountConstraintComponent",
            Constraint::In(_) => "InConstraintComponent",
            Constraint::HasValue(_) => "HasValueConstraintComponent",
            Constraint::Pattern(_) => "PatternConstraintComponent",
            Constraint::MinInclusive(_) => "MinInclusiveConstraintComponent",
            Constraint::MaxInclusive(_) => "MaxInclusiveConstraintComponent",
            Constraint::Node(_) => "NodeConstraintComponent",
            Constraint::And(_) => "AndConstraintComponent",
            Constraint::Or(_) => "OrConstraintComponent",
            Constraint::Not(_) => "NotConstraintComponent",
            Constraint::Property(_) => "PropertyConstraintComponent",
            Constraint::Sparql(_) => "SPARQLConstraintComponent",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Shape {
    pub id: Term,
    pub kind: ShapeKind,
    pub targets: Vec<Target>,
    pub path: Option<Path>,
    pub constraints: Vec<Constraint>,
    pub severity: Iri,
    pub messages: Vec<Literal>,
    pub deactivated: bool,
}

/// The shapes of one shapes graph, keyed by shape node.
#[derive(Debug, Clone, Default)]
pub struct ShapesGraph {
    pub shapes: BTreeMap<Term, Shape>,
}

impl ShapesGraph {
    pub fn get(&self, id: &Term) -> Option<&Shape> {
        self.shapes.get(id)
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Shape> {
        self.shapes.values()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShaclError {
    #[error("shape {shape}: unsupported constraint component {component}")]
    UnsupportedComponent { shape: Term, component: Iri },
    #[error("shape {shape}: {message}")]
    Malformed { shape: Term, message: String },
    #[error("shape {shape}: {error}")]
    Sparql { shape: Term, error: SparqlError },
    #[error("shape {0} references a shape that is not defined in its shapes graph")]
    UnknownShape(Term),
    #[error("shape nesting deeper than {MAX_SHAPE_DEPTH} levels starting at {0}; the shapes are probably recursive")]
    RecursionLimit(Term),
}
