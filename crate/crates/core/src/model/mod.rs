//! In-memory RDF substrate: terms, triples, graphs and datasets.

mod dataset;
mod graph;
mod iso;
mod term;

pub use dataset::Dataset;
pub use graph::{graph_difference, graph_intersection, graph_union, Graph};
pub use iso::graph_isomorphic;
pub use term::{BlankNode, Iri, Literal, Term, Triple};

pub(crate) use term::has_scheme;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("relative IRI <{0}> is not allowed here")]
    RelativeIri(String),
    #[error("invalid IRI <{0}>")]
    InvalidIri(String),
    #[error("literal {0} cannot be used as a subject")]
    LiteralSubject(String),
}
