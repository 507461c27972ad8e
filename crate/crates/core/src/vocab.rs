//! Namespaces and well-known IRIs.

use crate::model::Iri;

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
}

pub mod sh {
    pub const NS: &str = "http://www.w3.org/ns/shacl#";
}

pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";

/// Default `shds:` namespace.
pub const SHDS_NS: &str = "http://www.w3id.org/shacl-ds#";

/// Environment variable that overrides the `shds:` namespace in the CLI.
pub const SHDS_NS_ENV: &str = "SHACLDS_NS_OVERRIDE";

/// Prefix for identifiers minted for combination-derived graphs.
pub const DERIVED_PREFIX: &str = "urn:shaclds:derived:";

pub fn iri(value: &str) -> Iri {
    Iri::new_unchecked(value)
}

pub fn sh(local: &str) -> Iri {
    Iri::new_unchecked(format!("{}{local}", sh::NS))
}

pub fn rdf_type() -> Iri {
    Iri::new_unchecked(rdf::TYPE)
}

/// The dataset-validation vocabulary, resolved against a namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub namespace: String,
    pub default: Iri,
    pub named: Iri,
    pub all: Iri,
    pub target_graph: Iri,
    pub target_graph_exclude: Iri,
    pub target_graph_pattern: Iri,
    pub target_graph_pattern_exclude: Iri,
    pub target_graph_combination: Iri,
    pub and: Iri,
    pub or: Iri,
    pub minus: Iri,
    pub focus_graph: Iri,
    pub source_shape_graph: Iri,
}

impl Vocabulary {
    /// Panics if `namespace` is not an absolute IRI.
    pub fn new(namespace: &str) -> Self {
        let make = |local: &str| Iri::new(format!("{namespace}{local}")).expect("namespace must be an absolute IRI");
        Vocabulary {
            namespace: namespace.to_owned(),
            default: make("default"),
            named: make("named"),
            all: make("all"),
            target_graph: make("targetGraph"),
            target_graph_exclude: make("targetGraphExclude"),
            target_graph_pattern: make("targetGraphPattern"),
            target_graph_pattern_exclude: make("targetGraphPatternExclude"),
            target_graph_combination: make("targetGraphCombination"),
            and: make("and"),
            or: make("or"),
            minus: make("minus"),
            focus_graph: make("focusGraph"),
            source_shape_graph: make("sourceShapeGraph"),
        }
    }

    /// Reads [`SHDS_NS_ENV`], falling back to [`SHDS_NS`].
    pub fn from_env() -> Self {
        match std::env::var(SHDS_NS_ENV) {
            Ok(ns) if crate::model::has_scheme(&ns) => Vocabulary::new(&ns),
            _ => Vocabulary::default(),
        }
    }

    pub fn is_targeting_predicate(&self, p: &Iri) -> bool {
        [
            &self.target_graph,
            &self.target_graph_exclude,
            &self.target_graph_pattern,
            &self.target_graph_pattern_exclude,
            &self.target_graph_combination,
        ]
        .contains(&p)
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::new(SHDS_NS)
    }
}

/// Prefix bindings used when serializing reports.
pub fn report_prefixes(vocab: &Vocabulary) -> Vec<(String, String)> {
    vec![
        ("sh".into(), sh::NS.into()),
        ("shds".into(), vocab.namespace.clone()),
        ("rdf".into(), rdf::NS.into()),
        ("xsd".into(), xsd::NS.into()),
        ("foaf".into(), FOAF.into()),
        ("ex".into(), "http://example.org/".into()),
        ("s".into(), "http://example.org/shapes/".into()),
        ("d".into(), "http://example.org/data/".into()),
    ]
}
