//! Validation of RDF datasets.
//!
//! Shapes graphs live as named graphs in a *shapes dataset*; targeting
//! triples (`shds:targetGraph`, `shds:targetGraphCombination`, ...) decide
//! which graphs of the *data dataset*, or which set-theoretic combinations
//! of them, each shapes graph validates. Every (shapes graph, focus graph)
//! pair is validated over an evaluation dataset whose default graph is the
//! focus graph, and the results are merged into one report annotated with
//! `shds:focusGraph` and `shds:sourceShapeGraph`.

pub mod cli;
pub mod harness;
pub mod io;
pub mod model;
pub mod report;
pub mod shacl;
pub mod shapes_dataset;
pub mod sparql;
pub mod targets;
pub mod validate;
pub mod view;
pub mod vocab;

pub use io::{parse_dataset, serialize_graph, ParseDiagnostic, RdfFormat};
pub use model::{graph_isomorphic, Dataset, Graph, Iri, Literal, Term, Triple};
pub use shapes_dataset::{check_wellformed, extract_declarations, ShapesDataset};
pub use validate::{validate_dataset, ValidationError, ValidationOptions, ValidationOutcome, ValidationRun};
pub use vocab::Vocabulary;
