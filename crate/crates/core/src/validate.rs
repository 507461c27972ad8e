//! The validation loop: every shapes graph against every one of its focus
//! graphs, merged into one report.
//!
//! Shapes graphs are processed in IRI order and their focus graphs in the
//! order target resolution returns them, so a run is deterministic. A
//! shapes graph without any targeting declaration validates nothing.

use crate::model::{Dataset, Graph, Iri};
use crate::report::{annotate, build_report, AnnotatedResult};
use crate::shacl::{collect_shapes, validate_shape, ShaclError};
use crate::shapes_dataset::{check_wellformed, extract_declarations, ShapesDataset, ShapesDatasetError, WellformednessViolation};
use crate::targets::{resolve_targets, DerivedIds, TargetError};
use crate::view::{build_view, ViewError};
use crate::vocab::{self, Vocabulary};

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// Stop after the first (shapes graph, focus graph) pair that produced a
    /// violation.
    pub fail_fast: bool,
    /// Stop once this many results have been collected.
    pub max_results: Option<usize>,
    pub vocab: Vocabulary,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { fail_fast: false, max_results: None, vocab: Vocabulary::from_env() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("the shapes dataset has {} ill-formed target declaration(s); first: {}", .0.len(), .0[0])]
    IllFormed(Vec<WellformednessViolation>),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error("shapes graph {shapes_graph}: {source}")]
    Shacl { shapes_graph: Iri, source: ShaclError },
}

impl From<ShapesDatasetError> for ValidationError {
    fn from(e: ShapesDatasetError) -> Self {
        match e {
            ShapesDatasetError::IllFormed(v) => ValidationError::IllFormed(vec![*v]),
        }
    }
}

/// A checked shapes dataset paired with the data it validates.
#[derive(Debug, Clone)]
pub struct ValidationRun {
    pub shapes: ShapesDataset,
    pub data: Dataset,
    pub options: ValidationOptions,
}

impl ValidationRun {
    /// Checks the shapes dataset's declarations and extracts them. Every
    /// ill-formed declaration is reported, not just the first.
    pub fn new(shapes: Dataset, data: Dataset, options: ValidationOptions) -> Result<Self, ValidationError> {
        let violations = check_wellformed(&shapes, None, &options.vocab);
        if !violations.is_empty() {
            return Err(ValidationError::IllFormed(violations));
        }
        let shapes = extract_declarations(&shapes, &options.vocab)?;
        Ok(Self { shapes, data, options })
    }

    pub fn run(&self) -> Result<ValidationOutcome, ValidationError> {
        validate_run(self)
    }
}

#[derive(Debug, Clone)]
pub struct ValidationOutcome {
    pub report: Graph,
    /// Results in the order they were produced.
    pub results: Vec<AnnotatedResult>,
    pub warnings: Vec<String>,
    pub conforms: bool,
    /// Whether `fail_fast` or `max_results` stopped the run early.
    pub truncated: bool,
}

/// Validates `data` against the shapes dataset `shapes`.
pub fn validate_dataset(shapes: &Dataset, data: &Dataset, options: &ValidationOptions) -> Result<ValidationOutcome, ValidationError> {
    ValidationRun::new(shapes.clone(), data.clone(), options.clone())?.run()
}

fn validate_run(run: &ValidationRun) -> Result<ValidationOutcome, ValidationError> {
    let options = &run.options;
    let vocab = &run.shapes.vocab;
    let ids = DerivedIds::new();
    let mut warnings = Vec::new();
    let mut results: Vec<AnnotatedResult> = Vec::new();
    let mut truncated = false;
    let violation = vocab::sh("Violation");

    'graphs: for (name, decl) in &run.shapes.declarations {
        if decl.is_empty() {
            continue;
        }
        let Some(shapes_graph) = run.shapes.underlying.named_graph(name) else {
            warnings.push(format!("target declarations for {name}, which is not a graph of the shapes dataset; skipped"));
            continue;
        };
        let focus_graphs = resolve_targets(name, &run.shapes, &run.data, &ids, &mut warnings)?;
        if focus_graphs.is_empty() {
            continue;
        }
        let shapes = collect_shapes(shapes_graph).map_err(|source| ValidationError::Shacl { shapes_graph: name.clone(), source })?;
        for focus in &focus_graphs {
            let view = build_view(&run.data, focus, vocab)?;
            let mut pair = Vec::new();
            for shape in shapes.iter() {
                let (raw, w) = validate_shape(shape, &shapes, &view)
                    .map_err(|source| ValidationError::Shacl { shapes_graph: name.clone(), source })?;
                pair.extend(raw);
                warnings.extend(w);
            }
            pair.sort();
            let violated = pair.iter().any(|r| r.severity == violation);
            for raw in pair {
                if options.max_results.is_some_and(|max| results.len() >= max) {
                    truncated = true;
                    break 'graphs;
                }
                results.push(annotate(raw, name, focus));
            }
            if options.fail_fast && violated {
                truncated = true;
                break 'graphs;
            }
        }
    }

    let mut seen = std::collections::HashSet::new();
    warnings.retain(|w| seen.insert(w.clone()));
    let report = build_report(&results, vocab);
    let conforms = !results.iter().any(|r| r.raw.severity == violation);
    Ok(ValidationOutcome { report, results, warnings, conforms, truncated })
}
