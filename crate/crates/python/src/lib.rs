//! Python bindings: parse datasets, validate them and inspect the report.
//!
//! Terms cross the boundary as N-Triples strings (`<iri>`, `_:b`, `"lit"`).

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shaclds::report::{focus_graph_iri, sorted_results};
use shaclds::targets::Provenance;
use shaclds::{io, Vocabulary};

create_exception!(pyshaclds, ShaclDsError, PyValueError, "Raised for parse, well-formedness and engine errors.");

fn err(e: impl std::fmt::Display) -> PyErr {
    ShaclDsError::new_err(e.to_string())
}

fn format_arg(format: &str) -> PyResult<io::RdfFormat> {
    format.parse().map_err(err)
}

/// An RDF dataset: a default graph and named graphs.
#[pyclass(module = "pyshaclds", frozen)]
pub struct Dataset {
    inner: shaclds::Dataset,
}

#[pymethods]
impl Dataset {
    /// Parses TriG (the default), Turtle or N-Quads text.
    #[staticmethod]
    #[pyo3(signature = (text, format = "trig"))]
    fn parse(text: &str, format: &str) -> PyResult<Self> {
        let inner = io::parse_dataset(text.as_bytes(), format_arg(format)?).map_err(err)?;
        Ok(Dataset { inner })
    }

    /// Reads a file; the format is guessed from the extension unless given.
    #[staticmethod]
    #[pyo3(signature = (path, format = None))]
    fn from_file(path: std::path::PathBuf, format: Option<&str>) -> PyResult<Self> {
        let format = match format {
            Some(f) => format_arg(f)?,
            None => io::RdfFormat::from_extension(&path).unwrap_or(io::RdfFormat::TriG),
        };
        let bytes = std::fs::read(&path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let inner = io::parse_dataset(&bytes, format).map_err(err)?;
        Ok(Dataset { inner })
    }

    /// Names of the named graphs, sorted.
    fn named_graphs(&self) -> Vec<String> {
        self.inner.named_graph_names().map(|n| n.as_str().to_owned()).collect()
    }

    /// Number of quads over all graphs.
    fn __len__(&self) -> usize {
        self.inner.quad_count()
    }

    #[pyo3(signature = (format = "trig"))]
    fn serialize(&self, format: &str) -> PyResult<String> {
        Ok(io::serialize_dataset(&self.inner, format_arg(format)?, &[]))
    }

    fn __repr__(&self) -> String {
        format!("Dataset(quads={}, named_graphs={})", self.inner.quad_count(), self.inner.named_count())
    }
}

/// The merged validation report of one run.
#[pyclass(module = "pyshaclds", frozen)]
pub struct ValidationReport {
    outcome: shaclds::ValidationOutcome,
    vocab: Vocabulary,
}

#[pymethods]
impl ValidationReport {
    #[getter]
    fn conforms(&self) -> bool {
        self.outcome.conforms
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.outcome.warnings.clone()
    }

    /// Whether `fail_fast` or `max_results` stopped the run early.
    #[getter]
    fn truncated(&self) -> bool {
        self.outcome.truncated
    }

    /// One dict per result, in report order.
    fn results<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mut out = Vec::new();
        for r in sorted_results(&self.outcome.results) {
            let d = PyDict::new(py);
            let raw = &r.raw;
            d.set_item("focus_node", raw.focus_node.to_string())?;
            d.set_item("path", raw.path.as_ref().map(ToString::to_string))?;
            d.set_item("value", raw.value.as_ref().map(ToString::to_string))?;
            d.set_item("component", raw.component.as_str())?;
            d.set_item("severity", raw.severity.as_str())?;
            d.set_item("source_shape", raw.source_shape.to_string())?;
            d.set_item("messages", raw.messages.iter().map(|m| m.lexical().to_owned()).collect::<Vec<_>>())?;
            d.set_item("source_shapes_graph", r.source_shapes_graph.as_str())?;
            let focus_graph = match (focus_graph_iri(&r.focus, &self.vocab), &r.focus.provenance) {
                (Some(iri), _) => iri.as_str().to_owned(),
                (None, Provenance::Combination(expr)) => expr.to_string(),
                (None, _) => r.focus.derived_id.to_string(),
            };
            d.set_item("focus_graph", focus_graph)?;
            out.push(d);
        }
        Ok(out)
    }

    /// The report graph as Turtle (the default) or TriG.
    #[pyo3(signature = (format = "turtle"))]
    fn serialize(&self, format: &str) -> PyResult<String> {
        let prefixes = shaclds::vocab::report_prefixes(&self.vocab);
        Ok(io::serialize_graph(&self.outcome.report, format_arg(format)?, &prefixes))
    }

    fn __len__(&self) -> usize {
        self.outcome.results.len()
    }

    fn __repr__(&self) -> String {
        format!("ValidationReport(conforms={}, results={})", self.outcome.conforms, self.outcome.results.len())
    }
}

/// Validates `data` against the shapes dataset `shapes`.
#[pyfunction]
#[pyo3(signature = (shapes, data, fail_fast = false, max_results = None))]
fn validate(py: Python<'_>, shapes: &Dataset, data: &Dataset, fail_fast: bool, max_results: Option<usize>) -> PyResult<ValidationReport> {
    let vocab = Vocabulary::from_env();
    let options = shaclds::ValidationOptions { fail_fast, max_results, vocab: vocab.clone() };
    let outcome = py.detach(|| shaclds::validate_dataset(&shapes.inner, &data.inner, &options)).map_err(err)?;
    Ok(ValidationReport { outcome, vocab })
}

/// Lists the ill-formed target declarations of a shapes dataset. With `data`,
/// plain graph IRIs must also name graphs of that dataset.
#[pyfunction]
#[pyo3(signature = (shapes, data = None))]
fn check_wellformed(shapes: &Dataset, data: Option<&Dataset>) -> Vec<String> {
    shaclds::check_wellformed(&shapes.inner, data.map(|d| &d.inner), &Vocabulary::from_env()).iter().map(ToString::to_string).collect()
}

/// Whether two Turtle documents denote isomorphic graphs.
#[pyfunction]
fn isomorphic(a: &str, b: &str) -> PyResult<bool> {
    let ga = io::parse_graph(a.as_bytes(), io::RdfFormat::Turtle).map_err(err)?;
    let gb = io::parse_graph(b.as_bytes(), io::RdfFormat::Turtle).map_err(err)?;
    Ok(shaclds::graph_isomorphic(&ga, &gb))
}

#[pymodule]
fn pyshaclds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<ValidationReport>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(check_wellformed, m)?)?;
    m.add_function(wrap_pyfunction!(isomorphic, m)?)?;
    m.add("ShaclDsError", m.py().get_type::<ShaclDsError>())?;
    Ok(())
}
