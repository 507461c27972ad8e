//! Validation results and the merged report graph.
//!
//! Each result carries `shds:sourceShapeGraph` (the shapes graph it came
//! from) and `shds:focusGraph`: the graph IRI, `shds:default`, or, for a
//! combination, a blank node holding a copy of the combination expression.

use std::collections::BTreeMap;

use crate::model::{BlankNode, Graph, Iri, Literal, Term, Triple};
use crate::shacl::Path;
use crate::shapes_dataset::{CombinationExpr, GraphRef};
use crate::targets::{FocusGraph, Provenance};
use crate::vocab::{self, Vocabulary};

/// One constraint failure inside a single (shapes graph, focus graph) run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawResult {
    pub focus_node: Term,
    pub path: Option<Path>,
    pub value: Option<Term>,
    pub component: Iri,
    pub severity: Iri,
    pub messages: Vec<Literal>,
    pub source_shape: Term,
}

/// A result with its dataset-level provenance.
#[derive(Debug, Clone)]
pub struct AnnotatedResult {
    pub raw: RawResult,
    pub source_shapes_graph: Iri,
    pub focus: FocusGraph,
}

pub fn annotate(raw: RawResult, shapes_graph: &Iri, focus: &FocusGraph) -> AnnotatedResult {
    AnnotatedResult { raw, source_shapes_graph: shapes_graph.clone(), focus: focus.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("malformed validation report: {0}")]
    Malformed(String),
}

type SortKey<'a> = (&'a Term, &'a Iri, &'a Term, &'a Iri, &'a Term, &'a Option<Path>, &'a Option<Term>, &'a Iri, &'a Vec<Literal>);

/// Report ordering: focus graph id, shapes graph, focus node, component,
/// then the remaining fields.
fn sort_key(r: &AnnotatedResult) -> SortKey<'_> {
    let raw = &r.raw;
    (
        &r.focus.derived_id,
        &r.source_shapes_graph,
        &raw.focus_node,
        &raw.component,
        &raw.source_shape,
        &raw.path,
        &raw.value,
        &raw.severity,
        &raw.messages,
    )
}

/// Results in the order the report lists them.
pub fn sorted_results(results: &[AnnotatedResult]) -> Vec<&AnnotatedResult> {
    let mut sorted: Vec<&AnnotatedResult> = results.iter().collect();
    sorted.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    sorted
}

/// The IRI that names a focus graph in reports, when there is one. A
/// combination that is a single graph reference collapses to it.
pub fn focus_graph_iri(focus: &FocusGraph, vocab: &Vocabulary) -> Option<Iri> {
    match &focus.provenance {
        Provenance::Default => Some(vocab.default.clone()),
        Provenance::Named(iri) => Some(iri.clone()),
        Provenance::Combination(CombinationExpr::Leaf(r @ (GraphRef::Named(_) | GraphRef::Default))) => Some(r.to_iri(vocab)),
        Provenance::Combination(_) => None,
    }
}

/// Blank nodes from three sources share one report graph: data terms, shapes
/// terms and freshly minted report nodes. Each source gets its own label
/// space so they never merge.
struct Labels {
    next: usize,
}

impl Labels {
    fn fresh(&mut self) -> BlankNode {
        let b = BlankNode::new(format!("r{}", self.next));
        self.next += 1;
        b
    }
}

fn scoped(t: &Term, scope: &str) -> Term {
    match t {
        Term::BlankNode(b) => Term::BlankNode(BlankNode::new(format!("{scope}{}", b.label()))),
        other => other.clone(),
    }
}

/// Builds the single report graph for all results.
pub fn build_report(results: &[AnnotatedResult], vocab: &Vocabulary) -> Graph {
    let mut g = Graph::new();
    let mut labels = Labels { next: 0 };
    let report = Term::BlankNode(labels.fresh());
    let rdf_type = vocab::rdf_type();
    let sh = vocab::sh;
    g.insert(Triple::new(report.clone(), rdf_type.clone(), sh("ValidationReport")));
    let conforms = !results.iter().any(|r| r.raw.severity == sh("Violation"));
    g.insert(Triple::new(report.clone(), sh("conforms"), Literal::boolean(conforms)));
    let mut combination_nodes: BTreeMap<Term, Term> = BTreeMap::new();
    for r in sorted_results(results) {
        let raw = &r.raw;
        let node = Term::BlankNode(labels.fresh());
        g.insert(Triple::new(report.clone(), sh("result"), node.clone()));
        g.insert(Triple::new(node.clone(), rdf_type.clone(), sh("ValidationResult")));
        g.insert(Triple::new(node.clone(), sh("focusNode"), scoped(&raw.focus_node, "d")));
        g.insert(Triple::new(node.clone(), sh("resultSeverity"), raw.severity.clone()));
        g.insert(Triple::new(node.clone(), sh("sourceConstraintComponent"), raw.component.clone()));
        g.insert(Triple::new(node.clone(), sh("sourceShape"), scoped(&raw.source_shape, "s")));
        if let Some(path) = &raw.path {
            let p = path.write_rdf(&mut g, &mut || labels.fresh());
            g.insert(Triple::new(node.clone(), sh("resultPath"), p));
        }
        if let Some(v) = &raw.value {
            g.insert(Triple::new(node.clone(), sh("value"), scoped(v, "d")));
        }
        for m in &raw.messages {
            g.insert(Triple::new(node.clone(), sh("resultMessage"), m.clone()));
        }
        g.insert(Triple::new(node.clone(), vocab.source_shape_graph.clone(), r.source_shapes_graph.clone()));
        let focus_graph = match (focus_graph_iri(&r.focus, vocab), &r.focus.provenance) {
            (Some(iri), _) => Term::Iri(iri),
            (None, Provenance::Combination(expr)) => match combination_nodes.get(&r.focus.derived_id) {
                Some(n) => n.clone(),
                None => {
                    let copy = expr.write_rdf(&mut g, vocab, &mut || labels.fresh());
                    combination_nodes.insert(r.focus.derived_id.clone(), copy.clone());
                    copy
                }
            },
            (None, _) => unreachable!("only combinations lack an IRI"),
        };
        g.insert(Triple::new(node, vocab.focus_graph.clone(), focus_graph));
    }
    g
}

/// Reads `sh:conforms` from a report built by [`build_report`].
pub fn conforms(report: &Graph) -> Result<bool, ReportError> {
    let reports: Vec<&Term> = report.subjects(&vocab::rdf_type(), &Term::Iri(vocab::sh("ValidationReport"))).collect();
    let [node] = reports.as_slice() else {
        return Err(ReportError::Malformed(format!("expected one sh:ValidationReport node, found {}", reports.len())));
    };
    let values: Vec<&Term> = report.objects(node, &vocab::sh("conforms")).collect();
    match values.as_slice() {
        [Term::Literal(l)] if l.datatype().as_str() == vocab::xsd::BOOLEAN => match l.lexical() {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            other => Err(ReportError::Malformed(format!("invalid sh:conforms value {other:?}"))),
        },
        _ => Err(ReportError::Malformed("expected exactly one boolean sh:conforms value".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ex(local: &str) -> Iri {
        vocab::iri(&format!("http://example.org/{local}"))
    }

    fn raw(severity: &str) -> RawResult {
        RawResult {
            focus_node: Term::Iri(ex("Alice")),
            path: None,
            value: Some(Term::Iri(ex("Alice"))),
            component: vocab::sh("ClassConstraintComponent"),
            severity: vocab::sh(severity),
            messages: vec![],
            source_shape: Term::Iri(ex("S")),
        }
    }

    fn focus(p: Provenance, id: Term) -> FocusGraph {
        FocusGraph { triples: Arc::new(Graph::new()), provenance: p, derived_id: id }
    }

    #[test]
    fn empty_report_conforms() {
        let g = build_report(&[], &Vocabulary::default());
        assert_eq!(g.len(), 2);
        assert_eq!(conforms(&g), Ok(true));
    }

    #[test]
    fn severity_decides_conformance() {
        let v = Vocabulary::default();
        let f = focus(Provenance::Named(ex("g2")), Term::Iri(ex("g2")));
        let violation = annotate(raw("Violation"), &ex("sg"), &f);
        assert_eq!(conforms(&build_report(std::slice::from_ref(&violation), &v)), Ok(false));
        let warning = annotate(raw("Warning"), &ex("sg"), &f);
        assert_eq!(conforms(&build_report(&[warning], &v)), Ok(true));
        let g = build_report(&[violation], &v);
        let results: Vec<&Triple> = g.with_predicate(&v.focus_graph).iter().collect();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].object, Term::Iri(ex("g2")));
        assert_eq!(g.with_predicate(&v.source_shape_graph)[0].object, Term::Iri(ex("sg")));
    }

    #[test]
    fn default_focus_uses_reserved_iri() {
        let v = Vocabulary::default();
        let f = focus(Provenance::Default, Term::Iri(v.default.clone()));
        let g = build_report(&[annotate(raw("Violation"), &ex("sg"), &f)], &v);
        assert_eq!(g.with_predicate(&v.focus_graph)[0].object, Term::Iri(v.default.clone()));
    }

    #[test]
    fn combination_copy_is_shared_and_complete() {
        let v = Vocabulary::default();
        let expr = CombinationExpr::Or(vec![CombinationExpr::Leaf(GraphRef::Default), CombinationExpr::Leaf(GraphRef::Named(ex("c")))]);
        let f = focus(Provenance::Combination(expr), Term::Iri(vocab::iri("urn:shaclds:derived:0")));
        let mut second = raw("Violation");
        second.focus_node = Term::Iri(ex("Bob"));
        let g = build_report(&[annotate(raw("Violation"), &ex("sg"), &f), annotate(second, &ex("sg"), &f)], &v);
        let targets: Vec<&Term> = g.with_predicate(&v.focus_graph).iter().map(|t| &t.object).collect();
        assert_eq!(targets.len(), 2);
        assert_eq!(targets[0], targets[1]);
        assert!(targets[0].is_blank_node());
        assert_eq!(g.objects(targets[0], &v.or).count(), 1);
        assert_eq!(g.with_predicate(&vocab::iri(vocab::rdf::FIRST)).len(), 2);
    }

    #[test]
    fn single_leaf_combination_collapses() {
        let v = Vocabulary::default();
        let f = focus(Provenance::Combination(CombinationExpr::Leaf(GraphRef::Named(ex("g")))), Term::Iri(vocab::iri("urn:shaclds:derived:3")));
        let g = build_report(&[annotate(raw("Violation"), &ex("sg"), &f)], &v);
        assert_eq!(g.with_predicate(&v.focus_graph)[0].object, Term::Iri(ex("g")));
    }

    #[test]
    fn malformed_reports() {
        assert!(conforms(&Graph::new()).is_err());
        let mut g = build_report(&[], &Vocabulary::default());
        let node = g.subjects(&vocab::rdf_type(), &Term::Iri(vocab::sh("ValidationReport"))).next().unwrap().clone();
        g.insert(Triple::new(node, vocab::sh("conforms"), Literal::boolean(false)));
        assert!(conforms(&g).is_err());
    }

    #[test]
    fn blank_nodes_from_data_and_shapes_stay_apart() {
        let v = Vocabulary::default();
        let mut r = raw("Violation");
        r.focus_node = Term::BlankNode(BlankNode::new("b0"));
        r.source_shape = Term::BlankNode(BlankNode::new("b0"));
        r.value = None;
        let f = focus(Provenance::Default, Term::Iri(v.default.clone()));
        let g = build_report(&[annotate(r, &ex("sg"), &f)], &v);
        let fnode = &g.with_predicate(&vocab::sh("focusNode"))[0].object;
        let snode = &g.with_predicate(&vocab::sh("sourceShape"))[0].object;
        assert_ne!(fnode, snode);
    }
}
