//! SPARQL-based constraints: every solution of the SELECT is a violation
//! for the pre-bound focus node.

use std::collections::BTreeSet;

use super::ast::Query;
use super::{evaluate_with, Binding, SparqlError};
use crate::model::{Iri, Literal, Term};
use crate::report::RawResult;
use crate::shacl::{Path, Shape, ShapeKind};
use crate::view::EvaluationDataset;
use crate::vocab;

#[derive(Debug, Clone, PartialEq)]
pub struct SparqlConstraint {
    /// The `sh:sparql` object node.
    pub node: Term,
    pub select_text: String,
    pub query: Query,
    pub messages: Vec<Literal>,
    pub severity: Iri,
    pub deactivated: bool,
    pub owner_shape: Term,
}

fn render(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.as_str().to_owned(),
        Term::BlankNode(b) => format!("_:{}", b.label()),
        Term::Literal(l) => l.lexical().to_owned(),
    }
}

/// Replaces `{?var}` and `{$var}` by the row's binding for `var`; unbound
/// placeholders stay as written.
pub(crate) fn fill_template(template: &str, row: &Binding) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let after = &rest[start..];
        let sigil = after.chars().nth(1);
        let close = after.find('}');
        match (sigil, close) {
            (Some('?' | '$'), Some(end)) => {
                let name = &after[2..end];
                match row.get(name) {
                    Some(t) => out.push_str(&render(t)),
                    None => out.push_str(&after[..=end]),
                }
                rest = &after[end + 1..];
            }
            _ => {
                out.push('{');
                rest = &after[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Runs the constraint once per focus node, in term order.
pub fn validate_sparql_constraint(
    c: &SparqlConstraint,
    shape: &Shape,
    focus_nodes: &BTreeSet<Term>,
    view: &EvaluationDataset<'_>,
) -> Result<(Vec<RawResult>, Vec<String>), SparqlError> {
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    if c.deactivated {
        return Ok((results, warnings));
    }
    let path_expr = shape.path.as_ref().map(Path::to_sparql);
    for focus in focus_nodes {
        let outcome = evaluate_with(&c.query, view, Some(focus), path_expr.as_ref())?;
        warnings.extend(outcome.warnings);
        for row in outcome.rows {
            let value = row.get("value").cloned().or_else(|| (shape.kind == ShapeKind::Node).then(|| focus.clone()));
            let path = match row.get("path") {
                Some(Term::Iri(p)) => Some(Path::Predicate(p.clone())),
                _ => shape.path.clone(),
            };
            let mut bindings = row.clone();
            bindings.insert("this".to_owned(), focus.clone());
            let messages = c
                .messages
                .iter()
                .map(|m| {
                    let text = fill_template(m.lexical(), &bindings);
                    match m.language() {
                        Some(tag) => Literal::lang(text, tag),
                        None => Literal::typed(text, m.datatype().clone()),
                    }
                })
                .collect();
            results.push(RawResult {
                focus_node: focus.clone(),
                path,
                value,
                component: vocab::sh("SPARQLConstraintComponent"),
                severity: c.severity.clone(),
                messages,
                source_shape: shape.id.clone(),
            });
        }
    }
    warnings.sort();
    warnings.dedup();
    Ok((results, warnings))
}
