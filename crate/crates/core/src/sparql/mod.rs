//! SPARQL-based constraints: a SELECT subset evaluated over evaluation
//! datasets, with `GRAPH`, `FROM` and `FROM NAMED` addressing the data
//! dataset's graphs.

pub mod ast;
mod constraint;
pub mod eval;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use ast::Query;
pub use constraint::{validate_sparql_constraint, SparqlConstraint};
pub use eval::{eval_path, Binding, QueryDataset};

use ast::{GraphPattern, Projection, ProjectionItem};
use eval::{substitute, substitute_expr, Evaluator};

use crate::io::ParseDiagnostic;
use crate::model::{Graph, Term};
use crate::view::EvaluationDataset;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SparqlError {
    #[error("SPARQL syntax error at line {}, column {}: {}", .0.line, .0.column, .0.message)]
    Syntax(ParseDiagnostic),
    #[error("unsupported SPARQL feature at line {line}, column {column}: {feature}")]
    Unsupported { feature: String, line: usize, column: usize },
    #[error("prohibited SPARQL feature(s) in constraint: {}", join(.0))]
    Prohibited(Vec<ProhibitedFeature>),
    #[error("the constraint query never mentions $this")]
    MissingThis,
}

fn join(fs: &[ProhibitedFeature]) -> String {
    fs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Features SHACL-SPARQL forbids in constraint queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProhibitedFeature {
    Minus,
    Service,
    Values,
    ThisRebinding,
    ShapesGraph,
    CurrentShape,
}

impl fmt::Display for ProhibitedFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProhibitedFeature::Minus => "MINUS",
            ProhibitedFeature::Service => "SERVICE",
            ProhibitedFeature::Values => "VALUES",
            ProhibitedFeature::ThisRebinding => "rebinding of $this",
            ProhibitedFeature::ShapesGraph => "$shapesGraph",
            ProhibitedFeature::CurrentShape => "$currentShape",
        })
    }
}

pub fn parse_query(text: &str) -> Result<Query, SparqlError> {
    parser::Parser::new(text).parse_query()
}

/// The distinct prohibited features a query uses, in a fixed order.
pub fn check_prohibited(q: &Query) -> Vec<ProhibitedFeature> {
    let mut found = BTreeSet::new();
    if let Projection::Items(items) = &q.projection {
        for item in items {
            if let ProjectionItem::Expr(e, v) = item {
                if v == "this" {
                    found.insert(ProhibitedFeature::ThisRebinding);
                }
                scan_expr(e, &mut found);
            }
        }
    }
    scan_pattern(&q.pattern, &mut found);
    let vars = q.variables();
    if vars.contains("shapesGraph") {
        found.insert(ProhibitedFeature::ShapesGraph);
    }
    if vars.contains("currentShape") {
        found.insert(ProhibitedFeature::CurrentShape);
    }
    found.into_iter().collect()
}

fn scan_pattern(p: &GraphPattern, found: &mut BTreeSet<ProhibitedFeature>) {
    match p {
        GraphPattern::Bgp(_) => {}
        GraphPattern::Minus(a, b) => {
            found.insert(ProhibitedFeature::Minus);
            scan_pattern(a, found);
            scan_pattern(b, found);
        }
        GraphPattern::Service { inner, .. } => {
            found.insert(ProhibitedFeature::Service);
            scan_pattern(inner, found);
        }
        GraphPattern::Values { .. } => {
            found.insert(ProhibitedFeature::Values);
        }
        GraphPattern::Bind { inner, expr, var } => {
            if var == "this" {
                found.insert(ProhibitedFeature::ThisRebinding);
            }
            scan_expr(expr, found);
            scan_pattern(inner, found);
        }
        GraphPattern::Graph { inner, .. } => scan_pattern(inner, found),
        GraphPattern::Filter { expr, inner } => {
            scan_expr(expr, found);
            scan_pattern(inner, found);
        }
        GraphPattern::Optional(a, b) | GraphPattern::Union(a, b) | GraphPattern::Join(a, b) => {
            scan_pattern(a, found);
            scan_pattern(b, found);
        }
    }
}

fn scan_expr(e: &ast::Expr, found: &mut BTreeSet<ProhibitedFeature>) {
    use ast::Expr;
    match e {
        Expr::Exists(p) | Expr::NotExists(p) => scan_pattern(p, found),
        Expr::Or(a, b) | Expr::And(a, b) | Expr::Compare(_, a, b) => {
            scan_expr(a, found);
            scan_expr(b, found);
        }
        Expr::Not(a) => scan_expr(a, found),
        Expr::In { expr, list, .. } => {
            scan_expr(expr, found);
            list.iter().for_each(|x| scan_expr(x, found));
        }
        Expr::Call(_, args) => args.iter().for_each(|x| scan_expr(x, found)),
        Expr::Var(_) | Expr::Const(_) => {}
    }
}

/// Parses a constraint query and runs the prohibition gate. The query must
/// mention `$this`.
pub fn prepare(text: &str) -> Result<Query, SparqlError> {
    let q = parse_query(text)?;
    let bad = check_prohibited(&q);
    if !bad.is_empty() {
        return Err(SparqlError::Prohibited(bad));
    }
    if !q.variables().contains("this") {
        return Err(SparqlError::MissingThis);
    }
    Ok(q)
}

/// Solutions of a SELECT plus non-fatal diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectOutcome {
    pub rows: Vec<Binding>,
    pub warnings: Vec<String>,
}

/// Builds the dataset a query sees: the view itself, or the graphs its
/// `FROM` / `FROM NAMED` clauses pick from the view.
pub fn query_dataset(q: &Query, view: &EvaluationDataset<'_>, warnings: &mut Vec<String>) -> QueryDataset {
    let v = &view.view;
    if q.from.is_empty() && q.from_named.is_empty() {
        let named = v.named_graph_names().map(|n| (n.clone(), v.named_graph_arc(n).expect("listed").clone())).collect();
        return QueryDataset { default: v.default_graph_arc().clone(), named };
    }
    let mut default = Graph::new();
    for iri in &q.from {
        match v.named_graph(iri) {
            Some(g) => default = default.union(g),
            None => warnings.push(format!("FROM {iri} names no graph of the evaluation dataset; using an empty graph")),
        }
    }
    let mut named = BTreeMap::new();
    for iri in &q.from_named {
        match v.named_graph_arc(iri) {
            Some(g) => {
                named.insert(iri.clone(), g.clone());
            }
            None => warnings.push(format!("FROM NAMED {iri} names no graph of the evaluation dataset")),
        }
    }
    QueryDataset { default: Arc::new(default), named }
}

/// Evaluates a query over a view with `$this` optionally pre-bound. Rows
/// come back sorted and hold the projected variables only.
pub fn evaluate_select(q: &Query, view: &EvaluationDataset<'_>, this: Option<&Term>) -> Result<SelectOutcome, SparqlError> {
    evaluate_with(q, view, this, None)
}

pub(crate) fn evaluate_with(
    q: &Query,
    view: &EvaluationDataset<'_>,
    this: Option<&Term>,
    path: Option<&ast::PathExpr>,
) -> Result<SelectOutcome, SparqlError> {
    let bad = check_prohibited(q);
    if !bad.is_empty() {
        return Err(SparqlError::Prohibited(bad));
    }
    let mut warnings = Vec::new();
    let ds = query_dataset(q, view, &mut warnings);
    let mut consts = BTreeMap::new();
    if let Some(t) = this {
        consts.insert("this".to_owned(), t.clone());
    }
    let pattern = substitute(&q.pattern, &consts, path);
    let ev = Evaluator::new(&ds);
    let solutions = ev.eval(&pattern, &ds.default, vec![Binding::new()]);
    let mut rows = Vec::with_capacity(solutions.len());
    for mut sol in solutions {
        if let Some(t) = this {
            sol.insert("this".to_owned(), t.clone());
        }
        let row: Binding = match &q.projection {
            Projection::All => sol.into_iter().filter(|(k, _)| !k.starts_with("_:")).collect(),
            Projection::Items(items) => {
                let mut row = Binding::new();
                for item in items {
                    let value = match item {
                        ProjectionItem::Var(v) => sol.get(v).cloned(),
                        ProjectionItem::Expr(e, _) => ev.eval_expr(&substitute_expr(e, &consts, path), &sol, &ds.default).ok(),
                    };
                    if let Some(t) = value {
                        row.insert(item.var().to_owned(), t);
                    }
                }
                row
            }
        };
        rows.push(row);
    }
    rows.sort();
    if q.distinct {
        rows.dedup();
    }
    Ok(SelectOutcome { rows, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_names_features() {
        let cases = [
            ("SELECT $this { $this ?p ?o MINUS { $this ?p 1 } }", ProhibitedFeature::Minus),
            ("SELECT $this { SERVICE <http://x/> { $this ?p ?o } }", ProhibitedFeature::Service),
            ("SELECT $this { VALUES ?o { 1 } $this ?p ?o }", ProhibitedFeature::Values),
            ("SELECT $this { ?x ?p ?o BIND(?x AS ?this) }", ProhibitedFeature::ThisRebinding),
            ("SELECT (?x AS ?this) { ?x ?p ?o }", ProhibitedFeature::ThisRebinding),
            ("SELECT $this { GRAPH $shapesGraph { $this ?p ?o } }", ProhibitedFeature::ShapesGraph),
            ("SELECT $this { $this ?p $currentShape }", ProhibitedFeature::CurrentShape),
        ];
        for (q, f) in cases {
            assert_eq!(prepare(q), Err(SparqlError::Prohibited(vec![f])), "{q}");
        }
        assert!(check_prohibited(&parse_query("SELECT $this { $this ?p ?o }").unwrap()).is_empty());
        assert_eq!(prepare("SELECT ?x { ?x ?p ?o }"), Err(SparqlError::MissingThis));
    }

    #[test]
    fn nested_prohibitions_are_found() {
        let q = parse_query("SELECT $this { $this ?p ?o FILTER NOT EXISTS { $this ?q ?r MINUS { ?r ?s ?t } } }").unwrap();
        assert_eq!(check_prohibited(&q), vec![ProhibitedFeature::Minus]);
    }
}
