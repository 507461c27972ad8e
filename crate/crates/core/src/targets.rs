//! Target resolution: which graphs of a data dataset a shapes graph
//! validates.
//!
//! The focus graphs of a shapes graph are its direct targets (inclusions
//! minus exclusions, compared by graph name) plus one derived graph per
//! combination declaration. Exclusions never remove derived graphs.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use regex::Regex;

use crate::model::{graph_difference, graph_intersection, graph_union, Dataset, Graph, Iri, Term};
use crate::shapes_dataset::{CombinationExpr, GraphRef, ShapesDataset, TargetDeclarationSet};
use crate::vocab::{Vocabulary, DERIVED_PREFIX};

/// Where a focus graph comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Default,
    Named(Iri),
    Combination(CombinationExpr),
}

/// A graph to validate, with its origin and an identifier.
#[derive(Debug, Clone)]
pub struct FocusGraph {
    pub triples: Arc<Graph>,
    pub provenance: Provenance,
    /// The graph IRI, `shds:default`, or a minted `urn:shaclds:derived:<n>`.
    pub derived_id: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TargetError {
    #[error("invalid graph pattern {pattern:?}: {message}")]
    InvalidPattern { pattern: String, message: String },
    #[error("{0} is not allowed as an operand of shds:minus")]
    ReservedInMinus(GraphRef),
    #[error("{0} cannot be a graph combination on its own")]
    ReservedLeaf(GraphRef),
}

/// Mints identifiers for combination-derived graphs. One instance per
/// validation run keeps numbering deterministic.
#[derive(Debug, Default)]
pub struct DerivedIds {
    next: AtomicU64,
}

impl DerivedIds {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh IRI that is not the name of any graph of `d`.
    pub fn fresh(&self, d: &Dataset) -> Iri {
        loop {
            let n = self.next.fetch_add(1, Ordering::Relaxed);
            let iri = Iri::new_unchecked(format!("{DERIVED_PREFIX}{n}"));
            if !d.contains_named(&iri) {
                return iri;
            }
        }
    }
}

fn focus_for(provenance: Provenance, triples: Arc<Graph>, vocab: &Vocabulary) -> FocusGraph {
    let derived_id = match &provenance {
        Provenance::Default => Term::Iri(vocab.default.clone()),
        Provenance::Named(iri) => Term::Iri(iri.clone()),
        Provenance::Combination(_) => unreachable!("combinations get fresh ids"),
    };
    FocusGraph { triples, provenance, derived_id }
}

/// Expands a graph reference over `d`. A missing named graph expands to
/// nothing and adds a warning.
pub fn expand_reserved(r: &GraphRef, d: &Dataset, warnings: &mut Vec<String>) -> Vec<(Provenance, Arc<Graph>)> {
    let named = || d.named_graph_names().map(|n| (Provenance::Named(n.clone()), d.named_graph_arc(n).expect("listed").clone()));
    match r {
        GraphRef::Default => vec![(Provenance::Default, d.default_graph_arc().clone())],
        GraphRef::AllNamed => named().collect(),
        GraphRef::All => std::iter::once((Provenance::Default, d.default_graph_arc().clone())).chain(named()).collect(),
        GraphRef::Named(iri) => match d.named_graph_arc(iri) {
            Some(g) => vec![(Provenance::Named(iri.clone()), g.clone())],
            None => {
                warnings.push(format!("target graph {iri} is not a graph of the data dataset"));
                Vec::new()
            }
        },
    }
}

fn compile(pattern: &str) -> Result<Regex, TargetError> {
    Regex::new(pattern).map_err(|e| TargetError::InvalidPattern { pattern: pattern.to_owned(), message: e.to_string() })
}

fn collect_side(
    refs: &std::collections::BTreeSet<GraphRef>,
    patterns: &std::collections::BTreeSet<String>,
    d: &Dataset,
    warnings: &mut Vec<String>,
) -> Result<BTreeMap<Provenance, Arc<Graph>>, TargetError> {
    let mut out = BTreeMap::new();
    for r in refs {
        out.extend(expand_reserved(r, d, warnings));
    }
    for p in patterns {
        let re = compile(p)?;
        for (name, _) in d.named_graphs() {
            if re.is_match(name.as_str()) {
                out.insert(Provenance::Named(name.clone()), d.named_graph_arc(name).expect("listed").clone());
            }
        }
    }
    Ok(out)
}

/// Inclusions minus exclusions, compared by graph identity. The default
/// graph comes first, then named graphs in IRI order.
pub fn direct_targets(
    decl: &TargetDeclarationSet,
    d: &Dataset,
    vocab: &Vocabulary,
    warnings: &mut Vec<String>,
) -> Result<Vec<FocusGraph>, TargetError> {
    let included = collect_side(&decl.includes, &decl.include_patterns, d, warnings)?;
    let excluded = collect_side(&decl.excludes, &decl.exclude_patterns, d, &mut Vec::new())?;
    Ok(included
        .into_iter()
        .filter(|(p, _)| !excluded.contains_key(p))
        .map(|(p, g)| focus_for(p, g, vocab))
        .collect())
}

fn operands(xs: &[CombinationExpr], d: &Dataset, warnings: &mut Vec<String>) -> Result<Vec<Arc<Graph>>, TargetError> {
    let mut out = Vec::new();
    for x in xs {
        match x {
            CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) => {
                out.extend(expand_reserved(r, d, warnings).into_iter().map(|(_, g)| g));
            }
            other => out.push(eval(other, d, warnings)?),
        }
    }
    Ok(out)
}

fn eval(expr: &CombinationExpr, d: &Dataset, warnings: &mut Vec<String>) -> Result<Arc<Graph>, TargetError> {
    match expr {
        CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) => Err(TargetError::ReservedLeaf(r.clone())),
        CombinationExpr::Leaf(r) => {
            Ok(expand_reserved(r, d, warnings).into_iter().next().map(|(_, g)| g).unwrap_or_default())
        }
        CombinationExpr::Or(xs) => {
            let graphs = operands(xs, d, warnings)?;
            Ok(fold(graphs, graph_union))
        }
        CombinationExpr::And(xs) => {
            let graphs = operands(xs, d, warnings)?;
            Ok(fold(graphs, graph_intersection))
        }
        CombinationExpr::Minus(a, b) => {
            for x in [a, b] {
                if let CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) = x.as_ref() {
                    return Err(TargetError::ReservedInMinus(r.clone()));
                }
            }
            let left = eval(a, d, warnings)?;
            let right = eval(b, d, warnings)?;
            Ok(Arc::new(graph_difference(&left, &right)))
        }
    }
}

/// Folds operand graphs with a set operation. No operands (for example
/// `shds:named` over a dataset without named graphs) gives the empty graph.
fn fold(graphs: Vec<Arc<Graph>>, op: fn(&Graph, &Graph) -> Graph) -> Arc<Graph> {
    let mut it = graphs.into_iter();
    let Some(first) = it.next() else {
        return Arc::default();
    };
    it.fold(first, |acc, g| Arc::new(op(&acc, &g)))
}

/// Evaluates a combination to its single derived graph.
pub fn evaluate_combination(
    expr: &CombinationExpr,
    d: &Dataset,
    ids: &DerivedIds,
    warnings: &mut Vec<String>,
) -> Result<FocusGraph, TargetError> {
    let triples = eval(expr, d, warnings)?;
    Ok(FocusGraph { triples, provenance: Provenance::Combination(expr.clone()), derived_id: Term::Iri(ids.fresh(d)) })
}

/// All focus graphs of one shapes graph: direct targets first, then one
/// derived graph per combination declaration.
pub fn resolve_targets(
    shapes_graph: &Iri,
    sd: &ShapesDataset,
    d: &Dataset,
    ids: &DerivedIds,
    warnings: &mut Vec<String>,
) -> Result<Vec<FocusGraph>, TargetError> {
    let Some(decl) = sd.declaration(shapes_graph) else {
        return Ok(Vec::new());
    };
    let mut out = direct_targets(decl, d, &sd.vocab, warnings)?;
    for c in &decl.combinations {
        out.push(evaluate_combination(c, d, ids, warnings)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_dataset, RdfFormat};
    use crate::model::Triple;
    use crate::shapes_dataset::extract_declarations;
    use std::collections::BTreeSet;

    fn ex(local: &str) -> Iri {
        Iri::new_unchecked(format!("http://example.org/{local}"))
    }

    fn famous_dataset() -> Dataset {
        parse_dataset(
            br#"@prefix ex: <http://example.org/> .
            @prefix foaf: <http://xmlns.com/foaf/0.1/> .
            ex:Alice a foaf:Person ; foaf:knows ex:Yara .
            ex:Yara foaf:knows ex:Zoe .
            ex:Bob a foaf:Person .
            ex:City1Graph {
                ex:Bob foaf:knows ex:Yara .
                ex:David a foaf:Person .
                ex:Carol a foaf:Person ; foaf:knows ex:Zoe .
            }
            ex:famous { ex:Zoe a ex:FamousPerson . }
            "#,
            RdfFormat::TriG,
        )
        .unwrap()
    }

    fn decl(includes: &[GraphRef], excludes: &[GraphRef]) -> TargetDeclarationSet {
        TargetDeclarationSet {
            includes: includes.iter().cloned().collect(),
            excludes: excludes.iter().cloned().collect(),
            ..Default::default()
        }
    }

    fn provenances(fs: &[FocusGraph]) -> Vec<Provenance> {
        fs.iter().map(|f| f.provenance.clone()).collect()
    }

    #[test]
    fn expand_reserved_counts() {
        let d = famous_dataset();
        let mut w = Vec::new();
        assert_eq!(expand_reserved(&GraphRef::All, &d, &mut w).len(), 3);
        assert_eq!(expand_reserved(&GraphRef::AllNamed, &d, &mut w).len(), 2);
        let def = expand_reserved(&GraphRef::Default, &d, &mut w);
        assert_eq!(def.len(), 1);
        assert_eq!(def[0].0, Provenance::Default);
        assert!(w.is_empty());
        assert!(expand_reserved(&GraphRef::Named(ex("missing")), &d, &mut w).is_empty());
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn all_except_famous() {
        let d = famous_dataset();
        let v = Vocabulary::default();
        let got = direct_targets(&decl(&[GraphRef::All], &[GraphRef::Named(ex("famous"))]), &d, &v, &mut Vec::new()).unwrap();
        assert_eq!(provenances(&got), vec![Provenance::Default, Provenance::Named(ex("City1Graph"))]);
        assert_eq!(got[0].derived_id, Term::Iri(v.default.clone()));
    }

    #[test]
    fn named_and_self_cancel() {
        let d = famous_dataset();
        let v = Vocabulary::default();
        let got = direct_targets(&decl(&[GraphRef::AllNamed], &[]), &d, &v, &mut Vec::new()).unwrap();
        assert_eq!(got.len(), 2);
        let got = direct_targets(&decl(&[GraphRef::Default], &[GraphRef::Default]), &d, &v, &mut Vec::new()).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn patterns_are_unanchored_and_skip_default() {
        let d = famous_dataset();
        let v = Vocabulary::default();
        let mut dec = TargetDeclarationSet::default();
        dec.include_patterns.insert("City".into());
        let got = direct_targets(&dec, &d, &v, &mut Vec::new()).unwrap();
        assert_eq!(provenances(&got), vec![Provenance::Named(ex("City1Graph"))]);
        dec.include_patterns.insert(".*".into());
        dec.exclude_patterns.insert("famous$".into());
        let got = direct_targets(&dec, &d, &v, &mut Vec::new()).unwrap();
        assert_eq!(provenances(&got), vec![Provenance::Named(ex("City1Graph"))]);
        dec.include_patterns.insert("(".into());
        assert!(matches!(direct_targets(&dec, &d, &v, &mut Vec::new()), Err(TargetError::InvalidPattern { .. })));
    }

    #[test]
    fn union_of_default_and_city() {
        let d = famous_dataset();
        let ids = DerivedIds::new();
        let expr = CombinationExpr::Or(vec![
            CombinationExpr::Leaf(GraphRef::Default),
            CombinationExpr::Leaf(GraphRef::Named(ex("City1Graph"))),
        ]);
        let f = evaluate_combination(&expr, &d, &ids, &mut Vec::new()).unwrap();
        assert_eq!(f.triples.len(), d.default_graph().len() + 4);
        let knows = Iri::new_unchecked("http://xmlns.com/foaf/0.1/knows");
        assert!(f.triples.contains(&Triple::new(ex("Bob"), knows, ex("Yara"))));
        assert_eq!(f.derived_id, Term::Iri(Iri::new_unchecked("urn:shaclds:derived:0")));
    }

    #[test]
    fn idempotent_and_fresh() {
        let d = famous_dataset();
        let ids = DerivedIds::new();
        let g = CombinationExpr::Leaf(GraphRef::Named(ex("City1Graph")));
        let expr = CombinationExpr::And(vec![g.clone(), g]);
        let a = evaluate_combination(&expr, &d, &ids, &mut Vec::new()).unwrap();
        let b = evaluate_combination(&expr, &d, &ids, &mut Vec::new()).unwrap();
        assert_eq!(a.triples.as_ref(), d.named_graph(&ex("City1Graph")).unwrap());
        assert_eq!(a.triples, b.triples);
        assert_ne!(a.derived_id, b.derived_id);
    }

    #[test]
    fn fresh_ids_avoid_named_graphs() {
        let mut d = Dataset::new();
        d.insert_named(Iri::new_unchecked("urn:shaclds:derived:0"), Graph::new());
        let ids = DerivedIds::new();
        assert_eq!(ids.fresh(&d).as_str(), "urn:shaclds:derived:1");
    }

    #[test]
    fn union_of_all_minus_one() {
        let d = famous_dataset();
        let expr = CombinationExpr::Minus(
            Box::new(CombinationExpr::Or(vec![CombinationExpr::Leaf(GraphRef::All)])),
            Box::new(CombinationExpr::Leaf(GraphRef::Named(ex("City1Graph")))),
        );
        let f = evaluate_combination(&expr, &d, &DerivedIds::new(), &mut Vec::new()).unwrap();
        // Brute force: every triple of any graph, minus those of City1Graph.
        let mut expected = BTreeSet::new();
        for (_, g) in d.graphs_of() {
            for t in g.iter() {
                if !d.named_graph(&ex("City1Graph")).unwrap().iter().any(|u| u == t) {
                    expected.insert(t.clone());
                }
            }
        }
        let got: BTreeSet<Triple> = f.triples.iter().cloned().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn reserved_sets_in_minus_are_rejected() {
        let d = famous_dataset();
        let expr = CombinationExpr::Minus(
            Box::new(CombinationExpr::Leaf(GraphRef::AllNamed)),
            Box::new(CombinationExpr::Leaf(GraphRef::Default)),
        );
        assert_eq!(
            evaluate_combination(&expr, &d, &DerivedIds::new(), &mut Vec::new()).unwrap_err(),
            TargetError::ReservedInMinus(GraphRef::AllNamed)
        );
    }

    #[test]
    fn and_over_no_named_graphs_is_empty() {
        let mut d = Dataset::new();
        d.set_default_graph(famous_dataset().default_graph().clone());
        let expr = CombinationExpr::And(vec![CombinationExpr::Leaf(GraphRef::AllNamed)]);
        let f = evaluate_combination(&expr, &d, &DerivedIds::new(), &mut Vec::new()).unwrap();
        assert!(f.triples.is_empty());
    }

    #[test]
    fn resolve_keeps_combinations_despite_exclusion() {
        let shapes = parse_dataset(
            br#"@prefix shds: <http://www.w3id.org/shacl-ds#> .
            @prefix ex: <http://example.org/> .
            ex:sg shds:targetGraph shds:all ;
                shds:targetGraphExclude ex:City1Graph ;
                shds:targetGraphCombination [ shds:or ( shds:default ex:City1Graph ) ] .
            ex:empty shds:targetGraph ex:nothing .
            ex:sg { }
            "#,
            RdfFormat::TriG,
        )
        .unwrap();
        let sd = extract_declarations(&shapes, &Vocabulary::default()).unwrap();
        let d = famous_dataset();
        let ids = DerivedIds::new();
        let got = resolve_targets(&ex("sg"), &sd, &d, &ids, &mut Vec::new()).unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].provenance, Provenance::Default);
        assert_eq!(got[1].provenance, Provenance::Named(ex("famous")));
        assert!(matches!(got[2].provenance, Provenance::Combination(_)));
        assert!(got[2].triples.iter().any(|t| d.named_graph(&ex("City1Graph")).unwrap().contains(t)));
        let mut w = Vec::new();
        assert!(resolve_targets(&ex("empty"), &sd, &d, &ids, &mut w).unwrap().is_empty());
        assert_eq!(w.len(), 1);
        assert!(resolve_targets(&ex("undeclared"), &sd, &d, &ids, &mut w).unwrap().is_empty());
    }
}
