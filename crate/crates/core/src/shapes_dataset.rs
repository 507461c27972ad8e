//! Shapes datasets: target declarations per shapes graph, combination
//! expression trees, and structural well-formedness checks.
//!
//! Targeting triples are read from the default graph of the shapes dataset
//! and from inside every named graph. The subject IRI names the shapes graph
//! the declaration applies to, whichever graph the triple lives in.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use regex::Regex;

use crate::model::{BlankNode, Dataset, Graph, Iri, Term, Triple};
use crate::vocab::{rdf, Vocabulary};

/// A reference to one graph of the data dataset, or one of the reserved
/// graph sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphRef {
    Named(Iri),
    /// `shds:default`
    Default,
    /// `shds:named`
    AllNamed,
    /// `shds:all`
    All,
}

impl GraphRef {
    pub fn from_iri(iri: &Iri, vocab: &Vocabulary) -> Self {
        if iri == &vocab.default {
            GraphRef::Default
        } else if iri == &vocab.named {
            GraphRef::AllNamed
        } else if iri == &vocab.all {
            GraphRef::All
        } else {
            GraphRef::Named(iri.clone())
        }
    }

    pub fn to_iri(&self, vocab: &Vocabulary) -> Iri {
        match self {
            GraphRef::Named(iri) => iri.clone(),
            GraphRef::Default => vocab.default.clone(),
            GraphRef::AllNamed => vocab.named.clone(),
            GraphRef::All => vocab.all.clone(),
        }
    }

    pub fn is_reserved(&self) -> bool {
        !matches!(self, GraphRef::Named(_))
    }
}

impl fmt::Display for GraphRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphRef::Named(iri) => write!(f, "{iri}"),
            GraphRef::Default => f.write_str("shds:default"),
            GraphRef::AllNamed => f.write_str("shds:named"),
            GraphRef::All => f.write_str("shds:all"),
        }
    }
}

/// Expression tree of a `shds:targetGraphCombination` declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CombinationExpr {
    Leaf(GraphRef),
    /// Intersection of one or more operands.
    And(Vec<CombinationExpr>),
    /// Union of one or more operands.
    Or(Vec<CombinationExpr>),
    /// Difference of exactly two operands.
    Minus(Box<CombinationExpr>, Box<CombinationExpr>),
}

impl CombinationExpr {
    pub fn depth(&self) -> usize {
        match self {
            CombinationExpr::Leaf(_) => 0,
            CombinationExpr::And(xs) | CombinationExpr::Or(xs) => 1 + xs.iter().map(Self::depth).max().unwrap_or(0),
            CombinationExpr::Minus(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Writes the expression as RDF (operator triples over RDF lists) and
    /// returns the node standing for it. Leaves are written as their IRI.
    pub fn write_rdf(&self, graph: &mut Graph, vocab: &Vocabulary, fresh: &mut dyn FnMut() -> BlankNode) -> Term {
        let (op, operands): (&Iri, Vec<&CombinationExpr>) = match self {
            CombinationExpr::Leaf(r) => return Term::Iri(r.to_iri(vocab)),
            CombinationExpr::And(xs) => (&vocab.and, xs.iter().collect()),
            CombinationExpr::Or(xs) => (&vocab.or, xs.iter().collect()),
            CombinationExpr::Minus(a, b) => (&vocab.minus, vec![a.as_ref(), b.as_ref()]),
        };
        let node = Term::BlankNode(fresh());
        let items: Vec<Term> = operands.into_iter().map(|x| x.write_rdf(graph, vocab, fresh)).collect();
        let cells: Vec<Term> = items.iter().map(|_| Term::BlankNode(fresh())).collect();
        let mut head = Term::Iri(Iri::new_unchecked(rdf::NIL));
        for (cell, item) in cells.iter().zip(items).rev() {
            graph.insert(Triple::new(cell.clone(), Iri::new_unchecked(rdf::FIRST), item));
            graph.insert(Triple::new(cell.clone(), Iri::new_unchecked(rdf::REST), head));
            head = cell.clone();
        }
        graph.insert(Triple::new(node.clone(), op.clone(), head));
        node
    }
}

impl fmt::Display for CombinationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, xs: &[&CombinationExpr]| {
            write!(f, "{name}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            CombinationExpr::Leaf(r) => write!(f, "{r}"),
            CombinationExpr::And(xs) => list(f, "and", &xs.iter().collect::<Vec<_>>()),
            CombinationExpr::Or(xs) => list(f, "or", &xs.iter().collect::<Vec<_>>()),
            CombinationExpr::Minus(a, b) => list(f, "minus", &[a, b]),
        }
    }
}

/// Everything declared for one shapes graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TargetDeclarationSet {
    pub includes: BTreeSet<GraphRef>,
    pub excludes: BTreeSet<GraphRef>,
    pub include_patterns: BTreeSet<String>,
    pub exclude_patterns: BTreeSet<String>,
    /// Sorted and deduplicated by expression structure.
    pub combinations: Vec<CombinationExpr>,
}

impl TargetDeclarationSet {
    pub fn is_empty(&self) -> bool {
        self.includes.is_empty() && self.include_patterns.is_empty() && self.combinations.is_empty()
    }
}

/// A structural problem with a targeting triple.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}: {subject} {predicate} {object}: {message}", graph.as_ref().map(|g| g.to_string()).unwrap_or_else(|| "default graph".into()))]
pub struct WellformednessViolation {
    /// Graph of the shapes dataset holding the triple; `None` for the default graph.
    pub graph: Option<Iri>,
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapesDatasetError {
    #[error("ill-formed target declaration: {0}")]
    IllFormed(Box<WellformednessViolation>),
}

/// A shapes dataset together with the declarations extracted from it.
#[derive(Debug, Clone)]
pub struct ShapesDataset {
    pub underlying: Dataset,
    pub declarations: BTreeMap<Iri, TargetDeclarationSet>,
    pub vocab: Vocabulary,
}

impl ShapesDataset {
    pub fn declaration(&self, shapes_graph: &Iri) -> Option<&TargetDeclarationSet> {
        self.declarations.get(shapes_graph)
    }

    /// Named graphs of the shapes dataset.
    pub fn shapes_graph_names(&self) -> impl Iterator<Item = &Iri> {
        self.underlying.named_graph_names()
    }
}

enum Declaration {
    Include(GraphRef),
    Exclude(GraphRef),
    IncludePattern(String),
    ExcludePattern(String),
    Combination(CombinationExpr),
}

/// All targeting triples of the dataset with the graph they were found in.
fn targeting_triples<'a>(ds: &'a Dataset, vocab: &'a Vocabulary) -> Vec<(Option<&'a Iri>, &'a Graph, &'a Triple)> {
    let mut out = Vec::new();
    for (name, graph) in ds.graphs_of() {
        let mut triples: Vec<&Triple> = graph.iter().filter(|t| vocab.is_targeting_predicate(&t.predicate)).collect();
        triples.sort();
        out.extend(triples.into_iter().map(|t| (name, graph, t)));
    }
    out
}

fn interpret(triple: &Triple, graph: &Graph, vocab: &Vocabulary) -> Result<Declaration, String> {
    if !triple.subject.is_iri() {
        return Err("the subject of a targeting triple must be the IRI of a shapes graph".into());
    }
    let p = &triple.predicate;
    if p == &vocab.target_graph || p == &vocab.target_graph_exclude {
        let iri = triple.object.as_iri().ok_or("target graphs must be IRIs")?;
        let r = GraphRef::from_iri(iri, vocab);
        Ok(if p == &vocab.target_graph { Declaration::Include(r) } else { Declaration::Exclude(r) })
    } else if p == &vocab.target_graph_pattern || p == &vocab.target_graph_pattern_exclude {
        let lit = triple.object.as_literal().ok_or("graph patterns must be string literals")?;
        Regex::new(lit.lexical()).map_err(|e| format!("invalid graph pattern: {e}"))?;
        let pattern = lit.lexical().to_owned();
        Ok(if p == &vocab.target_graph_pattern {
            Declaration::IncludePattern(pattern)
        } else {
            Declaration::ExcludePattern(pattern)
        })
    } else {
        let expr = parse_combination(&triple.object, graph, vocab)?;
        if let CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) = &expr {
            return Err(format!(
                "{r} denotes several graphs and cannot be a graph combination on its own; wrap it in shds:or or shds:and"
            ));
        }
        Ok(Declaration::Combination(expr))
    }
}

/// Reads every targeting triple of a shapes dataset into per-shapes-graph
/// declaration sets. The first ill-formed triple aborts extraction; use
/// [`check_wellformed`] to list all of them.
pub fn extract_declarations(ds: &Dataset, vocab: &Vocabulary) -> Result<ShapesDataset, ShapesDatasetError> {
    let mut declarations: BTreeMap<Iri, TargetDeclarationSet> = BTreeMap::new();
    for (name, graph, triple) in targeting_triples(ds, vocab) {
        let decl = interpret(triple, graph, vocab).map_err(|message| {
            ShapesDatasetError::IllFormed(Box::new(WellformednessViolation {
                graph: name.cloned(),
                subject: triple.subject.clone(),
                predicate: triple.predicate.clone(),
                object: triple.object.clone(),
                message,
            }))
        })?;
        let subject = triple.subject.as_iri().expect("checked by interpret").clone();
        let set = declarations.entry(subject).or_default();
        match decl {
            Declaration::Include(r) => {
                set.includes.insert(r);
            }
            Declaration::Exclude(r) => {
                set.excludes.insert(r);
            }
            Declaration::IncludePattern(p) => {
                set.include_patterns.insert(p);
            }
            Declaration::ExcludePattern(p) => {
                set.exclude_patterns.insert(p);
            }
            Declaration::Combination(c) => set.combinations.push(c),
        }
    }
    for set in declarations.values_mut() {
        set.combinations.sort();
        set.combinations.dedup();
    }
    // Named shapes graphs without any declaration are listed with an empty set.
    for name in ds.named_graph_names() {
        declarations.entry(name.clone()).or_default();
    }
    Ok(ShapesDataset { underlying: ds.clone(), declarations, vocab: vocab.clone() })
}

/// Lists the structural problems of a shapes dataset's declarations. With
/// `data` supplied, plain graph IRIs must also name a graph of that dataset.
pub fn check_wellformed(ds: &Dataset, data: Option<&Dataset>, vocab: &Vocabulary) -> Vec<WellformednessViolation> {
    let mut out = Vec::new();
    for (name, graph, triple) in targeting_triples(ds, vocab) {
        let violation = |message: String| WellformednessViolation {
            graph: name.cloned(),
            subject: triple.subject.clone(),
            predicate: triple.predicate.clone(),
            object: triple.object.clone(),
            message,
        };
        match interpret(triple, graph, vocab) {
            Err(message) => out.push(violation(message)),
            Ok(decl) => {
                let Some(data) = data else { continue };
                let mut refs = Vec::new();
                match &decl {
                    Declaration::Include(r) | Declaration::Exclude(r) => refs.push(r.clone()),
                    Declaration::Combination(c) => collect_refs(c, &mut refs),
                    _ => {}
                }
                for r in refs {
                    if let GraphRef::Named(iri) = r {
                        if !data.contains_named(&iri) {
                            out.push(violation(format!("{iri} is not a named graph of the data dataset")));
                        }
                    }
                }
            }
        }
    }
    out
}

fn collect_refs(expr: &CombinationExpr, out: &mut Vec<GraphRef>) {
    match expr {
        CombinationExpr::Leaf(r) => out.push(r.clone()),
        CombinationExpr::And(xs) | CombinationExpr::Or(xs) => xs.iter().for_each(|x| collect_refs(x, out)),
        CombinationExpr::Minus(a, b) => {
            collect_refs(a, out);
            collect_refs(b, out);
        }
    }
}

/// Parses the object of a `shds:targetGraphCombination` triple.
pub fn parse_combination(node: &Term, graph: &Graph, vocab: &Vocabulary) -> Result<CombinationExpr, String> {
    let mut active = HashSet::new();
    parse_node(node, graph, vocab, &mut active)
}

fn parse_node(node: &Term, graph: &Graph, vocab: &Vocabulary, active: &mut HashSet<Term>) -> Result<CombinationExpr, String> {
    match node {
        Term::Iri(iri) => Ok(CombinationExpr::Leaf(GraphRef::from_iri(iri, vocab))),
        Term::Literal(l) => Err(format!("literal {l} is not a graph combination")),
        Term::BlankNode(_) => {
            if !active.insert(node.clone()) {
                return Err(format!("combination {node} contains itself"));
            }
            let ops = [&vocab.and, &vocab.or, &vocab.minus];
            let found: Vec<&Triple> = graph.with_subject(node).iter().filter(|t| ops.contains(&&t.predicate)).collect();
            if found.len() != 1 {
                return Err(format!(
                    "combination {node} must have exactly one of shds:and, shds:or, shds:minus (found {})",
                    found.len()
                ));
            }
            let op = &found[0].predicate;
            let items = read_list(&found[0].object, graph)?;
            let operands = items
                .iter()
                .map(|item| parse_node(item, graph, vocab, active))
                .collect::<Result<Vec<_>, _>>()?;
            active.remove(node);
            if op == &vocab.minus {
                if operands.len() != 2 {
                    return Err(format!("shds:minus takes exactly two operands (found {})", operands.len()));
                }
                for x in &operands {
                    if let CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) = x {
                        return Err(format!("{r} is not allowed as an operand of shds:minus; only shds:default is"));
                    }
                }
                let mut it = operands.into_iter();
                let a = it.next().expect("two operands");
                let b = it.next().expect("two operands");
                Ok(CombinationExpr::Minus(Box::new(a), Box::new(b)))
            } else {
                if operands.is_empty() {
                    return Err(format!("{} needs at least one operand", if op == &vocab.and { "shds:and" } else { "shds:or" }));
                }
                Ok(if op == &vocab.and { CombinationExpr::And(operands) } else { CombinationExpr::Or(operands) })
            }
        }
    }
}

/// Reads a well-formed RDF list: every cell is a blank node with exactly one
/// `rdf:first` and one `rdf:rest`, ending in `rdf:nil`, without cycles.
pub fn read_list(head: &Term, graph: &Graph) -> Result<Vec<Term>, String> {
    let first = Iri::new_unchecked(rdf::FIRST);
    let rest = Iri::new_unchecked(rdf::REST);
    let nil = Term::Iri(Iri::new_unchecked(rdf::NIL));
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    let mut cell = head.clone();
    while cell != nil {
        if !cell.is_blank_node() {
            return Err(format!("{cell} is not a well-formed RDF list"));
        }
        if !seen.insert(cell.clone()) {
            return Err("RDF list contains a cycle".into());
        }
        let firsts: Vec<&Term> = graph.objects(&cell, &first).collect();
        let rests: Vec<&Term> = graph.objects(&cell, &rest).collect();
        if firsts.len() != 1 || rests.len() != 1 {
            return Err(format!("list cell {cell} must have exactly one rdf:first and one rdf:rest"));
        }
        items.push(firsts[0].clone());
        cell = rests[0].clone();
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_dataset, RdfFormat};

    const PREFIXES: &str = "@prefix shds: <http://www.w3id.org/shacl-ds#> .\n\
        @prefix sh: <http://www.w3.org/ns/shacl#> .\n\
        @prefix ex: <http://example.org/> .\n\
        @prefix s: <http://example.org/shapes/> .\n\
        @prefix foaf: <http://xmlns.com/foaf/0.1/> .\n";

    fn ds(body: &str) -> Dataset {
        parse_dataset(format!("{PREFIXES}{body}").as_bytes(), RdfFormat::TriG).unwrap()
    }

    fn s(local: &str) -> Iri {
        Iri::new_unchecked(format!("http://example.org/shapes/{local}"))
    }

    fn ex(local: &str) -> Iri {
        Iri::new_unchecked(format!("http://example.org/{local}"))
    }

    #[test]
    fn reserved_named_target() {
        let sd = extract_declarations(&ds("s:graph1 shds:targetGraph shds:named ."), &Vocabulary::default()).unwrap();
        let decl = sd.declaration(&s("graph1")).unwrap();
        assert_eq!(decl.includes, BTreeSet::from([GraphRef::AllNamed]));
    }

    #[test]
    fn no_targeting_triples() {
        let sd = extract_declarations(&ds("s:g1 { s:S a sh:NodeShape . }"), &Vocabulary::default()).unwrap();
        assert!(sd.declaration(&s("g1")).unwrap().is_empty());
    }

    #[test]
    fn declarations_inside_shapes_graph_are_collected() {
        let sd = extract_declarations(
            &ds("s:g1 shds:targetGraph ex:a .\n s:g1 { s:g1 shds:targetGraph ex:b ; shds:targetGraphExclude shds:default . }"),
            &Vocabulary::default(),
        )
        .unwrap();
        let decl = sd.declaration(&s("g1")).unwrap();
        assert_eq!(decl.includes, BTreeSet::from([GraphRef::Named(ex("a")), GraphRef::Named(ex("b"))]));
        assert_eq!(decl.excludes, BTreeSet::from([GraphRef::Default]));
    }

    #[test]
    fn literal_target_is_an_error() {
        let err = extract_declarations(&ds("s:g1 shds:targetGraph \"g1\" ."), &Vocabulary::default()).unwrap_err();
        assert!(err.to_string().contains("must be IRIs"));
        assert_eq!(check_wellformed(&ds("s:g1 shds:targetGraph \"g1\" ."), None, &Vocabulary::default()).len(), 1);
    }

    #[test]
    fn leaf_and_nested_combinations() {
        let v = Vocabulary::default();
        let g = Graph::new();
        assert_eq!(parse_combination(&Term::Iri(ex("g1")), &g, &v).unwrap(), CombinationExpr::Leaf(GraphRef::Named(ex("g1"))));

        let d = ds("s:g1 shds:targetGraphCombination [ shds:minus ( [ shds:or ( shds:all ) ] ex:dataGraph1 ) ] .");
        let sd = extract_declarations(&d, &v).unwrap();
        let c = &sd.declaration(&s("g1")).unwrap().combinations[0];
        assert_eq!(
            c,
            &CombinationExpr::Minus(
                Box::new(CombinationExpr::Or(vec![CombinationExpr::Leaf(GraphRef::All)])),
                Box::new(CombinationExpr::Leaf(GraphRef::Named(ex("dataGraph1"))))
            )
        );
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn combination_violations() {
        let v = Vocabulary::default();
        let cases = [
            "s:g1 shds:targetGraphCombination [ shds:and ( ex:a ) ; shds:or ( ex:b ) ] .",
            "s:g1 shds:targetGraphCombination [ shds:minus ( ex:a ex:b ex:c ) ] .",
            "s:g1 shds:targetGraphCombination [ shds:minus ( shds:named ex:b ) ] .",
            "s:g1 shds:targetGraphCombination [ shds:minus ( ex:a shds:all ) ] .",
            "s:g1 shds:targetGraphCombination [ shds:or () ] .",
            "s:g1 shds:targetGraphCombination [ shds:or ex:notAList ] .",
            "s:g1 shds:targetGraphCombination [ ex:p ex:o ] .",
            "s:g1 shds:targetGraphCombination \"x\" .",
            "s:g1 shds:targetGraphCombination shds:named .",
            "s:g1 shds:targetGraphCombination _:c . _:c shds:or ( _:c ) .",
            "s:g1 shds:targetGraphCombination [ shds:or _:l ] . _:l <http://www.w3.org/1999/02/22-rdf-syntax-ns#first> ex:a ; <http://www.w3.org/1999/02/22-rdf-syntax-ns#rest> _:l .",
        ];
        for body in cases {
            let d = ds(body);
            assert_eq!(check_wellformed(&d, None, &v).len(), 1, "{body}");
            assert!(extract_declarations(&d, &v).is_err(), "{body}");
        }
    }

    #[test]
    fn default_allowed_in_minus_and_as_leaf() {
        let v = Vocabulary::default();
        let d = ds("s:g1 shds:targetGraphCombination [ shds:minus ( shds:default ex:b ) ] , shds:default .");
        assert!(check_wellformed(&d, None, &v).is_empty());
    }

    #[test]
    fn unknown_graph_with_data_dataset() {
        let v = Vocabulary::default();
        let shapes = ds("s:g1 shds:targetGraph ex:missing , shds:named .");
        assert!(check_wellformed(&shapes, None, &v).is_empty());
        assert_eq!(check_wellformed(&shapes, Some(&Dataset::new()), &v).len(), 1);
    }

    #[test]
    fn invalid_pattern() {
        let v = Vocabulary::default();
        let d = ds("s:g1 shds:targetGraphPattern \"(unclosed\" .");
        assert_eq!(check_wellformed(&d, None, &v).len(), 1);
        let d = ds("s:g1 shds:targetGraphPattern \"^http://example.org/g\" .");
        let sd = extract_declarations(&d, &v).unwrap();
        assert_eq!(sd.declaration(&s("g1")).unwrap().include_patterns.len(), 1);
    }

    #[test]
    fn rdf_round_trip_reproduces_tree() {
        let v = Vocabulary::default();
        let expr = CombinationExpr::Or(vec![
            CombinationExpr::Leaf(GraphRef::Default),
            CombinationExpr::And(vec![CombinationExpr::Leaf(GraphRef::AllNamed)]),
            CombinationExpr::Minus(
                Box::new(CombinationExpr::Leaf(GraphRef::Named(ex("a")))),
                Box::new(CombinationExpr::Leaf(GraphRef::Default)),
            ),
        ]);
        let mut g = Graph::new();
        let mut n = 0;
        let node = expr.write_rdf(&mut g, &v, &mut || {
            n += 1;
            BlankNode::new(format!("c{n}"))
        });
        assert_eq!(parse_combination(&node, &g, &v).unwrap(), expr);
    }
}
