//! Shared fixtures, random generators and brute-force oracles.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;

use shaclds::model::{BlankNode, Dataset, Graph, Iri, Literal, Term, Triple};
use shaclds::shapes_dataset::{CombinationExpr, GraphRef};
use shaclds::{parse_dataset, RdfFormat, Vocabulary};

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("http://example.org/{local}")).unwrap()
}

pub fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn corpus_dir() -> PathBuf {
    tests_dir().join("corpus")
}

pub fn load_trig(path: &std::path::Path) -> Dataset {
    let bytes = std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dataset(&bytes, RdfFormat::TriG).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn trig(text: &str) -> Dataset {
    parse_dataset(text.as_bytes(), RdfFormat::TriG).unwrap()
}

/// Files with the given extension in a directory, sorted by name.
pub fn files_in(dir: &std::path::Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

pub const FAMOUS_DATA: &str = r#"
@prefix ex: <http://example.org/> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
ex:Alice a foaf:Person ; foaf:knows ex:Yara .
ex:Yara foaf:knows ex:Zoe .
ex:Bob a foaf:Person .
ex:City1Graph {
    ex:Bob foaf:knows ex:Yara .
    ex:David a foaf:Person .
    ex:Carol a foaf:Person ; foaf:knows ex:Zoe .
}
ex:famous {
    ex:Zoe a ex:FamousPerson .
}
"#;

pub const FAMOUS_QUERY: &str = r#"
PREFIX foaf: <http://xmlns.com/foaf/0.1/>
PREFIX ex: <http://example.org/>
SELECT $this WHERE {
    $this a foaf:Person .
    FILTER NOT EXISTS {
        $this foaf:knows+ ?friend .
        GRAPH ex:famous { ?friend a ex:FamousPerson }
    }
}
"#;

/// The famous-person shapes graph with the given targeting triples.
pub fn famous_shapes(targeting: &str) -> String {
    format!(
        r#"@prefix ex: <http://example.org/> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix shds: <http://www.w3id.org/shacl-ds#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
{targeting}
ex:famousShapes {{
    ex:FamousShape a sh:NodeShape ;
        sh:targetClass foaf:Person ;
        sh:sparql [ sh:select """{FAMOUS_QUERY}""" ] .
}}
"#
    )
}

// ---------------------------------------------------------------------------
// Random generators

pub const GRAPH_NAMES: [&str; 5] = ["g0", "g1", "g2", "g3", "g4"];

pub fn random_term(rng: &mut StdRng, position: usize) -> Term {
    match (position, rng.gen_range(0..10)) {
        (0, 0..=1) | (2, 0) => Term::BlankNode(BlankNode::new(format!("b{}", rng.gen_range(0..2)))),
        (2, 1..=2) => Term::Literal(Literal::integer(rng.gen_range(0..3))),
        _ => Term::Iri(ex(&format!("n{}", rng.gen_range(0..5)))),
    }
}

pub fn random_triple(rng: &mut StdRng) -> Triple {
    let p = ex(&format!("p{}", rng.gen_range(0..3)));
    Triple::new(random_term(rng, 0), p, random_term(rng, 2))
}

pub fn random_graph(rng: &mut StdRng, max_triples: usize) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    (0..n).map(|_| random_triple(rng)).collect()
}

/// A default graph plus a random subset of `g0`..`g3`; `g4` never exists.
pub fn random_dataset(rng: &mut StdRng, max_triples: usize) -> Dataset {
    let mut d = Dataset::new();
    d.set_default_graph(random_graph(rng, max_triples));
    for name in &GRAPH_NAMES[..4] {
        if rng.gen_bool(0.7) {
            d.insert_named(ex(name), random_graph(rng, max_triples));
        }
    }
    d
}

pub fn random_graph_ref(rng: &mut StdRng, reserved_sets: bool) -> GraphRef {
    let k = if reserved_sets { rng.gen_range(0..8) } else { rng.gen_range(0..6) };
    match k {
        0 => GraphRef::Default,
        6 => GraphRef::AllNamed,
        7 => GraphRef::All,
        i => GraphRef::Named(ex(GRAPH_NAMES[i - 1])),
    }
}

/// A well-formed combination of at most `depth` operator levels. Operands of
/// `or`/`and` may be `shds:named`/`shds:all`; other leaves are single graphs.
pub fn random_combination(rng: &mut StdRng, depth: usize) -> CombinationExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return CombinationExpr::Leaf(random_graph_ref(rng, false));
    }
    match rng.gen_range(0..3) {
        0 | 1 => {
            let n = rng.gen_range(1..=3);
            let xs = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        CombinationExpr::Leaf([GraphRef::AllNamed, GraphRef::All].choose(rng).unwrap().clone())
                    } else {
                        random_combination(rng, depth - 1)
                    }
                })
                .collect();
            if rng.gen_bool(0.5) {
                CombinationExpr::Or(xs)
            } else {
                CombinationExpr::And(xs)
            }
        }
        _ => CombinationExpr::Minus(Box::new(random_combination(rng, depth - 1)), Box::new(random_combination(rng, depth - 1))),
    }
}

pub const PATTERNS: [&str; 4] = ["g[01]$", "^http://example.org/g2$", "example", "g[3-9]"];

#[derive(Debug, Clone, Default)]
pub struct RandomDeclarations {
    pub includes: Vec<GraphRef>,
    pub excludes: Vec<GraphRef>,
    pub include_patterns: Vec<String>,
    pub exclude_patterns: Vec<String>,
    pub combinations: Vec<CombinationExpr>,
}

pub fn random_declarations(rng: &mut StdRng, depth: usize) -> RandomDeclarations {
    let mut d = RandomDeclarations::default();
    for _ in 0..rng.gen_range(0..3) {
        d.includes.push(random_graph_ref(rng, true));
    }
    for _ in 0..rng.gen_range(0..3) {
        d.excludes.push(random_graph_ref(rng, true));
    }
    if rng.gen_bool(0.3) {
        d.include_patterns.push(PATTERNS.choose(rng).unwrap().to_string());
    }
    if rng.gen_bool(0.3) {
        d.exclude_patterns.push(PATTERNS.choose(rng).unwrap().to_string());
    }
    for _ in 0..rng.gen_range(0..3) {
        d.combinations.push(random_combination(rng, depth));
    }
    d
}

/// A shapes dataset whose default graph holds the declarations for
/// `ex:shapes`, and whose `ex:shapes` graph is empty.
pub fn declarations_dataset(decl: &RandomDeclarations, vocab: &Vocabulary) -> Dataset {
    let shapes = Term::Iri(ex("shapes"));
    let mut g = Graph::new();
    for r in &decl.includes {
        g.insert(Triple::new(shapes.clone(), vocab.target_graph.clone(), r.to_iri(vocab)));
    }
    for r in &decl.excludes {
        g.insert(Triple::new(shapes.clone(), vocab.target_graph_exclude.clone(), r.to_iri(vocab)));
    }
    for p in &decl.include_patterns {
        g.insert(Triple::new(shapes.clone(), vocab.target_graph_pattern.clone(), Literal::simple(p)));
    }
    for p in &decl.exclude_patterns {
        g.insert(Triple::new(shapes.clone(), vocab.target_graph_pattern_exclude.clone(), Literal::simple(p)));
    }
    let mut next = 0;
    for c in &decl.combinations {
        let node = c.write_rdf(&mut g, vocab, &mut || {
            next += 1;
            BlankNode::new(format!("c{next}"))
        });
        g.insert(Triple::new(shapes.clone(), vocab.target_graph_combination.clone(), node));
    }
    let mut ds = Dataset::new();
    ds.set_default_graph(g);
    ds.insert_named(ex("shapes"), Graph::new());
    ds
}

// ---------------------------------------------------------------------------
// Oracles

pub type TripleSet = BTreeSet<Triple>;

pub fn triple_set(g: &Graph) -> TripleSet {
    g.iter().cloned().collect()
}

/// Graph identifiers a reference denotes: `None` for the default graph.
fn oracle_refs(r: &GraphRef, d: &Dataset) -> Vec<Option<Iri>> {
    let named: Vec<Option<Iri>> = d.named_graph_names().cloned().map(Some).collect();
    match r {
        GraphRef::Default => vec![None],
        GraphRef::AllNamed => named,
        GraphRef::All => std::iter::once(None).chain(named).collect(),
        GraphRef::Named(n) => {
            if d.contains_named(n) {
                vec![Some(n.clone())]
            } else {
                vec![]
            }
        }
    }
}

fn oracle_graph(id: &Option<Iri>, d: &Dataset) -> TripleSet {
    match id {
        None => triple_set(d.default_graph()),
        Some(n) => d.named_graph(n).map(triple_set).unwrap_or_default(),
    }
}

/// T_in ∖ T_out by graph identity; the default graph first, then names.
pub fn oracle_direct(decl: &RandomDeclarations, d: &Dataset) -> Vec<(Option<Iri>, TripleSet)> {
    let side = |refs: &[GraphRef], patterns: &[String]| -> BTreeSet<Option<Iri>> {
        let mut ids: BTreeSet<Option<Iri>> = refs.iter().flat_map(|r| oracle_refs(r, d)).collect();
        for p in patterns {
            let re = Regex::new(p).unwrap();
            ids.extend(d.named_graph_names().filter(|n| re.is_match(n.as_str())).cloned().map(Some));
        }
        ids
    };
    let t_in = side(&decl.includes, &decl.include_patterns);
    let t_out = side(&decl.excludes, &decl.exclude_patterns);
    t_in.difference(&t_out).map(|id| (id.clone(), oracle_graph(id, d))).collect()
}

/// Bottom-up evaluation of a combination with plain set operations.
pub fn oracle_combination(e: &CombinationExpr, d: &Dataset) -> TripleSet {
    let operands = |xs: &[CombinationExpr]| -> Vec<TripleSet> {
        xs.iter()
            .flat_map(|x| match x {
                CombinationExpr::Leaf(r @ (GraphRef::AllNamed | GraphRef::All)) => {
                    oracle_refs(r, d).iter().map(|id| oracle_graph(id, d)).collect()
                }
                other => vec![oracle_combination(other, d)],
            })
            .collect()
    };
    match e {
        CombinationExpr::Leaf(r) => oracle_refs(r, d).first().map(|id| oracle_graph(id, d)).unwrap_or_default(),
        CombinationExpr::Or(xs) => operands(xs).into_iter().flatten().collect(),
        CombinationExpr::And(xs) => {
            let mut sets = operands(xs).into_iter();
            match sets.next() {
                None => TripleSet::new(),
                Some(first) => sets.fold(first, |acc, s| acc.into_iter().filter(|t| s.contains(t)).collect()),
            }
        }
        CombinationExpr::Minus(a, b) => {
            let right = oracle_combination(b, d);
            oracle_combination(a, d).into_iter().filter(|t| !right.contains(t)).collect()
        }
    }
}

/// Isomorphism by trying every bijection between the blank nodes of `a` and
/// `b`. Only usable for graphs with a handful of blank nodes.
pub fn brute_force_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let blanks = |g: &Graph| -> Vec<BlankNode> {
        let set: BTreeSet<BlankNode> = g.nodes().into_iter().filter_map(|t| t.as_blank_node().cloned()).collect();
        set.into_iter().collect()
    };
    let ba = blanks(a);
    let bb = blanks(b);
    if ba.len() != bb.len() {
        return false;
    }
    let target = triple_set(b);
    let mut perm: Vec<usize> = (0..bb.len()).collect();
    loop {
        let map = |t: &Term| match t {
            Term::BlankNode(x) => Term::BlankNode(bb[perm[ba.iter().position(|y| y == x).unwrap()]].clone()),
            other => other.clone(),
        };
        let mapped: TripleSet = a.iter().map(|t| Triple::new(map(&t.subject), t.predicate.clone(), map(&t.object))).collect();
        if mapped == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Relabels every blank node of `g` with a fresh, shuffled label.
pub fn relabel(g: &Graph, rng: &mut StdRng) -> Graph {
    let labels: BTreeSet<String> = g.nodes().into_iter().filter_map(|t| t.as_blank_node().map(|b| b.label().to_owned())).collect();
    let mut fresh: Vec<usize> = (0..labels.len()).collect();
    fresh.shuffle(rng);
    let map = |t: &Term| match t {
        Term::BlankNode(b) => {
            let i = labels.iter().position(|l| l == b.label()).unwrap();
            Term::BlankNode(BlankNode::new(format!("x{}", fresh[i])))
        }
        other => other.clone(),
    };
    g.iter().map(|t| Triple::new(map(&t.subject), t.predicate.clone(), map(&t.object))).collect()
}

/// Dataset isomorphism with one blank-node bijection across all graphs:
/// each quad becomes a triple whose predicate also names the graph.
pub fn dataset_isomorphic(a: &Dataset, b: &Dataset) -> bool {
    let flatten = |d: &Dataset| -> Graph {
        let mut out = Graph::new();
        for (name, g) in d.graphs_of() {
            let graph = name.map_or("default".to_owned(), |n| n.as_str().to_owned());
            for t in g.iter() {
                let p = Iri::new(format!("urn:quad:{}:{}", graph.len(), graph) + "/" + t.predicate.as_str()).unwrap();
                out.insert(Triple::new(t.subject.clone(), p, t.object.clone()));
            }
        }
        out
    };
    let names = |d: &Dataset| d.named_graph_names().cloned().collect::<Vec<_>>();
    names(a) == names(b) && shaclds::graph_isomorphic(&flatten(a), &flatten(b))
}
