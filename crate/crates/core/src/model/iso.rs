//! Graph isomorphism modulo blank-node relabeling.
//!
//! Blank nodes are first partitioned by iterated neighbourhood hashing
//! (colour refinement, run jointly over both graphs so colours are
//! comparable), then a backtracking search tries bijections that respect
//! the colour classes, checking each triple as soon as all of its blank
//! nodes are mapped.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{BlankNode, Graph, Term, Triple};

/// True iff some bijection between the blank nodes of `a` and `b` makes the
/// two triple sets equal.
pub fn graph_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ground_a: HashSet<&Triple> = a.iter().filter(|t| !t.has_blank_node()).collect();
    let ground_b: HashSet<&Triple> = b.iter().filter(|t| !t.has_blank_node()).collect();
    if ground_a != ground_b {
        return false;
    }
    let loose_a: Vec<&Triple> = a.iter().filter(|t| t.has_blank_node()).collect();
    let loose_b: Vec<&Triple> = b.iter().filter(|t| t.has_blank_node()).collect();
    if loose_a.is_empty() {
        return true;
    }

    let nodes_a = blank_nodes(&loose_a);
    let nodes_b = blank_nodes(&loose_b);
    if nodes_a.len() != nodes_b.len() {
        return false;
    }

    let (colours_a, colours_b) = refine(&loose_a, &nodes_a, &loose_b, &nodes_b);
    if histogram(&colours_a) != histogram(&colours_b) {
        return false;
    }

    let mut search = Search::new(&loose_a, &nodes_a, &colours_a, b, &nodes_b, &colours_b);
    search.run(0)
}

fn blank_nodes(triples: &[&Triple]) -> Vec<BlankNode> {
    let mut out: Vec<BlankNode> = triples
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(|term| term.as_blank_node().cloned())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn histogram(colours: &HashMap<BlankNode, u64>) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for c in colours.values() {
        *h.entry(*c).or_insert(0) += 1;
    }
    h
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// One refinement step for one graph: the new colour of a node hashes its
/// previous colour together with the sorted multiset of its incident edges.
fn refine_step(triples: &[&Triple], nodes: &[BlankNode], colours: &HashMap<BlankNode, u64>) -> HashMap<BlankNode, u64> {
    let colour_of = |term: &Term| -> u64 {
        match term {
            Term::BlankNode(b) => colours[b],
            other => hash_of(&(1u8, other)),
        }
    };
    let mut signatures: HashMap<&BlankNode, Vec<(u8, u64, u64)>> = HashMap::new();
    for t in triples {
        let p = hash_of(&t.predicate);
        if let Term::BlankNode(s) = &t.subject {
            signatures.entry(s).or_default().push((0, p, colour_of(&t.object)));
        }
        if let Term::BlankNode(o) = &t.object {
            signatures.entry(o).or_default().push((1, p, colour_of(&t.subject)));
        }
    }
    nodes
        .iter()
        .map(|n| {
            let mut sig = signatures.remove(n).unwrap_or_default();
            sig.sort_unstable();
            (n.clone(), hash_of(&(colours[n], sig)))
        })
        .collect()
}

fn class_count(colours: &HashMap<BlankNode, u64>) -> usize {
    colours.values().collect::<HashSet<_>>().len()
}

fn refine(
    ta: &[&Triple],
    na: &[BlankNode],
    tb: &[&Triple],
    nb: &[BlankNode],
) -> (HashMap<BlankNode, u64>, HashMap<BlankNode, u64>) {
    let mut ca: HashMap<BlankNode, u64> = na.iter().map(|n| (n.clone(), 0)).collect();
    let mut cb: HashMap<BlankNode, u64> = nb.iter().map(|n| (n.clone(), 0)).collect();
    let mut classes = 1;
    for _ in 0..=na.len() {
        let next_a = refine_step(ta, na, &ca);
        let next_b = refine_step(tb, nb, &cb);
        let next_classes = class_count(&next_a).max(class_count(&next_b));
        ca = next_a;
        cb = next_b;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    (ca, cb)
}

struct Search<'a> {
    order: Vec<BlankNode>,
    candidates: Vec<Vec<BlankNode>>,
    /// For each node in `order`, the triples of `a` that become fully mapped
    /// once that node is assigned.
    checks: Vec<Vec<&'a Triple>>,
    target: &'a Graph,
    mapping: HashMap<BlankNode, BlankNode>,
    used: HashSet<BlankNode>,
}

impl<'a> Search<'a> {
    fn new(
        ta: &[&'a Triple],
        na: &[BlankNode],
        ca: &HashMap<BlankNode, u64>,
        target: &'a Graph,
        nb: &[BlankNode],
        cb: &HashMap<BlankNode, u64>,
    ) -> Self {
        let mut by_colour: HashMap<u64, Vec<BlankNode>> = HashMap::new();
        for n in nb {
            by_colour.entry(cb[n]).or_default().push(n.clone());
        }
        let mut order: Vec<BlankNode> = na.to_vec();
        order.sort_by_key(|n| (by_colour[&ca[n]].len(), n.clone()));
        let position: HashMap<&BlankNode, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut checks: Vec<Vec<&Triple>> = vec![Vec::new(); order.len()];
        for t in ta {
            let last = [&t.subject, &t.object]
                .into_iter()
                .filter_map(|x| x.as_blank_node())
                .map(|b| position[b])
                .max()
                .expect("triple has a blank node");
            checks[last].push(*t);
        }
        let candidates = order.iter().map(|n| by_colour[&ca[n]].clone()).collect();
        Search { order, candidates, checks, target, mapping: HashMap::new(), used: HashSet::new() }
    }

    fn map_term(&self, term: &Term) -> Term {
        match term {
            Term::BlankNode(b) => Term::BlankNode(self.mapping[b].clone()),
            other => other.clone(),
        }
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let node = self.order[depth].clone();
        for i in 0..self.candidates[depth].len() {
            let cand = self.candidates[depth][i].clone();
            if self.used.contains(&cand) {
                continue;
            }
            self.mapping.insert(node.clone(), cand.clone());
            let consistent = self.checks[depth].iter().all(|t| {
                let mapped = Triple {
                    subject: self.map_term(&t.subject),
                    predicate: t.predicate.clone(),
                    object: self.map_term(&t.object),
                };
                self.target.contains(&mapped)
            });
            if consistent {
                self.used.insert(cand.clone());
                if self.run(depth + 1) {
                    return true;
                }
                self.used.remove(&cand);
            }
            self.mapping.remove(&node);
        }
        false
    }
}
