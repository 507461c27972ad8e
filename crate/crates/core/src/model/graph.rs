use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Iri, Term, Triple};

/// A set of triples with subject, predicate and object indexes.
///
/// Membership tests are O(1) expected; iteration order is unspecified, use
/// [`Graph::sorted`] wherever output order matters.
#[derive(Clone, Default)]
pub struct Graph {
    triples: HashSet<Triple>,
    by_subject: HashMap<Term, Vec<Triple>>,
    by_predicate: HashMap<Iri, Vec<Triple>>,
    by_object: HashMap<Term, Vec<Triple>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.by_subject.entry(triple.subject.clone()).or_default().push(triple.clone());
        self.by_predicate.entry(triple.predicate.clone()).or_default().push(triple.clone());
        self.by_object.entry(triple.object.clone()).or_default().push(triple.clone());
        self.triples.insert(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn sorted(&self) -> Vec<&Triple> {
        let mut all: Vec<&Triple> = self.triples.iter().collect();
        all.sort();
        all
    }

    pub fn with_subject(&self, subject: &Term) -> &[Triple] {
        self.by_subject.get(subject).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_predicate(&self, predicate: &Iri) -> &[Triple] {
        self.by_predicate.get(predicate).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_object(&self, object: &Term) -> &[Triple] {
        self.by_object.get(object).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Iri) -> impl Iterator<Item = &'a Term> + 'a {
        let predicate = predicate.clone();
        self.with_subject(subject).iter().filter(move |t| t.predicate == predicate).map(|t| &t.object)
    }

    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        let predicate = predicate.clone();
        self.with_object(object).iter().filter(move |t| t.predicate == predicate).map(|t| &t.subject)
    }

    pub fn object(&self, subject: &Term, predicate: &Iri) -> Option<&Term> {
        self.with_subject(subject).iter().find(|t| &t.predicate == predicate).map(|t| &t.object)
    }

    /// Every subject and object term of the graph.
    pub fn nodes(&self) -> HashSet<&Term> {
        self.by_subject.keys().chain(self.by_object.keys()).collect()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        graph_union(self, other)
    }

    pub fn intersection(&self, other: &Graph) -> Graph {
        graph_intersection(self, other)
    }

    pub fn difference(&self, other: &Graph) -> Graph {
        graph_difference(self, other)
    }
}

/// Triples in `a` or `b`.
pub fn graph_union(a: &Graph, b: &Graph) -> Graph {
    let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = big.clone();
    out.extend(small.iter().cloned());
    out
}

/// Triples in both `a` and `b`.
pub fn graph_intersection(a: &Graph, b: &Graph) -> Graph {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|t| big.contains(t)).cloned().collect()
}

/// Triples of `a` not in `b`.
pub fn graph_difference(a: &Graph, b: &Graph) -> Graph {
    a.iter().filter(|t| !b.contains(t)).cloned().collect()
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}
