use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Graph, Iri};

/// A default graph plus IRI-named graphs.
///
/// Graphs are held behind `Arc` so that derived datasets (evaluation views)
/// share storage with the dataset they were built from.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    default: Arc<Graph>,
    named: BTreeMap<Iri, Arc<Graph>>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(default: Arc<Graph>, named: BTreeMap<Iri, Arc<Graph>>) -> Self {
        Dataset { default, named }
    }

    pub fn default_graph(&self) -> &Graph {
        &self.default
    }

    pub fn default_graph_arc(&self) -> &Arc<Graph> {
        &self.default
    }

    pub fn set_default_graph(&mut self, graph: impl Into<Arc<Graph>>) {
        self.default = graph.into();
    }

    pub fn named_graph(&self, name: &Iri) -> Option<&Graph> {
        self.named.get(name).map(Arc::as_ref)
    }

    pub fn named_graph_arc(&self, name: &Iri) -> Option<&Arc<Graph>> {
        self.named.get(name)
    }

    pub fn contains_named(&self, name: &Iri) -> bool {
        self.named.contains_key(name)
    }

    /// Replaces any graph previously stored under `name`.
    pub fn insert_named(&mut self, name: Iri, graph: impl Into<Arc<Graph>>) {
        self.named.insert(name, graph.into());
    }

    /// Named graphs in IRI order.
    pub fn named_graphs(&self) -> impl Iterator<Item = (&Iri, &Graph)> {
        self.named.iter().map(|(k, v)| (k, v.as_ref()))
    }

    pub fn named_graph_names(&self) -> impl Iterator<Item = &Iri> {
        self.named.keys()
    }

    pub fn named_count(&self) -> usize {
        self.named.len()
    }

    /// All graphs of the dataset: the default graph (name `None`) first, then
    /// every named graph in IRI order.
    pub fn graphs_of(&self) -> Vec<(Option<&Iri>, &Graph)> {
        std::iter::once((None, self.default.as_ref()))
            .chain(self.named.iter().map(|(k, v)| (Some(k), v.as_ref())))
            .collect()
    }

    pub fn quad_count(&self) -> usize {
        self.default.len() + self.named.values().map(|g| g.len()).sum::<usize>()
    }
}

impl std::fmt::Debug for Dataset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dataset").field("default", &self.default).field("named", &self.named).finish()
    }
}
