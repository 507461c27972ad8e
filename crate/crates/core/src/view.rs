//! Evaluation datasets: the dataset a (shapes graph, focus graph) pair is
//! validated against.
//!
//! The focus graph becomes the default graph, every named graph of the data
//! dataset stays available under its name, and the original default graph
//! is re-homed under `shds:default`. Graph storage is shared, not copied.

use crate::model::{Dataset, Iri};
use crate::targets::FocusGraph;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone)]
pub struct EvaluationDataset<'a> {
    pub view: Dataset,
    pub focus: FocusGraph,
    pub origin: &'a Dataset,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ViewError {
    #[error("the data dataset has a named graph called {0}, which is reserved for the default graph")]
    ReservedNameCollision(Iri),
}

pub fn build_view<'a>(d: &'a Dataset, focus: &FocusGraph, vocab: &Vocabulary) -> Result<EvaluationDataset<'a>, ViewError> {
    if d.contains_named(&vocab.default) {
        return Err(ViewError::ReservedNameCollision(vocab.default.clone()));
    }
    let mut view = d.clone();
    view.set_default_graph(focus.triples.clone());
    view.insert_named(vocab.default.clone(), d.default_graph_arc().clone());
    Ok(EvaluationDataset { view, focus: focus.clone(), origin: d })
}
