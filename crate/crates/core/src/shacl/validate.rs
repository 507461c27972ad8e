//! Focus-node selection, value nodes and constraint checking.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::values::{compare_literals, is_well_formed};
use super::{Constraint, Path, Shape, ShaclError, ShapesGraph, Target};
use crate::model::{Graph, Literal, Term};
use crate::report::RawResult;
use crate::sparql::validate_sparql_constraint;
use crate::view::EvaluationDataset;
use crate::vocab::{self, rdf};

/// Shape references (`sh:node`, `sh:and`, ...) nested deeper than this are
/// reported as an error instead of recursing forever.
pub const MAX_SHAPE_DEPTH: usize = 64;

/// The focus nodes a shape's targets select in `data`. No inference: class
/// targets match direct `rdf:type` triples only.
pub fn select_focus_nodes(shape: &Shape, data: &Graph) -> BTreeSet<Term> {
    let rdf_type = vocab::rdf_type();
    let mut out = BTreeSet::new();
    for target in &shape.targets {
        match target {
            Target::Class(c) => out.extend(data.subjects(&rdf_type, &Term::Iri(c.clone())).cloned()),
            Target::Node(n) => {
                out.insert(n.clone());
            }
            Target::SubjectsOf(p) => out.extend(data.with_predicate(p).iter().map(|t| t.subject.clone())),
            Target::ObjectsOf(p) => out.extend(data.with_predicate(p).iter().map(|t| t.object.clone())),
        }
    }
    out
}

fn follow(path: &Path, from: &BTreeSet<Term>, data: &Graph) -> BTreeSet<Term> {
    match path {
        Path::Predicate(p) => from.iter().flat_map(|n| data.objects(n, p).cloned().collect::<Vec<_>>()).collect(),
        Path::Inverse(inner) => match inner.as_ref() {
            Path::Predicate(p) => from.iter().flat_map(|n| data.subjects(p, n).cloned().collect::<Vec<_>>()).collect(),
            other => {
                let inverted = invert(other);
                follow(&inverted, from, data)
            }
        },
        Path::Sequence(steps) => steps.iter().fold(from.clone(), |acc, step| follow(step, &acc, data)),
    }
}

fn invert(path: &Path) -> Path {
    match path {
        Path::Predicate(_) => Path::Inverse(Box::new(path.clone())),
        Path::Inverse(inner) => (**inner).clone(),
        Path::Sequence(steps) => Path::Sequence(steps.iter().rev().map(invert).collect()),
    }
}

/// Value nodes of a focus node: the node itself for node shapes, otherwise
/// the distinct terms reachable through the path, in term order.
pub fn value_nodes(focus: &Term, path: Option<&Path>, data: &Graph) -> Vec<Term> {
    match path {
        None => vec![focus.clone()],
        Some(p) => follow(p, &BTreeSet::from([focus.clone()]), data).into_iter().collect(),
    }
}

struct Checker<'s, 'v, 'd> {
    shapes: &'s ShapesGraph,
    view: &'v EvaluationDataset<'d>,
    warnings: Vec<String>,
}

/// Validates the shape's own targets over the view's default graph.
/// Results come back in (focus node, constraint) order.
pub fn validate_shape(shape: &Shape, shapes: &ShapesGraph, view: &EvaluationDataset<'_>) -> Result<(Vec<RawResult>, Vec<String>), ShaclError> {
    if shape.deactivated {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut checker = Checker { shapes, view, warnings: Vec::new() };
    let focus = select_focus_nodes(shape, view.view.default_graph());
    let mut out = Vec::new();
    for f in &focus {
        out.extend(checker.check(shape, f, 0)?);
    }
    Ok((out, checker.warnings))
}

impl<'s> Checker<'s, '_, '_> {
    fn data(&self) -> &Graph {
        self.view.view.default_graph()
    }

    fn shape(&self, id: &Term) -> Result<&'s Shape, ShaclError> {
        self.shapes.get(id).ok_or_else(|| ShaclError::UnknownShape(id.clone()))
    }

    fn conforms(&mut self, node: &Term, shape_id: &Term, depth: usize) -> Result<bool, ShaclError> {
        let shape = self.shape(shape_id)?;
        Ok(self.check(shape, node, depth + 1)?.is_empty())
    }

    fn result(&self, shape: &Shape, focus: &Term, c: &Constraint, value: Option<Term>) -> RawResult {
        RawResult {
            focus_node: focus.clone(),
            path: shape.path.clone(),
            value,
            component: c.component(),
            severity: shape.severity.clone(),
            messages: shape.messages.clone(),
            source_shape: shape.id.clone(),
        }
    }

    /// Every result of `shape` for one focus node.
    fn check(&mut self, shape: &Shape, focus: &Term, depth: usize) -> Result<Vec<RawResult>, ShaclError> {
        if depth > MAX_SHAPE_DEPTH {
            return Err(ShaclError::RecursionLimit(shape.id.clone()));
        }
        if shape.deactivated {
            return Ok(Vec::new());
        }
        let values = value_nodes(focus, shape.path.as_ref(), self.data());
        let mut out = Vec::new();
        for c in &shape.constraints {
            match c {
                Constraint::MinCount(n) => {
                    if (values.len() as u64) < *n {
                        out.push(self.result(shape, focus, c, None));
                    }
                }
                Constraint::MaxCount(n) => {
                    if values.len() as u64 > *n {
                        out.push(self.result(shape, focus, c, None));
                    }
                }
                Constraint::HasValue(v) => {
                    if !values.contains(v) {
                        out.push(self.result(shape, focus, c, None));
                    }
                }
                Constraint::Property(p) => {
                    let prop = self.shape(p)?;
                    for v in &values {
                        out.extend(self.check(prop, v, depth + 1)?);
                    }
                }
                Constraint::Sparql(sc) => {
                    let (results, warnings) = validate_sparql_constraint(sc, shape, &BTreeSet::from([focus.clone()]), self.view)
                        .map_err(|error| ShaclError::Sparql { shape: shape.id.clone(), error })?;
                    self.warnings.extend(warnings);
                    out.extend(results);
                }
                _ => {
                    for v in &values {
                        if !self.value_ok(c, v, depth)? {
                            out.push(self.result(shape, focus, c, Some(v.clone())));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn value_ok(&mut self, c: &Constraint, v: &Term, depth: usize) -> Result<bool, ShaclError> {
        Ok(match c {
            Constraint::Class(class) => {
                !v.is_literal() && self.data().contains(&crate::model::Triple::new(v.clone(), vocab::rdf_type(), class.clone()))
            }
            Constraint::Datatype(dt) => v.as_literal().is_some_and(|l| {
                l.datatype() == dt && (dt.as_str() != rdf::LANG_STRING || l.language().is_some()) && is_well_formed(l)
            }),
            Constraint::NodeKind(k) => k.matches(v),
            Constraint::In(allowed) => allowed.contains(v),
            Constraint::Pattern(p) => match v {
                Term::BlankNode(_) => false,
                Term::Iri(i) => p.regex.is_match(i.as_str()),
                Term::Literal(l) => p.regex.is_match(l.lexical()),
            },
            Constraint::MinInclusive(bound) => in_range(v, bound, |o| o != Ordering::Less),
            Constraint::MaxInclusive(bound) => in_range(v, bound, |o| o != Ordering::Greater),
            Constraint::Node(s) => self.conforms(v, s, depth)?,
            Constraint::Not(s) => !self.conforms(v, s, depth)?,
            Constraint::And(ss) => {
                let mut ok = true;
                for s in ss {
                    if !self.conforms(v, s, depth)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Constraint::Or(ss) => {
                let mut ok = false;
                for s in ss {
                    if self.conforms(v, s, depth)? {
                        ok = true;
                        break;
                    }
                }
                ok
            }
            Constraint::MinCount(_)
            | Constraint::MaxCount(_)
            | Constraint::HasValue(_)
            | Constraint::Property(_)
            | Constraint::Sparql(_) => unreachable!("handled per focus node"),
        })
    }
}

/// A value outside the comparable domain of the bound is a violation.
fn in_range(v: &Term, bound: &Literal, accept: impl Fn(Ordering) -> bool) -> bool {
    v.as_literal().and_then(|l| compare_literals(l, bound)).is_some_and(accept)
}
