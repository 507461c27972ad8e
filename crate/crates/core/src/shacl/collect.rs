//! Reads shapes out of a shapes graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use regex::RegexBuilder;

use super::{CompiledPattern, Constraint, NodeKind, Path, Shape, ShaclError, ShapeKind, ShapesGraph, Target};
use crate::model::{Graph, Iri, Literal, Term};
use crate::shapes_dataset::read_list;
use crate::sparql::{self, SparqlConstraint};
use crate::vocab::{self, rdf, sh, xsd};

/// `sh:` terms that describe shapes without constraining anything.
const NON_VALIDATING: &[&str] = &["name", "description", "order", "group", "defaultValue", "flags"];

/// Target predicates that mark their subjects as shapes.
const TARGETS: &[&str] = &["targetClass", "targetNode", "targetSubjectsOf", "targetObjectsOf"];

fn sh_local(p: &Iri) -> Option<&str> {
    p.as_str().strip_prefix(sh::NS)
}

/// Collects every shape of `g`: subjects with targets, `sh:path`, or an
/// `rdf:type` of `sh:NodeShape`/`sh:PropertyShape`, plus every shape they
/// reference through `sh:property`, `sh:node`, `sh:and`, `sh:or` and
/// `sh:not`.
pub fn collect_shapes(g: &Graph) -> Result<ShapesGraph, ShaclError> {
    let mut roots: BTreeSet<Term> = BTreeSet::new();
    for local in TARGETS.iter().chain(["path"].iter()) {
        roots.extend(g.with_predicate(&vocab::sh(local)).iter().map(|t| t.subject.clone()));
    }
    let rdf_type = vocab::rdf_type();
    for class in ["NodeShape", "PropertyShape"] {
        roots.extend(g.subjects(&rdf_type, &Term::Iri(vocab::sh(class))).cloned());
    }
    let mut queue: VecDeque<Term> = roots.into_iter().collect();
    let mut shapes = BTreeMap::new();
    while let Some(id) = queue.pop_front() {
        if shapes.contains_key(&id) {
            continue;
        }
        let shape = read_shape(&id, g)?;
        for c in &shape.constraints {
            match c {
                Constraint::Node(s) | Constraint::Not(s) | Constraint::Property(s) => queue.push_back(s.clone()),
                Constraint::And(ss) | Constraint::Or(ss) => queue.extend(ss.iter().cloned()),
                _ => {}
            }
        }
        shapes.insert(id, shape);
    }
    Ok(ShapesGraph { shapes })
}

fn malformed(shape: &Term, message: impl Into<String>) -> ShaclError {
    ShaclError::Malformed { shape: shape.clone(), message: message.into() }
}

fn expect_iri<'a>(shape: &Term, what: &str, t: &'a Term) -> Result<&'a Iri, ShaclError> {
    t.as_iri().ok_or_else(|| malformed(shape, format!("{what} expects an IRI, found {t}")))
}

fn expect_literal<'a>(shape: &Term, what: &str, t: &'a Term) -> Result<&'a Literal, ShaclError> {
    t.as_literal().ok_or_else(|| malformed(shape, format!("{what} expects a literal, found {t}")))
}

fn count(shape: &Term, what: &str, t: &Term) -> Result<u64, ShaclError> {
    let lit = expect_literal(shape, what, t)?;
    if lit.datatype().as_str() != xsd::INTEGER {
        return Err(malformed(shape, format!("{what} expects an xsd:integer, found {t}")));
    }
    lit.lexical().parse().map_err(|_| malformed(shape, format!("{what} expects a non-negative integer, found {t}")))
}

fn list(shape: &Term, what: &str, head: &Term, g: &Graph) -> Result<Vec<Term>, ShaclError> {
    read_list(head, g).map_err(|e| malformed(shape, format!("{what}: {e}")))
}

fn is_true(lit: &Literal) -> bool {
    lit.datatype().as_str() == xsd::BOOLEAN && matches!(lit.lexical(), "true" | "1")
}

fn read_path(shape: &Term, node: &Term, g: &Graph, depth: usize) -> Result<Path, ShaclError> {
    if depth > 32 {
        return Err(malformed(shape, "sh:path is nested too deeply or cyclic"));
    }
    match node {
        Term::Iri(i) if i.as_str() != rdf::NIL => Ok(Path::Predicate(i.clone())),
        Term::BlankNode(_) => {
            if g.object(node, &vocab::iri(rdf::FIRST)).is_some() {
                let items = list(shape, "sh:path", node, g)?;
                if items.len() < 2 {
                    return Err(malformed(shape, "a sequence path needs at least two members"));
                }
                let steps = items.iter().map(|i| read_path(shape, i, g, depth + 1)).collect::<Result<_, _>>()?;
                return Ok(Path::Sequence(steps));
            }
            if let Some(inner) = g.object(node, &vocab::sh("inversePath")) {
                return Ok(Path::Inverse(Box::new(read_path(shape, inner, g, depth + 1)?)));
            }
            for unsupported in ["alternativePath", "zeroOrMorePath", "oneOrMorePath", "zeroOrOnePath"] {
                if g.object(node, &vocab::sh(unsupported)).is_some() {
                    return Err(ShaclError::UnsupportedComponent { shape: shape.clone(), component: vocab::sh(unsupported) });
                }
            }
            Err(malformed(shape, format!("unrecognised path node {node}")))
        }
        other => Err(malformed(shape, format!("invalid sh:path value {other}"))),
    }
}

fn read_shape(id: &Term, g: &Graph) -> Result<Shape, ShaclError> {
    let mut triples: Vec<_> = g.with_subject(id).iter().collect();
    triples.sort();
    let mut targets = Vec::new();
    let mut path = None;
    let mut constraints = Vec::new();
    let mut severity = vocab::sh("Violation");
    let mut messages = Vec::new();
    let mut deactivated = false;
    let mut pattern_flags = None;
    let mut patterns = Vec::new();
    let mut sparql_nodes = Vec::new();
    for t in triples {
        let Some(local) = sh_local(&t.predicate) else { continue };
        let o = &t.object;
        match local {
            "targetClass" => targets.push(Target::Class(expect_iri(id, "sh:targetClass", o)?.clone())),
            "targetNode" => targets.push(Target::Node(o.clone())),
            "targetSubjectsOf" => targets.push(Target::SubjectsOf(expect_iri(id, "sh:targetSubjectsOf", o)?.clone())),
            "targetObjectsOf" => targets.push(Target::ObjectsOf(expect_iri(id, "sh:targetObjectsOf", o)?.clone())),
            "path" => {
                if path.is_some() {
                    return Err(malformed(id, "more than one sh:path"));
                }
                path = Some(read_path(id, o, g, 0)?);
            }
            "property" => constraints.push(Constraint::Property(o.clone())),
            "class" => constraints.push(Constraint::Class(expect_iri(id, "sh:class", o)?.clone())),
            "datatype" => constraints.push(Constraint::Datatype(expect_iri(id, "sh:datatype", o)?.clone())),
            "nodeKind" => {
                let kind = expect_iri(id, "sh:nodeKind", o)?;
                let kind = NodeKind::from_iri(kind).ok_or_else(|| malformed(id, format!("unknown node kind {kind}")))?;
                constraints.push(Constraint::NodeKind(kind));
            }
            "minCount" => constraints.push(Constraint::MinCount(count(id, "sh:minCount", o)?)),
            "maxCount" => constraints.push(Constraint::MaxCount(count(id, "sh:maxCount", o)?)),
            "in" => constraints.push(Constraint::In(list(id, "sh:in", o, g)?)),
            "hasValue" => constraints.push(Constraint::HasValue(o.clone())),
            "pattern" => patterns.push(expect_literal(id, "sh:pattern", o)?.lexical().to_owned()),
            "flags" => pattern_flags = Some(expect_literal(id, "sh:flags", o)?.lexical().to_owned()),
            "minInclusive" => constraints.push(Constraint::MinInclusive(expect_literal(id, "sh:minInclusive", o)?.clone())),
            "maxInclusive" => constraints.push(Constraint::MaxInclusive(expect_literal(id, "sh:maxInclusive", o)?.clone())),
            "node" => constraints.push(Constraint::Node(o.clone())),
            "and" => constraints.push(Constraint::And(list(id, "sh:and", o, g)?)),
            "or" => constraints.push(Constraint::Or(list(id, "sh:or", o, g)?)),
            "not" => constraints.push(Constraint::Not(o.clone())),
            "sparql" => sparql_nodes.push(o.clone()),
            "severity" => severity = expect_iri(id, "sh:severity", o)?.clone(),
            "message" => messages.push(expect_literal(id, "sh:message", o)?.clone()),
            "deactivated" => deactivated = is_true(expect_literal(id, "sh:deactivated", o)?),
            l if NON_VALIDATING.contains(&l) => {}
            _ => return Err(ShaclError::UnsupportedComponent { shape: id.clone(), component: t.predicate.clone() }),
        }
    }
    for source in patterns {
        let mut b = RegexBuilder::new(&source);
        for f in pattern_flags.as_deref().unwrap_or("").chars() {
            match f {
                'i' => b.case_insensitive(true),
                's' => b.dot_matches_new_line(true),
                'm' => b.multi_line(true),
                'x' => b.ignore_whitespace(true),
                other => return Err(malformed(id, format!("unsupported sh:flags character {other:?}"))),
            };
        }
        let regex = b.build().map_err(|e| malformed(id, format!("invalid sh:pattern {source:?}: {e}")))?;
        constraints.push(Constraint::Pattern(CompiledPattern { source, flags: pattern_flags.clone(), regex }));
    }
    for node in sparql_nodes {
        constraints.push(Constraint::Sparql(Box::new(read_sparql(id, &node, g, &severity, &messages)?)));
    }
    let is_property_shape = g.contains(&crate::model::Triple::new(
        id.clone(),
        vocab::rdf_type(),
        Term::Iri(vocab::sh("PropertyShape")),
    ));
    if is_property_shape && path.is_none() {
        return Err(malformed(id, "sh:PropertyShape without sh:path"));
    }
    let kind = if path.is_some() { ShapeKind::Property } else { ShapeKind::Node };
    Ok(Shape { id: id.clone(), kind, targets, path, constraints, severity, messages, deactivated })
}

fn read_sparql(shape: &Term, node: &Term, g: &Graph, severity: &Iri, shape_messages: &[Literal]) -> Result<SparqlConstraint, ShaclError> {
    let mut select = None;
    let mut messages = Vec::new();
    let mut deactivated = false;
    let mut triples: Vec<_> = g.with_subject(node).iter().collect();
    triples.sort();
    for t in triples {
        let Some(local) = sh_local(&t.predicate) else { continue };
        match local {
            "select" => select = Some(expect_literal(shape, "sh:select", &t.object)?.lexical().to_owned()),
            "message" => messages.push(expect_literal(shape, "sh:message", &t.object)?.clone()),
            "deactivated" => deactivated = is_true(expect_literal(shape, "sh:deactivated", &t.object)?),
            l if NON_VALIDATING.contains(&l) => {}
            _ => return Err(ShaclError::UnsupportedComponent { shape: shape.clone(), component: t.predicate.clone() }),
        }
    }
    let select_text = select.ok_or_else(|| malformed(shape, format!("SPARQL constraint {node} has no sh:select")))?;
    let query = sparql::prepare(&select_text).map_err(|error| ShaclError::Sparql { shape: shape.clone(), error })?;
    if messages.is_empty() {
        messages = shape_messages.to_vec();
    }
    Ok(SparqlConstraint {
        node: node.clone(),
        select_text,
        query,
        messages,
        severity: severity.clone(),
        deactivated,
        owner_shape: shape.clone(),
    })
}
