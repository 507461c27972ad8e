//! Evaluation of parsed queries over an in-memory dataset.
//!
//! Patterns are evaluated left to right, each step extending the solutions
//! produced so far, so bound variables prune later matches.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use regex::RegexBuilder;

use super::ast::*;
use crate::model::{Graph, Iri, Literal, Term};
use crate::shacl::values::{compare_literals, is_numeric, is_well_formed};
use crate::vocab::{rdf, xsd};

/// One solution: variable name to term.
pub type Binding = BTreeMap<String, Term>;

/// The dataset a query runs against: an active default graph and the
/// addressable named graphs.
#[derive(Debug, Clone, Default)]
pub struct QueryDataset {
    pub default: Arc<Graph>,
    pub named: BTreeMap<Iri, Arc<Graph>>,
}

pub(crate) struct Evaluator<'a> {
    ds: &'a QueryDataset,
}

fn resolve(v: &VarOrTerm, row: &Binding) -> Option<Term> {
    match v {
        VarOrTerm::Term(t) => Some(t.clone()),
        VarOrTerm::Var(name) => row.get(name).cloned(),
    }
}

/// Binds `v` to `t` in `row`, failing when `v` is a constant or already
/// bound to something else.
fn bind(row: &mut Binding, v: &VarOrTerm, t: &Term) -> bool {
    match v {
        VarOrTerm::Term(c) => c == t,
        VarOrTerm::Var(name) => match row.get(name) {
            Some(existing) => existing == t,
            None => {
                row.insert(name.clone(), t.clone());
                true
            }
        },
    }
}

fn compatible(a: &Binding, b: &Binding) -> bool {
    a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
}

/// Pairs `(start, end)` connected by `path` in `g`, restricted to the given
/// endpoints.
pub fn eval_path(path: &PathExpr, g: &Graph, s: Option<&Term>, o: Option<&Term>) -> BTreeSet<(Term, Term)> {
    match path {
        PathExpr::Iri(p) => {
            let candidates = match (s, o) {
                (Some(s), _) => g.with_subject(s),
                (None, Some(o)) => g.with_object(o),
                (None, None) => g.with_predicate(p),
            };
            candidates
                .iter()
                .filter(|t| &t.predicate == p && o.is_none_or(|o| &t.object == o))
                .map(|t| (t.subject.clone(), t.object.clone()))
                .collect()
        }
        PathExpr::Inverse(q) => eval_path(q, g, o, s).into_iter().map(|(a, b)| (b, a)).collect(),
        PathExpr::Alternative(qs) => qs.iter().flat_map(|q| eval_path(q, g, s, o)).collect(),
        PathExpr::Sequence(steps) => {
            if s.is_none() && o.is_some() {
                let reversed = PathExpr::Sequence(steps.iter().rev().map(|q| PathExpr::Inverse(Box::new(q.clone()))).collect());
                return eval_path(&reversed, g, o, None).into_iter().map(|(a, b)| (b, a)).collect();
            }
            let last = steps.len() - 1;
            let mut pairs = eval_path(&steps[0], g, s, if last == 0 { o } else { None });
            for (i, step) in steps.iter().enumerate().skip(1) {
                let end = if i == last { o } else { None };
                let mut next = BTreeSet::new();
                let mut cache: BTreeMap<Term, BTreeSet<(Term, Term)>> = BTreeMap::new();
                for (a, b) in &pairs {
                    let reached = cache.entry(b.clone()).or_insert_with(|| eval_path(step, g, Some(b), end));
                    next.extend(reached.iter().map(|(_, c)| (a.clone(), c.clone())));
                }
                pairs = next;
            }
            pairs
        }
        PathExpr::OneOrMore(q) => one_or_more(q, g, s, o),
        PathExpr::ZeroOrMore(q) => {
            let mut out = one_or_more(q, g, s, o);
            match (s, o) {
                (Some(s), Some(o)) if s == o => {
                    out.insert((s.clone(), s.clone()));
                }
                (Some(_), Some(_)) => {}
                (Some(x), None) | (None, Some(x)) => {
                    out.insert((x.clone(), x.clone()));
                }
                (None, None) => out.extend(g.nodes().into_iter().map(|n| (n.clone(), n.clone()))),
            }
            out
        }
    }
}

/// Nodes reachable from `start` in one or more `step`s.
fn closure(step: &PathExpr, g: &Graph, start: &Term) -> BTreeSet<Term> {
    let mut reached = BTreeSet::new();
    let mut frontier = vec![start.clone()];
    while let Some(n) = frontier.pop() {
        for (_, m) in eval_path(step, g, Some(&n), None) {
            if reached.insert(m.clone()) {
                frontier.push(m);
            }
        }
    }
    reached
}

fn one_or_more(q: &PathExpr, g: &Graph, s: Option<&Term>, o: Option<&Term>) -> BTreeSet<(Term, Term)> {
    match (s, o) {
        (Some(s), _) => closure(q, g, s)
            .into_iter()
            .filter(|r| o.is_none_or(|o| r == o))
            .map(|r| (s.clone(), r))
            .collect(),
        (None, Some(o)) => {
            let inverse = PathExpr::Inverse(Box::new(q.clone()));
            closure(&inverse, g, o).into_iter().map(|r| (r, o.clone())).collect()
        }
        (None, None) => {
            let starts: BTreeSet<Term> = eval_path(q, g, None, None).into_iter().map(|(a, _)| a).collect();
            starts.into_iter().flat_map(|a| closure(q, g, &a).into_iter().map(move |r| (a.clone(), r))).collect()
        }
    }
}

fn match_triple(tp: &TriplePattern, g: &Graph, row: &Binding, out: &mut Vec<Binding>) {
    let s = resolve(&tp.subject, row);
    let o = resolve(&tp.object, row);
    let path = match &tp.predicate {
        PredicatePattern::Path(p) => Some(p.clone()),
        PredicatePattern::Var(v) => match row.get(v) {
            Some(Term::Iri(p)) => Some(PathExpr::Iri(p.clone())),
            Some(_) => return,
            None => None,
        },
    };
    match path {
        Some(p) => {
            for (a, b) in eval_path(&p, g, s.as_ref(), o.as_ref()) {
                let mut r = row.clone();
                if bind(&mut r, &tp.subject, &a) && bind(&mut r, &tp.object, &b) {
                    out.push(r);
                }
            }
        }
        None => {
            let PredicatePattern::Var(pv) = &tp.predicate else { unreachable!("paths handled above") };
            let candidates: Vec<_> = match (&s, &o) {
                (Some(s), _) => g.with_subject(s).iter().collect(),
                (None, Some(o)) => g.with_object(o).iter().collect(),
                (None, None) => g.iter().collect(),
            };
            for t in candidates {
                let mut r = row.clone();
                if bind(&mut r, &tp.subject, &t.subject)
                    && bind(&mut r, &VarOrTerm::Var(pv.clone()), &Term::Iri(t.predicate.clone()))
                    && bind(&mut r, &tp.object, &t.object)
                {
                    out.push(r);
                }
            }
        }
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(ds: &'a QueryDataset) -> Self {
        Evaluator { ds }
    }

    pub fn eval(&self, p: &GraphPattern, active: &Graph, seeds: Vec<Binding>) -> Vec<Binding> {
        match p {
            GraphPattern::Bgp(triples) => {
                let mut rows = seeds;
                for tp in triples {
                    let mut next = Vec::new();
                    for row in &rows {
                        match_triple(tp, active, row, &mut next);
                    }
                    rows = next;
                    if rows.is_empty() {
                        break;
                    }
                }
                rows
            }
            GraphPattern::Join(a, b) => {
                let left = self.eval(a, active, seeds);
                self.eval(b, active, left)
            }
            GraphPattern::Union(a, b) => {
                let mut rows = self.eval(a, active, seeds.clone());
                rows.extend(self.eval(b, active, seeds));
                rows
            }
            GraphPattern::Optional(a, b) => {
                let mut out = Vec::new();
                for row in self.eval(a, active, seeds) {
                    let ext = self.eval(b, active, vec![row.clone()]);
                    if ext.is_empty() {
                        out.push(row);
                    } else {
                        out.extend(ext);
                    }
                }
                out
            }
            GraphPattern::Filter { expr, inner } => self
                .eval(inner, active, seeds)
                .into_iter()
                .filter(|row| self.eval_expr(expr, row, active).and_then(|t| ebv(&t)).unwrap_or(false))
                .collect(),
            GraphPattern::Graph { name, inner } => {
                let mut out = Vec::new();
                for row in seeds {
                    match resolve(name, &row) {
                        Some(Term::Iri(iri)) => {
                            if let Some(g) = self.ds.named.get(&iri) {
                                out.extend(self.eval(inner, g, vec![row]));
                            }
                        }
                        Some(_) => {}
                        None => {
                            for (n, g) in &self.ds.named {
                                let mut r = row.clone();
                                if bind(&mut r, name, &Term::Iri(n.clone())) {
                                    out.extend(self.eval(inner, g, vec![r]));
                                }
                            }
                        }
                    }
                }
                out
            }
            GraphPattern::Bind { inner, expr, var } => self
                .eval(inner, active, seeds)
                .into_iter()
                .map(|mut row| {
                    if !row.contains_key(var) {
                        if let Ok(t) = self.eval_expr(expr, &row, active) {
                            row.insert(var.clone(), t);
                        }
                    }
                    row
                })
                .collect(),
            GraphPattern::Minus(a, b) => {
                let right = self.eval(b, active, vec![Binding::new()]);
                self.eval(a, active, seeds)
                    .into_iter()
                    .filter(|l| !right.iter().any(|r| compatible(l, r) && r.keys().any(|k| l.contains_key(k))))
                    .collect()
            }
            GraphPattern::Values { vars, rows } => {
                let mut out = Vec::new();
                for seed in &seeds {
                    for data in rows {
                        let mut r = seed.clone();
                        let ok = vars.iter().zip(data).all(|(v, t)| match t {
                            Some(t) => bind(&mut r, &VarOrTerm::Var(v.clone()), t),
                            None => true,
                        });
                        if ok {
                            out.push(r);
                        }
                    }
                }
                out
            }
            GraphPattern::Service { .. } => Vec::new(),
        }
    }

    pub fn eval_expr(&self, e: &Expr, row: &Binding, active: &Graph) -> Result<Term, ExprError> {
        match e {
            Expr::Var(v) => row.get(v).cloned().ok_or(ExprError),
            Expr::Const(t) => Ok(t.clone()),
            Expr::Or(a, b) => {
                let x = self.eval_expr(a, row, active).and_then(|t| ebv(&t));
                let y = self.eval_expr(b, row, active).and_then(|t| ebv(&t));
                match (x, y) {
                    (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                    (Ok(false), Ok(false)) => Ok(boolean(false)),
                    _ => Err(ExprError),
                }
            }
            Expr::And(a, b) => {
                let x = self.eval_expr(a, row, active).and_then(|t| ebv(&t));
                let y = self.eval_expr(b, row, active).and_then(|t| ebv(&t));
                match (x, y) {
                    (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                    (Ok(true), Ok(true)) => Ok(boolean(true)),
                    _ => Err(ExprError),
                }
            }
            Expr::Not(a) => Ok(boolean(!ebv(&self.eval_expr(a, row, active)?)?)),
            Expr::Compare(op, a, b) => {
                let x = self.eval_expr(a, row, active)?;
                let y = self.eval_expr(b, row, active)?;
                compare(*op, &x, &y).map(boolean)
            }
            Expr::In { expr, list, negated } => {
                let x = self.eval_expr(expr, row, active)?;
                let mut found = false;
                for item in list {
                    if let Ok(y) = self.eval_expr(item, row, active) {
                        if compare(CompareOp::Eq, &x, &y).unwrap_or(false) {
                            found = true;
                            break;
                        }
                    }
                }
                Ok(boolean(found != *negated))
            }
            Expr::Exists(p) => Ok(boolean(!self.eval(p, active, vec![row.clone()]).is_empty())),
            Expr::NotExists(p) => Ok(boolean(self.eval(p, active, vec![row.clone()]).is_empty())),
            Expr::Call(name, args) => self.call(name, args, row, active),
        }
    }

    fn call(&self, name: &str, args: &[Expr], row: &Binding, active: &Graph) -> Result<Term, ExprError> {
        if name == "BOUND" {
            return Ok(boolean(match &args[0] {
                Expr::Var(v) => row.contains_key(v),
                _ => true,
            }));
        }
        let vals: Vec<Term> = args.iter().map(|a| self.eval_expr(a, row, active)).collect::<Result<_, _>>()?;
        let t = &vals[0];
        Ok(match name {
            "ISIRI" | "ISURI" => boolean(t.is_iri()),
            "ISBLANK" => boolean(t.is_blank_node()),
            "ISLITERAL" => boolean(t.is_literal()),
            "ISNUMERIC" => boolean(t.as_literal().is_some_and(|l| is_numeric(l) && is_well_formed(l))),
            "STR" => match t {
                Term::Iri(i) => string(i.as_str()),
                Term::Literal(l) => string(l.lexical()),
                Term::BlankNode(_) => return Err(ExprError),
            },
            "LANG" => string(t.as_literal().ok_or(ExprError)?.language().unwrap_or("")),
            "DATATYPE" => Term::Iri(t.as_literal().ok_or(ExprError)?.datatype().clone()),
            "SAMETERM" => boolean(vals[0] == vals[1]),
            "LANGMATCHES" => {
                let tag = str_arg(&vals[0])?.to_ascii_lowercase();
                let range = str_arg(&vals[1])?.to_ascii_lowercase();
                boolean(if range == "*" { !tag.is_empty() } else { tag == range || tag.starts_with(&format!("{range}-")) })
            }
            "STRSTARTS" => boolean(str_arg(&vals[0])?.starts_with(str_arg(&vals[1])?)),
            "STRENDS" => boolean(str_arg(&vals[0])?.ends_with(str_arg(&vals[1])?)),
            "CONTAINS" => boolean(str_arg(&vals[0])?.contains(str_arg(&vals[1])?)),
            "STRLEN" => Term::Literal(Literal::integer(str_arg(t)?.chars().count() as i64)),
            "LCASE" | "UCASE" => {
                let l = t.as_literal().ok_or(ExprError)?;
                let s = if name == "LCASE" { l.lexical().to_lowercase() } else { l.lexical().to_uppercase() };
                Term::Literal(match l.language() {
                    Some(tag) => Literal::lang(s, tag),
                    None => Literal::typed(s, l.datatype().clone()),
                })
            }
            "REGEX" => {
                let text = str_arg(&vals[0])?;
                let pattern = str_arg(&vals[1])?;
                let flags = match vals.get(2) {
                    Some(f) => str_arg(f)?,
                    None => "",
                };
                boolean(regex_match(text, pattern, flags).ok_or(ExprError)?)
            }
            _ => return Err(ExprError),
        })
    }
}

/// An expression evaluation error; filters treat it as false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExprError;

pub(crate) fn regex_match(text: &str, pattern: &str, flags: &str) -> Option<bool> {
    let mut b = RegexBuilder::new(pattern);
    for f in flags.chars() {
        match f {
            'i' => b.case_insensitive(true),
            's' => b.dot_matches_new_line(true),
            'm' => b.multi_line(true),
            'x' => b.ignore_whitespace(true),
            'q' => return Some(text.contains(pattern)),
            _ => return None,
        };
    }
    b.build().ok().map(|re| re.is_match(text))
}

fn boolean(b: bool) -> Term {
    Term::Literal(Literal::boolean(b))
}

fn string(s: &str) -> Term {
    Term::Literal(Literal::typed(s, Iri::new_unchecked(xsd::STRING)))
}

fn str_arg(t: &Term) -> Result<&str, ExprError> {
    match t {
        Term::Literal(l) if l.datatype().as_str() == xsd::STRING || l.datatype().as_str() == rdf::LANG_STRING => {
            Ok(l.lexical())
        }
        _ => Err(ExprError),
    }
}

/// Effective boolean value.
pub(crate) fn ebv(t: &Term) -> Result<bool, ExprError> {
    let Term::Literal(l) = t else { return Err(ExprError) };
    match l.datatype().as_str() {
        xsd::BOOLEAN => match l.lexical() {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            _ => Err(ExprError),
        },
        xsd::STRING | rdf::LANG_STRING => Ok(!l.lexical().is_empty()),
        _ if is_numeric(l) => match compare_literals(l, &Literal::integer(0)) {
            Some(Ordering::Equal) => Ok(false),
            Some(_) => Ok(true),
            None => Ok(false),
        },
        _ => Err(ExprError),
    }
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> Result<bool, ExprError> {
    let ord = match (a, b) {
        (Term::Literal(x), Term::Literal(y)) => compare_literals(x, y),
        _ => None,
    };
    match op {
        CompareOp::Eq => Ok(ord.map_or(a == b, |o| o == Ordering::Equal)),
        CompareOp::Ne => Ok(ord.map_or(a != b, |o| o != Ordering::Equal)),
        _ => {
            let o = ord.ok_or(ExprError)?;
            Ok(match op {
                CompareOp::Lt => o == Ordering::Less,
                CompareOp::Le => o != Ordering::Greater,
                CompareOp::Gt => o == Ordering::Greater,
                CompareOp::Ge => o != Ordering::Less,
                CompareOp::Eq | CompareOp::Ne => unreachable!("handled above"),
            })
        }
    }
}

/// Replaces variables by constants (and `$PATH` by a path) throughout a
/// pattern.
pub(crate) fn substitute(p: &GraphPattern, consts: &BTreeMap<String, Term>, path: Option<&PathExpr>) -> GraphPattern {
    let sv = |v: &VarOrTerm| match v {
        VarOrTerm::Var(name) => consts.get(name).map_or_else(|| v.clone(), |t| VarOrTerm::Term(t.clone())),
        other => other.clone(),
    };
    let sp = |p: &GraphPattern| Box::new(substitute(p, consts, path));
    match p {
        GraphPattern::Bgp(ts) => GraphPattern::Bgp(
            ts.iter()
                .map(|t| TriplePattern {
                    subject: sv(&t.subject),
                    predicate: match (&t.predicate, path) {
                        (PredicatePattern::Var(v), Some(path)) if v == "PATH" => PredicatePattern::Path(path.clone()),
                        (PredicatePattern::Var(v), _) => match consts.get(v) {
                            Some(Term::Iri(i)) => PredicatePattern::Path(PathExpr::Iri(i.clone())),
                            _ => t.predicate.clone(),
                        },
                        (other, _) => other.clone(),
                    },
                    object: sv(&t.object),
                })
                .collect(),
        ),
        GraphPattern::Graph { name, inner } => GraphPattern::Graph { name: sv(name), inner: sp(inner) },
        GraphPattern::Service { endpoint, inner } => GraphPattern::Service { endpoint: sv(endpoint), inner: sp(inner) },
        GraphPattern::Filter { expr, inner } => {
            GraphPattern::Filter { expr: substitute_expr(expr, consts, path), inner: sp(inner) }
        }
        GraphPattern::Optional(a, b) => GraphPattern::Optional(sp(a), sp(b)),
        GraphPattern::Union(a, b) => GraphPattern::Union(sp(a), sp(b)),
        GraphPattern::Join(a, b) => GraphPattern::Join(sp(a), sp(b)),
        GraphPattern::Minus(a, b) => GraphPattern::Minus(sp(a), sp(b)),
        GraphPattern::Bind { inner, expr, var } => {
            GraphPattern::Bind { inner: sp(inner), expr: substitute_expr(expr, consts, path), var: var.clone() }
        }
        GraphPattern::Values { .. } => p.clone(),
    }
}

pub(crate) fn substitute_expr(e: &Expr, consts: &BTreeMap<String, Term>, path: Option<&PathExpr>) -> Expr {
    let se = |x: &Expr| Box::new(substitute_expr(x, consts, path));
    match e {
        Expr::Var(v) => consts.get(v).map_or_else(|| e.clone(), |t| Expr::Const(t.clone())),
        Expr::Const(_) => e.clone(),
        Expr::Or(a, b) => Expr::Or(se(a), se(b)),
        Expr::And(a, b) => Expr::And(se(a), se(b)),
        Expr::Not(a) => Expr::Not(se(a)),
        Expr::Compare(op, a, b) => Expr::Compare(*op, se(a), se(b)),
        Expr::In { expr, list, negated } => Expr::In {
            expr: se(expr),
            list: list.iter().map(|x| substitute_expr(x, consts, path)).collect(),
            negated: *negated,
        },
        Expr::Exists(p) => Expr::Exists(Box::new(substitute(p, consts, path))),
        Expr::NotExists(p) => Expr::NotExists(Box::new(substitute(p, consts, path))),
        Expr::Call(name, args) => Expr::Call(name.clone(), args.iter().map(|x| substitute_expr(x, consts, path)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Triple;

    fn n(i: u32) -> Term {
        Term::Iri(Iri::new_unchecked(format!("http://e/n{i}")))
    }

    fn p(name: &str) -> Iri {
        Iri::new_unchecked(format!("http://e/{name}"))
    }

    fn chain() -> Graph {
        (0..4).map(|i| Triple::new(n(i), p("k"), n(i + 1))).collect()
    }

    #[test]
    fn one_or_more_from_bound_subject() {
        let g = chain();
        let k = PathExpr::Iri(p("k"));
        let got = eval_path(&PathExpr::OneOrMore(Box::new(k.clone())), &g, Some(&n(1)), None);
        let ends: Vec<Term> = got.into_iter().map(|(_, b)| b).collect();
        assert_eq!(ends, vec![n(2), n(3), n(4)]);
        let back = eval_path(&PathExpr::OneOrMore(Box::new(k)), &g, None, Some(&n(2)));
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn zero_or_more_is_reflexive() {
        let g = chain();
        let k = PathExpr::ZeroOrMore(Box::new(PathExpr::Iri(p("k"))));
        let outside = Term::Iri(p("elsewhere"));
        assert_eq!(eval_path(&k, &g, Some(&outside), None).len(), 1);
        assert_eq!(eval_path(&k, &g, None, None).len(), 5 + 4 + 3 + 2 + 1);
    }

    #[test]
    fn sequence_with_bound_object() {
        let g = chain();
        let k = PathExpr::Iri(p("k"));
        let seq = PathExpr::Sequence(vec![k.clone(), k]);
        let got = eval_path(&seq, &g, None, Some(&n(3)));
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![(n(1), n(3))]);
    }

    #[test]
    fn effective_boolean_values() {
        assert_eq!(ebv(&boolean(true)), Ok(true));
        assert_eq!(ebv(&string("")), Ok(false));
        assert_eq!(ebv(&Term::Literal(Literal::integer(0))), Ok(false));
        assert_eq!(ebv(&n(0)), Err(ExprError));
    }
}
