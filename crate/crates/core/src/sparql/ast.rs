//! Abstract syntax of the supported SELECT subset.

use std::collections::BTreeSet;

use crate::model::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarOrTerm {
    Var(String),
    Term(Term),
}

impl VarOrTerm {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            VarOrTerm::Var(v) => Some(v),
            VarOrTerm::Term(_) => None,
        }
    }
}

/// A property path expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathExpr {
    Iri(Iri),
    Inverse(Box<PathExpr>),
    Sequence(Vec<PathExpr>),
    Alternative(Vec<PathExpr>),
    OneOrMore(Box<PathExpr>),
    ZeroOrMore(Box<PathExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredicatePattern {
    Var(String),
    Path(PathExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: VarOrTerm,
    pub predicate: PredicatePattern,
    pub object: VarOrTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphPattern {
    Bgp(Vec<TriplePattern>),
    Graph { name: VarOrTerm, inner: Box<GraphPattern> },
    Filter { expr: Expr, inner: Box<GraphPattern> },
    Optional(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Join(Box<GraphPattern>, Box<GraphPattern>),
    Minus(Box<GraphPattern>, Box<GraphPattern>),
    Bind { inner: Box<GraphPattern>, expr: Expr, var: String },
    Values { vars: Vec<String>, rows: Vec<Vec<Option<Term>>> },
    Service { endpoint: VarOrTerm, inner: Box<GraphPattern> },
}

impl GraphPattern {
    pub fn empty() -> Self {
        GraphPattern::Bgp(Vec::new())
    }

    /// Joins two patterns, dropping empty group identities.
    pub fn join(left: GraphPattern, right: GraphPattern) -> Self {
        match (left, right) {
            (GraphPattern::Bgp(a), r) if a.is_empty() => r,
            (l, GraphPattern::Bgp(b)) if b.is_empty() => l,
            (GraphPattern::Bgp(mut a), GraphPattern::Bgp(b)) => {
                a.extend(b);
                GraphPattern::Bgp(a)
            }
            (l, r) => GraphPattern::Join(Box::new(l), Box::new(r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Const(Term),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    In { expr: Box<Expr>, list: Vec<Expr>, negated: bool },
    Exists(Box<GraphPattern>),
    NotExists(Box<GraphPattern>),
    /// Built-in call; the name is upper-cased.
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    All,
    Items(Vec<ProjectionItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionItem {
    Var(String),
    Expr(Expr, String),
}

impl ProjectionItem {
    pub fn var(&self) -> &str {
        match self {
            ProjectionItem::Var(v) | ProjectionItem::Expr(_, v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub distinct: bool,
    pub projection: Projection,
    pub from: Vec<Iri>,
    pub from_named: Vec<Iri>,
    pub pattern: GraphPattern,
}

impl Query {
    /// Every variable mentioned anywhere in the query, `this` included.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Projection::Items(items) = &self.projection {
            for item in items {
                out.insert(item.var().to_owned());
                if let ProjectionItem::Expr(e, _) = item {
                    expr_vars(e, &mut out);
                }
            }
        }
        pattern_vars(&self.pattern, &mut out);
        out
    }
}

fn vot_var(v: &VarOrTerm, out: &mut BTreeSet<String>) {
    if let VarOrTerm::Var(name) = v {
        out.insert(name.clone());
    }
}

pub(crate) fn pattern_vars(p: &GraphPattern, out: &mut BTreeSet<String>) {
    match p {
        GraphPattern::Bgp(ts) => {
            for t in ts {
                vot_var(&t.subject, out);
                vot_var(&t.object, out);
                if let PredicatePattern::Var(v) = &t.predicate {
                    out.insert(v.clone());
                }
            }
        }
        GraphPattern::Graph { name, inner } | GraphPattern::Service { endpoint: name, inner } => {
            vot_var(name, out);
            pattern_vars(inner, out);
        }
        GraphPattern::Filter { expr, inner } => {
            expr_vars(expr, out);
            pattern_vars(inner, out);
        }
        GraphPattern::Optional(a, b) | GraphPattern::Union(a, b) | GraphPattern::Join(a, b) | GraphPattern::Minus(a, b) => {
            pattern_vars(a, out);
            pattern_vars(b, out);
        }
        GraphPattern::Bind { inner, expr, var } => {
            pattern_vars(inner, out);
            expr_vars(expr, out);
            out.insert(var.clone());
        }
        GraphPattern::Values { vars, .. } => out.extend(vars.iter().cloned()),
    }
}

pub(crate) fn expr_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Const(_) => {}
        Expr::Or(a, b) | Expr::And(a, b) | Expr::Compare(_, a, b) => {
            expr_vars(a, out);
            expr_vars(b, out);
        }
        Expr::Not(a) => expr_vars(a, out),
        Expr::In { expr, list, .. } => {
            expr_vars(expr, out);
            list.iter().for_each(|x| expr_vars(x, out));
        }
        Expr::Exists(p) | Expr::NotExists(p) => pattern_vars(p, out),
        Expr::Call(_, args) => args.iter().for_each(|x| expr_vars(x, out)),
    }
}
