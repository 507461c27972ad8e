//! Recursive-descent parser for the supported SELECT subset.

use std::collections::HashMap;

use super::ast::*;
use super::SparqlError;
use crate::io::cursor::{is_name_char, is_name_start, Cursor};
use crate::model::{Iri, Literal, Term};
use crate::vocab::{rdf, xsd};

const BUILTINS: &[(&str, usize, usize)] = &[
    ("REGEX", 2, 3),
    ("ISIRI", 1, 1),
    ("ISURI", 1, 1),
    ("ISBLANK", 1, 1),
    ("ISLITERAL", 1, 1),
    ("ISNUMERIC", 1, 1),
    ("BOUND", 1, 1),
    ("STR", 1, 1),
    ("LANG", 1, 1),
    ("DATATYPE", 1, 1),
    ("SAMETERM", 2, 2),
    ("LANGMATCHES", 2, 2),
    ("STRSTARTS", 2, 2),
    ("STRENDS", 2, 2),
    ("CONTAINS", 2, 2),
    ("STRLEN", 1, 1),
    ("LCASE", 1, 1),
    ("UCASE", 1, 1),
];

const AGGREGATES: &[&str] = &["COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT"];

pub(crate) struct Parser {
    cur: Cursor,
    prefixes: HashMap<String, String>,
    blank_vars: HashMap<String, String>,
    next_blank: usize,
}

type Res<T> = Result<T, SparqlError>;

impl Parser {
    pub fn new(text: &str) -> Self {
        Parser { cur: Cursor::new(text), prefixes: HashMap::new(), blank_vars: HashMap::new(), next_blank: 0 }
    }

    fn syntax(&self, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax(self.cur.error(message))
    }

    fn unsupported(&self, feature: impl Into<String>) -> SparqlError {
        let d = self.cur.error("");
        SparqlError::Unsupported { feature: feature.into(), line: d.line, column: d.column }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.cur.skip_ws();
        self.cur.eat_keyword(word)
    }

    fn peek(&mut self) -> Option<char> {
        self.cur.skip_ws();
        self.cur.peek()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.cur.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Res<()> {
        self.cur.expect(c).map_err(SparqlError::Syntax)
    }

    pub fn parse_query(mut self) -> Res<Query> {
        self.prologue()?;
        for form in ["ASK", "CONSTRUCT", "DESCRIBE"] {
            if self.keyword(form) {
                return Err(self.unsupported(format!("{form} queries")));
            }
        }
        if !self.keyword("SELECT") {
            return Err(self.syntax("expected SELECT"));
        }
        let distinct = self.keyword("DISTINCT") || self.keyword("REDUCED");
        let projection = self.projection()?;
        let mut from = Vec::new();
        let mut from_named = Vec::new();
        while self.keyword("FROM") {
            if self.keyword("NAMED") {
                from_named.push(self.iri()?);
            } else {
                from.push(self.iri()?);
            }
        }
        self.keyword("WHERE");
        let pattern = self.group()?;
        for (kw, name) in [
            ("GROUP", "GROUP BY"),
            ("HAVING", "HAVING"),
            ("ORDER", "ORDER BY"),
            ("LIMIT", "LIMIT"),
            ("OFFSET", "OFFSET"),
        ] {
            if self.keyword(kw) {
                return Err(self.unsupported(name));
            }
        }
        if self.peek().is_some() {
            return Err(self.syntax("unexpected input after query"));
        }
        Ok(Query { distinct, projection, from, from_named, pattern })
    }

    fn prologue(&mut self) -> Res<()> {
        loop {
            if self.keyword("PREFIX") {
                self.cur.skip_ws();
                let (prefix, local) = self.cur.prefixed_name_parts().map_err(SparqlError::Syntax)?;
                if !local.is_empty() {
                    return Err(self.syntax("expected a prefix declaration like 'ex:'"));
                }
                self.cur.skip_ws();
                let iri = self.cur.iri_ref().map_err(SparqlError::Syntax)?;
                self.prefixes.insert(prefix, iri.as_str().to_owned());
            } else if self.keyword("BASE") {
                self.cur.skip_ws();
                let iri = self.cur.iri_ref().map_err(SparqlError::Syntax)?;
                self.cur.base = Some(iri.as_str().to_owned());
            } else {
                return Ok(());
            }
        }
    }

    fn projection(&mut self) -> Res<Projection> {
        if self.eat('*') {
            return Ok(Projection::All);
        }
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some('?' | '$') => items.push(ProjectionItem::Var(self.var()?)),
                Some('(') => {
                    self.cur.bump();
                    let e = self.expr()?;
                    if !self.keyword("AS") {
                        return Err(self.syntax("expected AS in projection"));
                    }
                    let v = self.var()?;
                    self.expect(')')?;
                    items.push(ProjectionItem::Expr(e, v));
                }
                _ => break,
            }
        }
        if items.is_empty() {
            return Err(self.syntax("expected '*' or at least one projected variable"));
        }
        Ok(Projection::Items(items))
    }

    fn var(&mut self) -> Res<String> {
        self.cur.skip_ws();
        if !matches!(self.cur.peek(), Some('?' | '$')) {
            return Err(self.syntax("expected a variable"));
        }
        self.cur.bump();
        let mut name = String::new();
        while let Some(c) = self.cur.peek().filter(|&c| is_name_char(c) && c != '-') {
            name.push(c);
            self.cur.bump();
        }
        if name.is_empty() {
            return Err(self.syntax("empty variable name"));
        }
        Ok(name)
    }

    fn iri(&mut self) -> Res<Iri> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('<') => self.cur.iri_ref().map_err(SparqlError::Syntax),
            Some(c) if is_name_start(c) || c == ':' => self.pname(),
            _ => Err(self.syntax("expected an IRI")),
        }
    }

    fn pname(&mut self) -> Res<Iri> {
        let start = self.cur.pos;
        let (prefix, local) = self.cur.prefixed_name_parts().map_err(SparqlError::Syntax)?;
        let ns = self
            .prefixes
            .get(&prefix)
            .ok_or_else(|| SparqlError::Syntax(self.cur.error_at(start, format!("undeclared prefix '{prefix}:'"))))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| SparqlError::Syntax(self.cur.error_at(start, e.to_string())))
    }

    fn group(&mut self) -> Res<GraphPattern> {
        self.expect('{')?;
        if self.keyword("SELECT") {
            return Err(self.unsupported("subqueries"));
        }
        let mut acc = GraphPattern::empty();
        let mut filters = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.syntax("unterminated group pattern")),
                Some('}') => {
                    self.cur.bump();
                    break;
                }
                Some('.') => {
                    self.cur.bump();
                }
                Some('{') => {
                    let p = self.group_or_union()?;
                    acc = GraphPattern::join(acc, p);
                }
                _ if self.keyword("OPTIONAL") => {
                    let p = self.group()?;
                    acc = GraphPattern::Optional(Box::new(acc), Box::new(p));
                }
                _ if self.keyword("MINUS") => {
                    let p = self.group()?;
                    acc = GraphPattern::Minus(Box::new(acc), Box::new(p));
                }
                _ if self.keyword("GRAPH") => {
                    let name = self.var_or_iri()?;
                    let inner = self.group()?;
                    acc = GraphPattern::join(acc, GraphPattern::Graph { name, inner: Box::new(inner) });
                }
                _ if self.keyword("SERVICE") => {
                    self.keyword("SILENT");
                    let endpoint = self.var_or_iri()?;
                    let inner = self.group()?;
                    acc = GraphPattern::join(acc, GraphPattern::Service { endpoint, inner: Box::new(inner) });
                }
                _ if self.keyword("FILTER") => filters.push(self.constraint()?),
                _ if self.keyword("BIND") => {
                    self.expect('(')?;
                    let expr = self.expr()?;
                    if !self.keyword("AS") {
                        return Err(self.syntax("expected AS in BIND"));
                    }
                    let var = self.var()?;
                    self.expect(')')?;
                    acc = GraphPattern::Bind { inner: Box::new(acc), expr, var };
                }
                _ if self.keyword("VALUES") => {
                    let p = self.values()?;
                    acc = GraphPattern::join(acc, p);
                }
                _ => {
                    let triples = self.triples_block()?;
                    acc = GraphPattern::join(acc, GraphPattern::Bgp(triples));
                }
            }
        }
        Ok(match filters.into_iter().reduce(|a, b| Expr::And(Box::new(a), Box::new(b))) {
            Some(expr) => GraphPattern::Filter { expr, inner: Box::new(acc) },
            None => acc,
        })
    }

    fn group_or_union(&mut self) -> Res<GraphPattern> {
        let mut p = self.group()?;
        while self.keyword("UNION") {
            let q = self.group()?;
            p = GraphPattern::Union(Box::new(p), Box::new(q));
        }
        Ok(p)
    }

    fn values(&mut self) -> Res<GraphPattern> {
        let mut vars = Vec::new();
        let single = matches!(self.peek(), Some('?' | '$'));
        if single {
            vars.push(self.var()?);
        } else {
            self.expect('(')?;
            while matches!(self.peek(), Some('?' | '$')) {
                vars.push(self.var()?);
            }
            self.expect(')')?;
        }
        self.expect('{')?;
        let mut rows = Vec::new();
        loop {
            if self.eat('}') {
                break;
            }
            let mut row = Vec::new();
            if single {
                row.push(self.values_term()?);
            } else {
                self.expect('(')?;
                while !self.eat(')') {
                    row.push(self.values_term()?);
                }
            }
            if row.len() != vars.len() {
                return Err(self.syntax("VALUES row length does not match its variables"));
            }
            rows.push(row);
        }
        Ok(GraphPattern::Values { vars, rows })
    }

    fn values_term(&mut self) -> Res<Option<Term>> {
        if self.keyword("UNDEF") {
            return Ok(None);
        }
        match self.graph_term()? {
            VarOrTerm::Term(t) => Ok(Some(t)),
            VarOrTerm::Var(_) => Err(self.syntax("variables are not allowed in VALUES data")),
        }
    }

    fn constraint(&mut self) -> Res<Expr> {
        match self.peek() {
            Some('(') => {
                self.cur.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.primary(),
        }
    }

    fn var_or_iri(&mut self) -> Res<VarOrTerm> {
        match self.peek() {
            Some('?' | '$') => Ok(VarOrTerm::Var(self.var()?)),
            _ => Ok(VarOrTerm::Term(Term::Iri(self.iri()?))),
        }
    }

    fn triples_block(&mut self) -> Res<Vec<TriplePattern>> {
        let mut out = Vec::new();
        loop {
            let subject = self.subject(&mut out)?;
            let has_props = !matches!(self.peek(), Some('.' | '}'));
            if has_props {
                self.property_list(&subject, &mut out)?;
            }
            if !self.eat('.') {
                break;
            }
            match self.peek() {
                Some('?' | '$' | '<' | '_' | '[' | '"' | '\'' | '(') => continue,
                Some(c) if (is_name_start(c) || c == ':') && !self.at_group_keyword() => continue,
                _ => break,
            }
        }
        Ok(out)
    }

    fn at_group_keyword(&mut self) -> bool {
        let save = self.cur.pos;
        let hit = ["OPTIONAL", "MINUS", "GRAPH", "SERVICE", "FILTER", "BIND", "VALUES"].iter().any(|k| {
            self.cur.pos = save;
            self.cur.eat_keyword(k)
        });
        self.cur.pos = save;
        hit
    }

    fn fresh_var(&mut self) -> String {
        let v = format!("_:q{}", self.next_blank);
        self.next_blank += 1;
        v
    }

    fn subject(&mut self, out: &mut Vec<TriplePattern>) -> Res<VarOrTerm> {
        match self.peek() {
            Some('[') => self.blank_property_list(out),
            Some('(') => Err(self.unsupported("RDF collections in query patterns")),
            _ => {
                let t = self.graph_term()?;
                if matches!(t, VarOrTerm::Term(Term::Literal(_))) {
                    return Err(self.syntax("a literal cannot be a subject"));
                }
                Ok(t)
            }
        }
    }

    fn blank_property_list(&mut self, out: &mut Vec<TriplePattern>) -> Res<VarOrTerm> {
        self.expect('[')?;
        let node = VarOrTerm::Var(self.fresh_var());
        if !self.eat(']') {
            self.property_list(&node, out)?;
            self.expect(']')?;
        }
        Ok(node)
    }

    fn property_list(&mut self, subject: &VarOrTerm, out: &mut Vec<TriplePattern>) -> Res<()> {
        loop {
            let predicate = match self.peek() {
                Some('?' | '$') => PredicatePattern::Var(self.var()?),
                _ => PredicatePattern::Path(self.path()?),
            };
            loop {
                let object = self.object(out)?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                if !self.eat(',') {
                    break;
                }
            }
            if !self.eat(';') {
                return Ok(());
            }
            while self.eat(';') {}
            if matches!(self.peek(), Some('.' | ']' | '}')) {
                return Ok(());
            }
        }
    }

    fn object(&mut self, out: &mut Vec<TriplePattern>) -> Res<VarOrTerm> {
        match self.peek() {
            Some('[') => self.blank_property_list(out),
            Some('(') => Err(self.unsupported("RDF collections in query patterns")),
            _ => self.graph_term(),
        }
    }

    fn path(&mut self) -> Res<PathExpr> {
        let mut alts = vec![self.path_sequence()?];
        while self.eat('|') {
            alts.push(self.path_sequence()?);
        }
        Ok(if alts.len() == 1 { alts.pop().expect("one") } else { PathExpr::Alternative(alts) })
    }

    fn path_sequence(&mut self) -> Res<PathExpr> {
        let mut steps = vec![self.path_elt_or_inverse()?];
        while self.eat('/') {
            steps.push(self.path_elt_or_inverse()?);
        }
        Ok(if steps.len() == 1 { steps.pop().expect("one") } else { PathExpr::Sequence(steps) })
    }

    fn path_elt_or_inverse(&mut self) -> Res<PathExpr> {
        if self.eat('^') {
            return Ok(PathExpr::Inverse(Box::new(self.path_elt()?)));
        }
        self.path_elt()
    }

    fn path_elt(&mut self) -> Res<PathExpr> {
        let primary = match self.peek() {
            Some('(') => {
                self.cur.bump();
                let p = self.path()?;
                self.expect(')')?;
                p
            }
            Some('!') => return Err(self.unsupported("negated property sets")),
            Some('a') if !self.cur.peek_at(1).is_some_and(|c| is_name_char(c) || c == ':') => {
                self.cur.bump();
                PathExpr::Iri(Iri::new_unchecked(rdf::TYPE))
            }
            _ => PathExpr::Iri(self.iri()?),
        };
        match self.cur.peek() {
            Some('+') => {
                self.cur.bump();
                Ok(PathExpr::OneOrMore(Box::new(primary)))
            }
            Some('*') => {
                self.cur.bump();
                Ok(PathExpr::ZeroOrMore(Box::new(primary)))
            }
            Some('?') if !self.cur.peek_at(1).is_some_and(is_name_char) => {
                Err(self.unsupported("zero-or-one paths ('?')"))
            }
            _ => Ok(primary),
        }
    }

    /// Variables, IRIs, literals and blank-node labels.
    fn graph_term(&mut self) -> Res<VarOrTerm> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('?' | '$') => Ok(VarOrTerm::Var(self.var()?)),
            Some('<') => Ok(VarOrTerm::Term(Term::Iri(self.cur.iri_ref().map_err(SparqlError::Syntax)?))),
            Some('_') if self.cur.peek_at(1) == Some(':') => {
                self.cur.pos += 2;
                let mut label = String::new();
                while let Some(c) = self.cur.peek().filter(|&c| is_name_char(c)) {
                    label.push(c);
                    self.cur.bump();
                }
                let next = self.blank_vars.len();
                let v = self.blank_vars.entry(label).or_insert_with(|| format!("_:l{next}")).clone();
                Ok(VarOrTerm::Var(v))
            }
            Some('"' | '\'') => Ok(VarOrTerm::Term(Term::Literal(self.literal()?))),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                Ok(VarOrTerm::Term(Term::Literal(self.cur.number().map_err(SparqlError::Syntax)?)))
            }
            Some(_) if self.cur.eat_keyword("true") => Ok(VarOrTerm::Term(Term::Literal(Literal::boolean(true)))),
            Some(_) if self.cur.eat_keyword("false") => Ok(VarOrTerm::Term(Term::Literal(Literal::boolean(false)))),
            Some(c) if is_name_start(c) || c == ':' => Ok(VarOrTerm::Term(Term::Iri(self.pname()?))),
            Some(c) => Err(self.syntax(format!("unexpected '{c}'"))),
            None => Err(self.syntax("unexpected end of query")),
        }
    }

    fn literal(&mut self) -> Res<Literal> {
        let lexical = self.cur.string(true).map_err(SparqlError::Syntax)?;
        match self.cur.peek() {
            Some('@') => {
                self.cur.bump();
                let tag = self.cur.language_tag().map_err(SparqlError::Syntax)?;
                Ok(Literal::lang(lexical, tag))
            }
            Some('^') if self.cur.peek_at(1) == Some('^') => {
                self.cur.pos += 2;
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::typed(lexical, Iri::new_unchecked(xsd::STRING))),
        }
    }

    pub(crate) fn expr(&mut self) -> Res<Expr> {
        let mut left = self.and_expr()?;
        while self.eat_op("||") {
            let right = self.and_expr()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        self.cur.skip_ws();
        let matches = op.chars().enumerate().all(|(i, c)| self.cur.peek_at(i) == Some(c));
        if matches {
            self.cur.pos += op.chars().count();
        }
        matches
    }

    fn and_expr(&mut self) -> Res<Expr> {
        let mut left = self.relational()?;
        while self.eat_op("&&") {
            let right = self.relational()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn relational(&mut self) -> Res<Expr> {
        let left = self.additive()?;
        let op = if self.eat_op("!=") {
            CompareOp::Ne
        } else if self.eat_op("<=") {
            CompareOp::Le
        } else if self.eat_op(">=") {
            CompareOp::Ge
        } else if self.eat_op("=") {
            CompareOp::Eq
        } else if self.peek() == Some('<') && !self.looks_like_iri() {
            self.cur.bump();
            CompareOp::Lt
        } else if self.eat_op(">") {
            CompareOp::Gt
        } else if self.keyword("IN") {
            return Ok(Expr::In { expr: Box::new(left), list: self.expr_list()?, negated: false });
        } else if self.keyword("NOT") {
            if !self.keyword("IN") {
                return Err(self.syntax("expected IN after NOT"));
            }
            return Ok(Expr::In { expr: Box::new(left), list: self.expr_list()?, negated: true });
        } else {
            return Ok(left);
        };
        let right = self.additive()?;
        Ok(Expr::Compare(op, Box::new(left), Box::new(right)))
    }

    /// Distinguishes `<iri>` from the less-than operator.
    fn looks_like_iri(&self) -> bool {
        let mut i = 1;
        while let Some(c) = self.cur.peek_at(i) {
            match c {
                '>' => return true,
                c if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => return false,
                _ => i += 1,
            }
        }
        false
    }

    fn expr_list(&mut self) -> Res<Vec<Expr>> {
        self.expect('(')?;
        let mut list = Vec::new();
        if self.eat(')') {
            return Ok(list);
        }
        loop {
            list.push(self.expr()?);
            if self.eat(')') {
                return Ok(list);
            }
            self.expect(',')?;
        }
    }

    fn additive(&mut self) -> Res<Expr> {
        let e = self.unary()?;
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('*' | '/' | '+' | '-') => Err(self.unsupported("arithmetic expressions")),
            _ => Ok(e),
        }
    }

    fn unary(&mut self) -> Res<Expr> {
        if self.peek() == Some('!') && self.cur.peek_at(1) != Some('=') {
            self.cur.bump();
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Res<Expr> {
        match self.peek() {
            Some('(') => {
                self.cur.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('?' | '$') => Ok(Expr::Var(self.var()?)),
            Some('<') => {
                let iri = self.cur.iri_ref().map_err(SparqlError::Syntax)?;
                if self.peek() == Some('(') {
                    return Err(self.unsupported(format!("custom function {iri}")));
                }
                Ok(Expr::Const(Term::Iri(iri)))
            }
            Some('"' | '\'') => Ok(Expr::Const(Term::Literal(self.literal()?))),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                Ok(Expr::Const(Term::Literal(self.cur.number().map_err(SparqlError::Syntax)?)))
            }
            Some(_) if self.keyword("NOT") => {
                if !self.keyword("EXISTS") {
                    return Err(self.syntax("expected EXISTS after NOT"));
                }
                Ok(Expr::NotExists(Box::new(self.group()?)))
            }
            Some(_) if self.keyword("EXISTS") => Ok(Expr::Exists(Box::new(self.group()?))),
            Some(_) if self.keyword("true") => Ok(Expr::Const(Term::Literal(Literal::boolean(true)))),
            Some(_) if self.keyword("false") => Ok(Expr::Const(Term::Literal(Literal::boolean(false)))),
            Some(c) if is_name_start(c) => self.call_or_pname(),
            Some(':') => Ok(Expr::Const(Term::Iri(self.pname()?))),
            Some(c) => Err(self.syntax(format!("unexpected '{c}' in expression"))),
            None => Err(self.syntax("unexpected end of expression")),
        }
    }

    fn call_or_pname(&mut self) -> Res<Expr> {
        let save = self.cur.pos;
        let mut name = String::new();
        while let Some(c) = self.cur.peek().filter(|&c| c.is_ascii_alphanumeric() || c == '_') {
            name.push(c);
            self.cur.bump();
        }
        if self.cur.peek() == Some(':') {
            self.cur.pos = save;
            let iri = self.pname()?;
            if self.peek() == Some('(') {
                return Err(self.unsupported(format!("custom function {iri}")));
            }
            return Ok(Expr::Const(Term::Iri(iri)));
        }
        let upper = name.to_ascii_uppercase();
        if AGGREGATES.contains(&upper.as_str()) {
            return Err(self.unsupported(format!("aggregate {upper}")));
        }
        let Some(&(_, min, max)) = BUILTINS.iter().find(|(n, _, _)| *n == upper) else {
            self.cur.pos = save;
            return Err(self.unsupported(format!("function {name}")));
        };
        let args = self.expr_list()?;
        if args.len() < min || args.len() > max {
            return Err(self.syntax(format!("{upper} takes {min}..={max} arguments, got {}", args.len())));
        }
        if upper == "BOUND" && !matches!(args[0], Expr::Var(_)) {
            return Err(self.syntax("BOUND expects a variable"));
        }
        Ok(Expr::Call(upper, args))
    }
}
