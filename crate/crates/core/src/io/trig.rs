//! TriG and Turtle reader.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::cursor::{is_name_char, is_name_start, Cursor};
use super::ParseDiagnostic;
use crate::model::{Dataset, Graph, Iri, Literal, Term, Triple};
use crate::vocab::{rdf, xsd};

pub(crate) struct TrigParser {
    cur: Cursor,
    allow_graphs: bool,
    prefixes: HashMap<String, String>,
    default: Graph,
    named: BTreeMap<Iri, Graph>,
    current: Option<Iri>,
}

impl TrigParser {
    pub fn new(text: &str, allow_graphs: bool) -> Self {
        TrigParser {
            cur: Cursor::new(text),
            allow_graphs,
            prefixes: HashMap::new(),
            default: Graph::new(),
            named: BTreeMap::new(),
            current: None,
        }
    }

    pub fn with_base(mut self, base: Option<String>) -> Self {
        self.cur.base = base;
        self
    }

    pub fn parse(mut self) -> Result<Dataset, ParseDiagnostic> {
        loop {
            self.cur.skip_ws();
            if self.cur.at_end() {
                break;
            }
            self.statement()?;
        }
        let named = self.named.into_iter().map(|(k, v)| (k, Arc::new(v))).collect();
        Ok(Dataset::from_parts(Arc::new(self.default), named))
    }

    fn emit(&mut self, subject: Term, predicate: Iri, object: Term) {
        let triple = Triple { subject, predicate, object };
        match &self.current {
            None => self.default.insert(triple),
            Some(name) => self.named.get_mut(name).expect("graph opened").insert(triple),
        };
    }

    fn statement(&mut self) -> Result<(), ParseDiagnostic> {
        let c = self.cur.peek().expect("not at end");
        if c == '@' {
            self.cur.bump();
            if self.cur.eat_keyword("prefix") {
                self.prefix_decl(true)
            } else if self.cur.eat_keyword("base") {
                self.base_decl(true)
            } else {
                Err(self.cur.error("unknown directive"))
            }
        } else if self.cur.eat_keyword("PREFIX") {
            self.prefix_decl(false)
        } else if self.cur.eat_keyword("BASE") {
            self.base_decl(false)
        } else if self.cur.eat_keyword("GRAPH") {
            self.require_graphs()?;
            self.cur.skip_ws();
            let name = self.graph_name()?;
            self.wrapped_graph(Some(name))
        } else if c == '{' {
            self.require_graphs()?;
            self.wrapped_graph(None)
        } else {
            self.triples_or_graph()
        }
    }

    fn require_graphs(&self) -> Result<(), ParseDiagnostic> {
        if self.allow_graphs {
            Ok(())
        } else {
            Err(self.cur.error("graph blocks are not allowed in Turtle"))
        }
    }

    fn prefix_decl(&mut self, at_form: bool) -> Result<(), ParseDiagnostic> {
        self.cur.skip_ws();
        let mut prefix = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if !(is_name_char(c) || c == '.') {
                return Err(self.cur.error("invalid prefix name"));
            }
            prefix.push(c);
            self.cur.bump();
        }
        self.cur.expect(':')?;
        self.cur.skip_ws();
        let iri = self.cur.iri_ref()?;
        self.prefixes.insert(prefix, iri.as_str().to_owned());
        if at_form {
            self.cur.expect('.')?;
        }
        Ok(())
    }

    fn base_decl(&mut self, at_form: bool) -> Result<(), ParseDiagnostic> {
        self.cur.skip_ws();
        let iri = self.cur.iri_ref()?;
        self.cur.base = Some(iri.as_str().to_owned());
        if at_form {
            self.cur.expect('.')?;
        }
        Ok(())
    }

    fn graph_name(&mut self) -> Result<Iri, ParseDiagnostic> {
        match self.cur.peek() {
            Some('<') => self.cur.iri_ref(),
            Some('_') | Some('[') => Err(self.cur.error("blank-node graph names are not supported; name graphs with IRIs")),
            _ => self.prefixed_name(),
        }
    }

    fn wrapped_graph(&mut self, name: Option<Iri>) -> Result<(), ParseDiagnostic> {
        self.cur.expect('{')?;
        if let Some(n) = &name {
            self.named.entry(n.clone()).or_default();
        }
        let outer = std::mem::replace(&mut self.current, name);
        loop {
            self.cur.skip_ws();
            match self.cur.peek() {
                None => return Err(self.cur.error("unterminated graph block")),
                Some('}') => {
                    self.cur.bump();
                    break;
                }
                _ => {}
            }
            self.triples()?;
            self.cur.skip_ws();
            match self.cur.peek() {
                Some('.') => {
                    self.cur.bump();
                }
                Some('}') => {}
                Some(c) => return Err(self.cur.error(format!("expected '.' or '}}', found '{c}'"))),
                None => return Err(self.cur.error("unterminated graph block")),
            }
        }
        self.current = outer;
        Ok(())
    }

    /// A top-level statement that is either `subject predicateObjectList .`
    /// or `graphName { ... }`.
    fn triples_or_graph(&mut self) -> Result<(), ParseDiagnostic> {
        let start = self.cur.pos;
        match self.cur.peek() {
            Some('[') | Some('(') => {
                self.triples()?;
                self.cur.expect('.')
            }
            _ => {
                let subject = self.subject()?;
                self.cur.skip_ws();
                if self.cur.peek() == Some('{') {
                    self.require_graphs()?;
                    let name = match subject {
                        Term::Iri(iri) => iri,
                        _ => {
                            return Err(self
                                .cur
                                .error_at(start, "blank-node graph names are not supported; name graphs with IRIs"))
                        }
                    };
                    return self.wrapped_graph(Some(name));
                }
                self.predicate_object_list(&subject)?;
                self.cur.expect('.')
            }
        }
    }

    fn triples(&mut self) -> Result<(), ParseDiagnostic> {
        self.cur.skip_ws();
        if self.cur.peek() == Some('[') {
            let subject = self.blank_node_property_list()?;
            self.cur.skip_ws();
            if !matches!(self.cur.peek(), Some('.') | Some('}') | None) {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, ParseDiagnostic> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('<') => Ok(Term::Iri(self.cur.iri_ref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => Ok(Term::BlankNode(self.cur.blank_node_label()?)),
            Some('[') => self.blank_node_property_list(),
            Some('(') => self.collection(),
            Some(c) if is_name_start(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.cur.error(format!("unexpected '{c}' where a subject was expected"))),
            None => Err(self.cur.error("unexpected end of input")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), ParseDiagnostic> {
        loop {
            self.cur.skip_ws();
            let predicate = self.verb()?;
            loop {
                let object = self.object()?;
                self.emit(subject.clone(), predicate.clone(), object);
                self.cur.skip_ws();
                if self.cur.peek() == Some(',') {
                    self.cur.bump();
                } else {
                    break;
                }
            }
            // One or more ';', optionally followed by another verb.
            let mut saw_semicolon = false;
            loop {
                self.cur.skip_ws();
                if self.cur.peek() == Some(';') {
                    self.cur.bump();
                    saw_semicolon = true;
                } else {
                    break;
                }
            }
            if !saw_semicolon {
                return Ok(());
            }
            if matches!(self.cur.peek(), Some('.') | Some(']') | Some('}') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, ParseDiagnostic> {
        if self.cur.peek() == Some('a') && !self.cur.peek_at(1).is_some_and(|c| is_name_char(c) || c == ':' || c == '.') {
            self.cur.bump();
            return Ok(Iri::new_unchecked(rdf::TYPE));
        }
        match self.cur.peek() {
            Some('<') => self.cur.iri_ref(),
            Some(c) if is_name_start(c) || c == ':' => self.prefixed_name(),
            Some(c) => Err(self.cur.error(format!("unexpected '{c}' where a predicate was expected"))),
            None => Err(self.cur.error("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, ParseDiagnostic> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('<') => Ok(Term::Iri(self.cur.iri_ref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => Ok(Term::BlankNode(self.cur.blank_node_label()?)),
            Some('[') => self.blank_node_property_list(),
            Some('(') => self.collection(),
            Some('"') | Some('\'') => self.literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => Ok(Term::Literal(self.cur.number()?)),
            Some(_) if self.cur.eat_keyword("true") => Ok(Term::Literal(Literal::boolean(true))),
            Some(_) if self.cur.eat_keyword("false") => Ok(Term::Literal(Literal::boolean(false))),
            Some(c) if is_name_start(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.cur.error(format!("unexpected '{c}' where an object was expected"))),
            None => Err(self.cur.error("unexpected end of input")),
        }
    }

    fn literal(&mut self) -> Result<Term, ParseDiagnostic> {
        let lexical = self.cur.string(true)?;
        match self.cur.peek() {
            Some('@') => {
                self.cur.bump();
                let tag = self.cur.language_tag()?;
                Ok(Term::Literal(Literal::lang(lexical, tag)))
            }
            Some('^') if self.cur.peek_at(1) == Some('^') => {
                self.cur.pos += 2;
                let datatype = match self.cur.peek() {
                    Some('<') => self.cur.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                if datatype.as_str() == rdf::LANG_STRING {
                    return Err(self.cur.error("rdf:langString literal without a language tag"));
                }
                Ok(Term::Literal(Literal::typed(lexical, datatype)))
            }
            _ => Ok(Term::Literal(Literal::typed(lexical, Iri::new_unchecked(xsd::STRING)))),
        }
    }

    fn blank_node_property_list(&mut self) -> Result<Term, ParseDiagnostic> {
        self.cur.expect('[')?;
        let node = Term::BlankNode(self.cur.fresh_blank());
        self.cur.skip_ws();
        if self.cur.peek() != Some(']') {
            self.predicate_object_list(&node)?;
        }
        self.cur.expect(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, ParseDiagnostic> {
        self.cur.expect('(')?;
        let mut items = Vec::new();
        loop {
            self.cur.skip_ws();
            match self.cur.peek() {
                Some(')') => {
                    self.cur.bump();
                    break;
                }
                None => return Err(self.cur.error("unterminated collection")),
                _ => items.push(self.object()?),
            }
        }
        let first = Iri::new_unchecked(rdf::FIRST);
        let rest = Iri::new_unchecked(rdf::REST);
        let mut head = Term::Iri(Iri::new_unchecked(rdf::NIL));
        let cells: Vec<Term> = items.iter().map(|_| Term::BlankNode(self.cur.fresh_blank())).collect();
        for (cell, item) in cells.iter().zip(items).rev() {
            self.emit(cell.clone(), first.clone(), item);
            self.emit(cell.clone(), rest.clone(), head);
            head = cell.clone();
        }
        Ok(head)
    }

    fn prefixed_name(&mut self) -> Result<Iri, ParseDiagnostic> {
        let start = self.cur.pos;
        let (prefix, local) = self.cur.prefixed_name_parts()?;
        let namespace = self
            .prefixes
            .get(&prefix)
            .ok_or_else(|| self.cur.error_at(start, format!("undeclared prefix '{prefix}:'")))?;
        let full = format!("{namespace}{local}");
        Iri::new(&full).map_err(|e| self.cur.error_at(start, e.to_string()))
    }
}
