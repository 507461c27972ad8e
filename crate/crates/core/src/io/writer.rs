//! Turtle, TriG and N-Quads writers.
//!
//! Output is deterministic: triples are sorted, blank nodes are relabelled
//! in order of first appearance, and prefixes are emitted in the order given.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::cursor::{is_name_char, is_name_start};
use super::RdfFormat;
use crate::model::{BlankNode, Dataset, Graph, Iri, Literal, Term, Triple};
use crate::vocab::{rdf, xsd};

struct TermWriter<'a> {
    prefixes: &'a [(String, String)],
    blank_labels: HashMap<BlankNode, String>,
    /// Write integers and booleans as bare tokens (Turtle and TriG only).
    abbreviate: bool,
}

impl<'a> TermWriter<'a> {
    fn new(prefixes: &'a [(String, String)]) -> Self {
        TermWriter { prefixes, blank_labels: HashMap::new(), abbreviate: true }
    }

    fn n_quads() -> Self {
        TermWriter { prefixes: &[], blank_labels: HashMap::new(), abbreviate: false }
    }

    fn iri(&self, iri: &Iri) -> String {
        let value = iri.as_str();
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| value.starts_with(ns.as_str()) && is_safe_local(&value[ns.len()..]))
            .max_by_key(|(_, ns)| ns.len());
        match best {
            Some((prefix, ns)) => format!("{prefix}:{}", &value[ns.len()..]),
            None => format!("<{value}>"),
        }
    }

    fn blank(&mut self, b: &BlankNode) -> String {
        let next = self.blank_labels.len();
        let label = self.blank_labels.entry(b.clone()).or_insert_with(|| format!("b{next}"));
        format!("_:{label}")
    }

    fn literal(&self, lit: &Literal) -> String {
        let dt = lit.datatype().as_str();
        let lex = lit.lexical();
        if self.abbreviate && lit.language().is_none() {
            if dt == xsd::INTEGER && is_integer_lexical(lex) {
                return lex.to_owned();
            }
            if dt == xsd::BOOLEAN && (lex == "true" || lex == "false") {
                return lex.to_owned();
            }
        }
        let quoted = Literal::simple(lex).to_string();
        if let Some(lang) = lit.language() {
            format!("{quoted}@{lang}")
        } else if dt == xsd::STRING {
            quoted
        } else {
            format!("{quoted}^^{}", self.iri(lit.datatype()))
        }
    }

    fn term(&mut self, term: &Term) -> String {
        match term {
            Term::Iri(i) => self.iri(i),
            Term::BlankNode(b) => self.blank(b),
            Term::Literal(l) => self.literal(l),
        }
    }

    fn predicate(&self, p: &Iri) -> String {
        if p.as_str() == rdf::TYPE {
            "a".to_owned()
        } else {
            self.iri(p)
        }
    }

    fn prefix_block(&self, out: &mut String) {
        for (prefix, ns) in self.prefixes {
            let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
        }
    }

    /// Writes subject blocks, each line prefixed by `indent`.
    fn triples(&mut self, g: &Graph, indent: &str, out: &mut String) {
        let sorted = g.sorted();
        let mut by_subject: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
        for t in sorted {
            by_subject.entry(&t.subject).or_default().push(t);
        }
        let mut first_block = true;
        for (subject, triples) in by_subject {
            if !first_block && indent.is_empty() {
                out.push('\n');
            }
            first_block = false;
            let s = self.term(subject);
            let _ = write!(out, "{indent}{s}");
            let mut last_pred: Option<&Iri> = None;
            for t in &triples {
                let o = self.term(&t.object);
                if last_pred == Some(&t.predicate) {
                    let _ = write!(out, ", {o}");
                } else {
                    if last_pred.is_some() {
                        let _ = write!(out, " ;\n{indent}    ");
                    } else {
                        out.push(' ');
                    }
                    let _ = write!(out, "{} {o}", self.predicate(&t.predicate));
                    last_pred = Some(&t.predicate);
                }
            }
            out.push_str(" .\n");
        }
    }
}

fn is_integer_lexical(lex: &str) -> bool {
    let digits = lex.strip_prefix(['+', '-']).unwrap_or(lex);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

/// Local names written without escapes.
fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if is_name_start(c) || c.is_ascii_digit() => chars.all(|c| is_name_char(c) && c.is_ascii()),
        _ => false,
    }
}

/// Serializes a graph as Turtle, or as TriG with the triples in a default
/// graph block. N-Quads writes plain triples.
pub fn serialize_graph(g: &Graph, format: RdfFormat, prefixes: &[(String, String)]) -> String {
    let mut out = String::new();
    match format {
        RdfFormat::Turtle => {
            let mut w = TermWriter::new(prefixes);
            w.prefix_block(&mut out);
            if !g.is_empty() {
                if !prefixes.is_empty() {
                    out.push('\n');
                }
                w.triples(g, "", &mut out);
            }
        }
        RdfFormat::TriG => {
            let mut w = TermWriter::new(prefixes);
            w.prefix_block(&mut out);
            if !g.is_empty() {
                if !prefixes.is_empty() {
                    out.push('\n');
                }
                out.push_str("{\n");
                w.triples(g, "    ", &mut out);
                out.push_str("}\n");
            }
        }
        RdfFormat::NQuads => {
            let mut w = TermWriter::n_quads();
            for t in g.sorted() {
                let _ = writeln!(out, "{} {} {} .", w.term(&t.subject), t.predicate, w.term(&t.object));
            }
        }
    }
    out
}

/// Serializes a whole dataset as TriG (or N-Quads).
pub fn serialize_dataset(d: &Dataset, format: RdfFormat, prefixes: &[(String, String)]) -> String {
    let mut out = String::new();
    match format {
        RdfFormat::NQuads => {
            let mut w = TermWriter::n_quads();
            for (name, g) in d.graphs_of() {
                for t in g.sorted() {
                    let _ = write!(out, "{} {} {}", w.term(&t.subject), t.predicate, w.term(&t.object));
                    if let Some(n) = name {
                        let _ = write!(out, " {n}");
                    }
                    out.push_str(" .\n");
                }
            }
        }
        RdfFormat::Turtle | RdfFormat::TriG => {
            let mut w = TermWriter::new(prefixes);
            w.prefix_block(&mut out);
            if !d.default_graph().is_empty() {
                out.push('\n');
                w.triples(d.default_graph(), "", &mut out);
            }
            if format == RdfFormat::TriG {
                for (name, g) in d.named_graphs() {
                    let _ = write!(out, "\n{} {{\n", w.iri(name));
                    w.triples(g, "    ", &mut out);
                    out.push_str("}\n");
                }
            }
        }
    }
    out
}
