//! N-Quads reader. All IRIs must be absolute.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::cursor::Cursor;
use super::ParseDiagnostic;
use crate::model::{Dataset, Graph, Iri, Literal, Term, Triple};
use crate::vocab::xsd;

pub(crate) fn parse(text: &str) -> Result<Dataset, ParseDiagnostic> {
    let mut cur = Cursor::new(text);
    let mut default = Graph::new();
    let mut named: BTreeMap<Iri, Graph> = BTreeMap::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        let subject = match cur.peek() {
            Some('<') => Term::Iri(cur.iri_ref()?),
            Some('_') => Term::BlankNode(cur.blank_node_label()?),
            _ => return Err(cur.error("expected IRI or blank node as subject")),
        };
        skip_inline(&mut cur);
        if cur.peek() != Some('<') {
            return Err(cur.error("expected IRI as predicate"));
        }
        let predicate = cur.iri_ref()?;
        skip_inline(&mut cur);
        let object = match cur.peek() {
            Some('<') => Term::Iri(cur.iri_ref()?),
            Some('_') => Term::BlankNode(cur.blank_node_label()?),
            Some('"') => {
                let lexical = cur.string(false)?;
                match (cur.peek(), cur.peek_at(1)) {
                    (Some('@'), _) => {
                        cur.bump();
                        Term::Literal(Literal::lang(lexical, cur.language_tag()?))
                    }
                    (Some('^'), Some('^')) => {
                        cur.pos += 2;
                        Term::Literal(Literal::typed(lexical, cur.iri_ref()?))
                    }
                    _ => Term::Literal(Literal::typed(lexical, Iri::new_unchecked(xsd::STRING))),
                }
            }
            _ => return Err(cur.error("expected IRI, blank node or literal as object")),
        };
        skip_inline(&mut cur);
        let graph = match cur.peek() {
            Some('<') => Some(cur.iri_ref()?),
            Some('_') => return Err(cur.error("blank-node graph labels are not supported")),
            _ => None,
        };
        skip_inline(&mut cur);
        if cur.bump() != Some('.') {
            return Err(cur.error_at(cur.pos.saturating_sub(1), "expected '.' at end of statement"));
        }
        skip_inline(&mut cur);
        match cur.peek() {
            None | Some('\n') | Some('\r') | Some('#') => {}
            Some(_) => return Err(cur.error("expected end of line after statement")),
        }
        let triple = Triple { subject, predicate, object };
        match graph {
            None => default.insert(triple),
            Some(g) => named.entry(g).or_default().insert(triple),
        };
    }
    let named = named.into_iter().map(|(k, v)| (k, Arc::new(v))).collect();
    Ok(Dataset::from_parts(Arc::new(default), named))
}

/// Skips spaces, tabs and a trailing comment, but not line breaks.
fn skip_inline(cur: &mut Cursor) {
    while let Some(c) = cur.peek() {
        if c == ' ' || c == '\t' {
            cur.bump();
        } else if c == '#' {
            while !matches!(cur.peek(), None | Some('\n')) {
                cur.bump();
            }
        } else {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_quad() {
        let d = parse("_:b <http://e/p> <http://e/o> <http://e/g> .\n").unwrap();
        assert!(d.default_graph().is_empty());
        assert_eq!(d.named_count(), 1);
        assert_eq!(d.named_graph(&Iri::new_unchecked("http://e/g")).unwrap().len(), 1);
    }

    #[test]
    fn comments_and_literals() {
        let d = parse(
            "# header\n\
             <http://e/s> <http://e/p> \"x\\u0041\"@en-GB . # trailing\n\
             <http://e/s> <http://e/p> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\n",
        )
        .unwrap();
        assert_eq!(d.default_graph().len(), 2);
        assert!(d.default_graph().iter().any(|t| t.object == Term::Literal(Literal::lang("xA", "en-gb"))));
    }

    #[test]
    fn rejects_relative_and_missing_dot() {
        assert!(parse("<s> <http://e/p> <http://e/o> .").is_err());
        let e = parse("<http://e/s> <http://e/p> <http://e/o>\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse("<http://e/s> <http://e/p> <http://e/o> . <http://e/s> <http://e/p> <http://e/o> .").is_err());
    }
}
